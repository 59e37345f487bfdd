#include "hwb/textio.hpp"

namespace hwb {

using nlohmann::json;

json to_json(const HybridSignature& S) {
  json j;
  j["schema"] = kSchema;
  j["nominals"] = S.nominals;
  j["modalities"] = json::array();
  for (const auto& l : S.modalities) j["modalities"].push_back({{"name", l.name}, {"rank", l.rank}});
  j["sorts"] = json::array();
  for (size_t s = 0; s < S.sorts.size(); ++s)
    j["sorts"].push_back({{"name", S.sorts[s]}, {"rigid", static_cast<bool>(S.sort_rigid[s])}});
  j["ops"] = json::array();
  for (size_t f = 0; f < S.funs.size(); ++f)
    j["ops"].push_back({{"name", S.funs[f].name},
                        {"arity", S.funs[f].arity},
                        {"result", S.funs[f].result},
                        {"rigid", static_cast<bool>(S.fun_rigid[f])}});
  j["rels"] = json::array();
  for (size_t r = 0; r < S.rels.size(); ++r)
    j["rels"].push_back(
        {{"name", S.rels[r].name}, {"arity", S.rels[r].arity}, {"rigid", static_cast<bool>(S.rel_rigid[r])}});
  j["fingerprint"] = S.fingerprint;
  return j;
}

namespace {

json element(const KripkeStructure& m, int s, int w, int v) {
  if (v == kSentinel) return "?";
  if (v < 0) return nullptr;
  return m.carriers[s][m.sort_slot(s, w)][v];
}

std::string slot_name(const KripkeStructure& m, bool rigid, int w) { return rigid ? "shared" : m.worlds[w]; }

}  // namespace

json to_json(const KripkeStructure& m) {
  const auto& S = *m.sig;
  int W = m.num_worlds();
  json j;
  j["schema"] = kSchema;
  j["signature"] = S.fingerprint;
  j["partial"] = m.partial;
  j["worlds"] = m.worlds;
  j["nominals"] = json::object();
  for (size_t k = 0; k < S.nominals.size(); ++k) j["nominals"][S.nominals[k]] = m.worlds[m.nom_val[k]];
  j["modalities"] = json::object();
  for (size_t l = 0; l < S.modalities.size(); ++l) {
    int rank = S.modalities[l].rank;
    json tuples = json::array();
    for (std::size_t idx = 0; idx < m.mod_rel[l].size(); ++idx) {
      if (!m.mod_rel[l][idx]) continue;
      std::vector<std::string> ws(rank);
      std::size_t r = idx;
      for (int i = rank - 1; i >= 0; --i) {
        ws[i] = m.worlds[r % W];
        r /= W;
      }
      tuples.push_back(ws);
    }
    j["modalities"][S.modalities[l].name] = tuples;
  }
  j["carriers"] = json::object();
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    json c = json::object();
    for (size_t slot = 0; slot < m.carriers[s].size(); ++slot)
      c[slot_name(m, S.sort_rigid[s], static_cast<int>(slot))] = m.carriers[s][slot];
    j["carriers"][S.sorts[s]] = c;
  }
  j["ops"] = json::array();
  for (size_t f = 0; f < S.funs.size(); ++f) {
    const auto& ar = S.fun_arg_sorts[f];
    int res = S.fun_result_sort[f];
    json tables = json::object();
    for (size_t slot = 0; slot < m.fun_tab[f].size(); ++slot) {
      int w = static_cast<int>(slot);
      json rows = json::array();
      std::vector<int> args(ar.size(), 0);
      std::size_t n = m.domain_size(ar, w);
      for (std::size_t c = 0; c < n; ++c) {
        json row = json::array();
        for (size_t i = 0; i < ar.size(); ++i) row.push_back(element(m, ar[i], w, args[i]));
        row.push_back(element(m, res, w, m.fun_tab[f][slot][m.index(ar, w, args.data())]));
        rows.push_back(row);
        for (size_t i = 0; i < ar.size(); ++i) {
          if (++args[i] < m.size(ar[i], w)) break;
          args[i] = 0;
        }
      }
      tables[slot_name(m, S.fun_rigid[f], w)] = rows;
    }
    j["ops"].push_back({{"symbol", S.funs[f].str()}, {"tables", tables}});
  }
  j["rels"] = json::array();
  for (size_t r = 0; r < S.rels.size(); ++r) {
    const auto& ar = S.rel_arg_sorts[r];
    json tables = json::object();
    for (size_t slot = 0; slot < m.rel_tab[r].size(); ++slot) {
      int w = static_cast<int>(slot);
      json rows = json::array();
      std::vector<int> args(ar.size(), 0);
      std::size_t n = m.domain_size(ar, w);
      for (std::size_t c = 0; c < n; ++c) {
        if (m.rel_tab[r][slot][m.index(ar, w, args.data())]) {
          json row = json::array();
          for (size_t i = 0; i < ar.size(); ++i) row.push_back(element(m, ar[i], w, args[i]));
          rows.push_back(row);
        }
        for (size_t i = 0; i < ar.size(); ++i) {
          if (++args[i] < m.size(ar[i], w)) break;
          args[i] = 0;
        }
      }
      tables[slot_name(m, S.rel_rigid[r], w)] = rows;
    }
    j["rels"].push_back({{"symbol", S.rels[r].str()}, {"tables", tables}});
  }
  return j;
}

json morphism_json(const KripkeStructure& a, const KripkeStructure& b, const ModelMorphism& h) {
  const auto& S = *a.sig;
  json j;
  j["schema"] = kSchema;
  j["frameMap"] = json::object();
  for (size_t w = 0; w < h.frame.size(); ++w)
    j["frameMap"][a.worlds[w]] = h.frame[w] < 0 ? json(nullptr) : json(b.worlds[h.frame[w]]);
  j["perWorldMaps"] = json::object();
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    for (size_t slot = 0; slot < h.elems[s].size(); ++slot) {
      int wa = static_cast<int>(slot);
      int wb = S.sort_rigid[s] ? 0 : h.frame[wa];
      json map = json::object();
      for (size_t e = 0; e < h.elems[s][slot].size(); ++e) {
        int v = h.elems[s][slot][e];
        map[a.carriers[s][slot][e]] = (v < 0 || wb < 0) ? json(nullptr) : json(b.carriers[s][b.sort_slot(s, wb)][v]);
      }
      j["perWorldMaps"][slot_name(a, S.sort_rigid[s], wa)][S.sorts[s]] = map;
    }
  }
  return j;
}

json to_json(const CriterionReport& r) {
  json j;
  j["schema"] = kSchema;
  j["morphism"] = r.morphism;
  j["sortInjective"] = r.sort_injective;
  j["violations"] = json::array();
  for (const auto& f : r.violations) j["violations"].push_back({{"rule", rule_name(f.rule)}, {"symbols", f.symbols}});
  j["verdict"] = r.verdict();
  return j;
}

json to_json(const SquareReport& r) {
  json j;
  j["schema"] = kSchema;
  j["chi"] = to_json(r.chi);
  j["delta"] = to_json(r.delta);
  j["cipGuaranteed"] = r.cip_guaranteed();
  j["verdict"] = r.verdict();
  return j;
}

}  // namespace hwb
