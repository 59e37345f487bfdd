#include <algorithm>
#include <functional>

#include "hwb/kripke.hpp"

namespace hwb {

namespace {

std::vector<int> preimages(const std::vector<int>& map, int t) {
  std::vector<int> out;
  for (size_t i = 0; i < map.size(); ++i)
    if (map[i] == t) out.push_back(static_cast<int>(i));
  return out;
}

// Least-key ground term built from rigid function symbols only.
std::optional<Term> least_rigid_term(const SigPtr& sig, const std::string& sort) {
  Scope scope(sig);
  for (int d = 0; d <= 3; ++d)
    for (const auto& t : ground_terms(scope, d)) {
      if (t->fun.result != sort) continue;
      std::function<bool(const Term&)> rigid = [&](const Term& x) {
        if (!scope.is_rigid_fun(x->fun)) return false;
        return std::all_of(x->args.begin(), x->args.end(), rigid);
      };
      if (rigid(t)) return t;
    }
  return std::nullopt;
}

void tuples(const std::vector<int>& sizes, const std::function<void(const std::vector<int>&)>& fn) {
  for (int s : sizes)
    if (s == 0) return;
  std::vector<int> idx(sizes.size(), 0);
  while (true) {
    fn(idx);
    size_t i = 0;
    while (i < idx.size() && ++idx[i] == sizes[i]) idx[i++] = 0;
    if (i == idx.size()) return;
  }
}

}  // namespace

Lifted lift_model(const SignatureMorphism& chi, const KripkeStructure& m, const KripkeStructure& n_prime,
                  const ModelMorphism& h) {
  auto report = check_cip_criterion(chi);
  if (!report.passes()) {
    std::string rules;
    for (const auto& r : report.rules()) rules += (rules.empty() ? "" : ", ") + rule_name(r);
    throw CriterionViolation(chi.name + " violates " + rules);
  }
  const auto& S = *chi.source;
  const auto& T = *chi.target;
  if (m.sig->fingerprint != S.fingerprint || n_prime.sig->fingerprint != T.fingerprint)
    throw PreconditionFailed("lift_model: models are not over the morphism's signatures");
  int W = m.num_worlds();
  if (W == 0 || n_prime.num_worlds() != W || static_cast<int>(h.frame.size()) != W)
    throw PreconditionFailed("lift_model: frames must be nonempty and of equal size");
  KripkeStructure n = reduct(chi, n_prime);
  if (auto err = check_generated_iso(n, m, h)) throw PreconditionFailed("lift_model: h is not an isomorphism: " + *err);

  GeneratedSubmodel gn = generated_submodel(n_prime);
  Mask kept_n = generated_mask(n);
  // The image part of G(N') must be all of G(N).
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    int t = chi.sort_map[s];
    for (size_t slot = 0; slot < kept_n[s].size(); ++slot)
      if (kept_n[s][slot] != gn.kept[t][T.sort_rigid[t] ? 0 : slot])
        throw PreconditionFailed("lift_model: generated part of " + T.sorts[t] + " differs from its reduct");
  }

  std::vector<int> inv_frame(W, -1);  // M world -> N' world
  for (int v = 0; v < W; ++v) inv_frame[h.frame[v]] = v;

  // h' as element maps N'-index -> M'-index, per target sort and N' slot.
  std::vector<std::vector<std::vector<int>>> hp(T.sorts.size());
  std::vector<int> src_of(T.sorts.size(), -1);
  for (size_t s = 0; s < S.sorts.size(); ++s) src_of[chi.sort_map[s]] = static_cast<int>(s);

  KripkeStructure r;
  r.sig = chi.target;
  r.worlds = m.worlds;
  r.partial = m.partial;
  // S1: frame.
  for (size_t k = 0; k < T.nominals.size(); ++k) {
    auto pre = preimages(chi.nom_map, static_cast<int>(k));
    r.nom_val.push_back(pre.empty() ? h.frame[n_prime.nom_val[k]] : m.nom_val[pre[0]]);
  }
  for (size_t l = 0; l < T.modalities.size(); ++l) {
    auto pre = preimages(chi.mod_map, static_cast<int>(l));
    if (!pre.empty()) {
      r.mod_rel.push_back(m.mod_rel[pre[0]]);
      continue;
    }
    int rank = T.modalities[l].rank;
    std::vector<int> sizes(rank, W);
    std::vector<char> rel(n_prime.mod_rel[l].size(), 0);
    tuples(sizes, [&](const std::vector<int>& t) {
      std::size_t ia = 0, ib = 0, stride = 1;
      for (int i = rank - 1; i >= 0; --i) {
        ia += t[i] * stride;
        ib += h.frame[t[i]] * stride;
        stride *= W;
      }
      if (n_prime.mod_rel[l][ia]) rel[ib] = 1;
    });
    r.mod_rel.push_back(std::move(rel));
  }

  // Carriers: image sorts from M; others from G(N') with identity maps.
  for (size_t t = 0; t < T.sorts.size(); ++t) {
    int slots = T.sort_rigid[t] ? 1 : W;
    r.carriers.emplace_back(slots);
    hp[t].resize(n_prime.carriers[t].size());
    if (src_of[t] >= 0) {
      int s = src_of[t];
      for (int slot = 0; slot < slots; ++slot) r.carriers[t][slot] = m.carriers[s][m.sort_slot(s, slot)];
      for (size_t v = 0; v < n_prime.carriers[t].size(); ++v) {
        hp[t][v] = h.elems[s][n.sort_slot(s, static_cast<int>(v))];
        for (size_t e = 0; e < hp[t][v].size(); ++e)
          if (!gn.kept[t][v][e]) hp[t][v][e] = kUndef;
      }
    } else {
      for (int slot = 0; slot < slots; ++slot) {
        int v = T.sort_rigid[t] ? 0 : inv_frame[slot];
        r.carriers[t][slot] = gn.model.carriers[t][v];
      }
      for (size_t v = 0; v < n_prime.carriers[t].size(); ++v) {
        auto& map = hp[t][v];
        map.assign(n_prime.carriers[t][v].size(), kUndef);
        int next = 0;
        for (size_t e = 0; e < map.size(); ++e)
          if (gn.kept[t][v][e]) map[e] = next++;
      }
    }
  }

  // Inverse of h' per (target sort, M' slot): M'-index -> N'-index.
  auto inverse = [&](int t, int w) {
    int v = T.sort_rigid[t] ? 0 : inv_frame[w];
    std::vector<int> inv(r.carriers[t][T.sort_rigid[t] ? 0 : w].size(), kUndef);
    for (size_t e = 0; e < hp[t][v].size(); ++e)
      if (hp[t][v][e] >= 0) inv[hp[t][v][e]] = static_cast<int>(e);
    return inv;
  };

  r.fun_tab.resize(T.funs.size());
  r.rel_tab.resize(T.rels.size());
  for (size_t f = 0; f < T.funs.size(); ++f) r.fun_tab[f].resize(T.fun_rigid[f] ? 1 : W);
  for (size_t q = 0; q < T.rels.size(); ++q) r.rel_tab[q].resize(T.rel_rigid[q] ? 1 : W);
  resize_tables(r);

  // Transport of an out-of-image symbol along h'; off-image tuples get `fallback`.
  auto transport_fun = [&](int f, int w, const std::function<int()>& fallback) {
    const auto& ar = T.fun_arg_sorts[f];
    int res = T.fun_result_sort[f];
    int v = T.fun_rigid[f] ? 0 : inv_frame[w];
    std::vector<std::vector<int>> inv;
    std::vector<int> sizes;
    for (int s : ar) {
      inv.push_back(inverse(s, w));
      sizes.push_back(r.size(s, w));
    }
    auto& tab = r.fun_tab[f][r.fun_slot(f, w)];
    tuples(sizes, [&](const std::vector<int>& x) {
      std::vector<int> pre;
      for (size_t i = 0; i < x.size(); ++i) pre.push_back(inv[i][x[i]]);
      bool in_image = std::all_of(pre.begin(), pre.end(), [](int e) { return e >= 0; });
      int value;
      if (in_image) {
        int y = n_prime.apply(f, v, pre.data());
        value = y < 0 ? y : hp[res][n_prime.sort_slot(res, v)][y];
        if (value == kUndef) throw PreconditionFailed("lift_model: transported value leaves the generated part");
      } else {
        value = fallback();
      }
      tab[r.index(ar, w, x.data())] = value;
    });
  };

  // S2 and S3: symbols in the image are copied from M.
  std::vector<char> fun_done(T.funs.size(), 0), rel_done(T.rels.size(), 0);
  for (size_t f = 0; f < T.funs.size(); ++f) {
    auto pre = preimages(chi.fun_map, static_cast<int>(f));
    if (pre.empty()) continue;
    for (size_t slot = 0; slot < r.fun_tab[f].size(); ++slot)
      r.fun_tab[f][slot] = m.fun_tab[pre[0]][m.fun_slot(pre[0], static_cast<int>(slot))];
    fun_done[f] = 1;
  }
  for (size_t q = 0; q < T.rels.size(); ++q) {
    auto pre = preimages(chi.rel_map, static_cast<int>(q));
    if (pre.empty()) continue;
    for (size_t slot = 0; slot < r.rel_tab[q].size(); ++slot)
      r.rel_tab[q][slot] = m.rel_tab[pre[0]][m.rel_slot(pre[0], static_cast<int>(slot))];
    rel_done[q] = 1;
  }
  // S2: rigid symbols outside the image; h' is bijective on rigid sorts.
  for (size_t f = 0; f < T.funs.size(); ++f)
    if (!fun_done[f] && T.fun_rigid[f]) {
      transport_fun(static_cast<int>(f), 0,
                    [&]() -> int { throw PreconditionFailed("lift_model: rigid part is not fully generated"); });
      fun_done[f] = 1;
    }
  // S4: flexible symbols outside the image.
  for (size_t f = 0; f < T.funs.size(); ++f) {
    if (fun_done[f]) continue;
    int res = T.fun_result_sort[f];
    std::optional<int> rigid_default;
    if (T.sort_rigid[res])
      if (auto t = least_rigid_term(chi.target, T.sorts[res])) rigid_default = eval_term({&r, 0}, *t);
    for (int w = 0; w < W; ++w) {
      transport_fun(static_cast<int>(f), w, [&]() -> int {
        if (rigid_default) return *rigid_default;
        if (r.size(res, w) > 0) return 0;
        throw NoRigidTerm("no value available for " + T.funs[f].str() + " outside the transported part");
      });
    }
  }
  for (size_t q = 0; q < T.rels.size(); ++q) {
    if (rel_done[q]) continue;
    const auto& ar = T.rel_arg_sorts[q];
    std::vector<int> worlds;
    if (T.rel_rigid[q]) worlds.push_back(0);
    else
      for (int w = 0; w < W; ++w) worlds.push_back(w);
    for (int w : worlds) {
      int v = T.rel_rigid[q] ? 0 : inv_frame[w];
      std::vector<std::vector<int>> inv;
      std::vector<int> sizes;
      for (int s : ar) {
        inv.push_back(inverse(s, w));
        sizes.push_back(r.size(s, w));
      }
      auto& tab = r.rel_tab[q][r.rel_slot(static_cast<int>(q), w)];
      tuples(sizes, [&](const std::vector<int>& x) {
        std::vector<int> pre;
        for (size_t i = 0; i < x.size(); ++i) pre.push_back(inv[i][x[i]]);
        bool in_image = std::all_of(pre.begin(), pre.end(), [](int e) { return e >= 0; });
        tab[r.index(ar, w, x.data())] = in_image && n_prime.holds(static_cast<int>(q), v, pre.data()) ? 1 : 0;
      });
    }
  }

  validate_model(r);
  Lifted out;
  out.iso.frame = h.frame;
  out.iso.elems = hp;
  if (auto d = first_difference(reduct(chi, r), m, true))
    throw PreconditionFailed("lift_model: reduct of the lifted model differs at " + *d);
  ModelMorphism back = reduct_morphism(chi, out.iso);
  for (size_t s = 0; s < S.sorts.size(); ++s)
    for (size_t slot = 0; slot < back.elems[s].size(); ++slot)
      for (size_t e = 0; e < back.elems[s][slot].size(); ++e)
        if (kept_n[s][slot][e] && back.elems[s][slot][e] != h.elems[s][slot][e])
          throw PreconditionFailed("lift_model: lifted isomorphism does not restrict to h");
  if (auto err = check_generated_iso(n_prime, r, out.iso))
    throw PreconditionFailed("lift_model: lifted map is not an isomorphism: " + *err);
  out.model = std::move(r);
  return out;
}

}  // namespace hwb
