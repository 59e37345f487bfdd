#include "hwb/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>

#include "hwb/textio.hpp"

namespace hwb {

std::size_t default_budget() {
  if (const char* env = std::getenv("HWB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 2'000'000;
}

int SearchBounds::carrier_bound(const std::string& sort) const {
  auto it = carrier.find(sort);
  return it == carrier.end() ? max_carrier : it->second;
}

void SearchBounds::validate(const HybridSignature& sig) const {
  std::vector<std::string> v;
  if (max_worlds < 1) v.push_back("max-worlds must be at least 1");
  if (max_carrier < 0) v.push_back("max-carrier must be nonnegative");
  if (term_depth < 0) v.push_back("depth must be nonnegative");
  if (budget == 0) v.push_back("budget must be positive");
  for (const auto& [s, k] : carrier) {
    if (sig.sort_index(s) < 0) v.push_back("carrier bound for unknown sort " + s);
    if (k < 0) v.push_back("carrier bound for " + s + " must be nonnegative");
  }
  if (domain) {
    if (domain->worlds < 1) v.push_back("domain world count must be at least 1");
    for (const auto& [s, k] : domain->carriers) {
      if (sig.sort_index(s) < 0) v.push_back("domain carrier for unknown sort " + s);
      if (k < 0) v.push_back("domain carrier for " + s + " must be nonnegative");
    }
  }
  if (!v.empty()) throw PreconditionFailed(ValidationError::join(v));
}

std::string tag_name(VerdictTag t) {
  switch (t) {
    case VerdictTag::Satisfiable: return "Satisfiable";
    case VerdictTag::Refuted: return "Refuted";
    case VerdictTag::NoneWithinBounds: return "NoneWithinBounds";
    case VerdictTag::ExhaustedComplete: return "ExhaustedComplete";
  }
  return "?";
}

namespace {

// Enumeration stages: 0 frame, 1 carriers, 2+f function f, 2+F+r relation r.
class Enumerator {
 public:
  using Hook = std::function<bool(int stage)>;
  using Leaf = std::function<bool()>;

  Enumerator(const SigPtr& sig, const SearchBounds& b, Hook hook, Leaf leaf)
      : sig_(sig), S_(*sig), b_(b), hook_(std::move(hook)), leaf_(std::move(leaf)) {}

  std::size_t nodes() const { return nodes_; }
  const KripkeStructure& model() const { return m_; }

  void run() {
    int lo = b_.domain ? b_.domain->worlds : 1;
    int hi = b_.domain ? b_.domain->worlds : b_.max_worlds;
    for (int W = lo; W <= hi && !stop_; ++W) {
      m_ = blank_model(sig_, W);
      nominals(0);
    }
  }

 private:
  void tick() {
    if (++nodes_ > b_.budget)
      throw BudgetExceeded("oracle budget of " + std::to_string(b_.budget) + " nodes exhausted");
  }

  static bool bump(std::vector<int>& v, int radix) {
    for (int& x : v) {
      if (++x < radix) return true;
      x = 0;
    }
    return false;
  }
  static bool bump(std::vector<char>& v) {
    for (char& x : v) {
      if (x == 0) {
        x = 1;
        return true;
      }
      x = 0;
    }
    return false;
  }

  void nominals(std::size_t) {
    std::fill(m_.nom_val.begin(), m_.nom_val.end(), 0);
    do {
      tick();
      modalities(0);
      if (stop_) return;
    } while (bump(m_.nom_val, m_.num_worlds()));
  }

  void modalities(std::size_t l) {
    if (l == m_.mod_rel.size()) {
      if (hook_(0)) carriers(0, 0);
      return;
    }
    auto& rel = m_.mod_rel[l];
    std::fill(rel.begin(), rel.end(), 0);
    do {
      tick();
      modalities(l + 1);
      if (stop_) return;
    } while (bump(rel));
  }

  std::pair<int, int> size_range(int s) const {
    const std::string& name = S_.sorts[s];
    if (b_.domain) {
      auto it = b_.domain->carriers.find(name);
      if (it != b_.domain->carriers.end()) return {it->second, it->second};
    }
    return {0, b_.carrier_bound(name)};
  }

  void carriers(std::size_t s, std::size_t slot) {
    if (s == S_.sorts.size()) {
      if (!total()) return;
      allocate();
      if (hook_(1)) funs(0, 0);
      return;
    }
    if (slot == m_.carriers[s].size()) {
      carriers(s + 1, 0);
      return;
    }
    auto [lo, hi] = size_range(static_cast<int>(s));
    for (int n = lo; n <= hi && !stop_; ++n) {
      tick();
      set_carrier(m_, static_cast<int>(s), static_cast<int>(slot), n);
      carriers(s, slot + 1);
    }
  }

  // Every function with a nonempty domain needs a nonempty codomain.
  bool total() const {
    for (std::size_t f = 0; f < S_.funs.size(); ++f)
      for (std::size_t slot = 0; slot < m_.fun_tab[f].size(); ++slot) {
        int w = static_cast<int>(slot);
        if (m_.domain_size(S_.fun_arg_sorts[f], w) > 0 && m_.size(S_.fun_result_sort[f], w) == 0) return false;
      }
    return true;
  }

  void allocate() {
    for (std::size_t f = 0; f < S_.funs.size(); ++f)
      for (std::size_t slot = 0; slot < m_.fun_tab[f].size(); ++slot)
        m_.fun_tab[f][slot].assign(m_.domain_size(S_.fun_arg_sorts[f], static_cast<int>(slot)), 0);
    for (std::size_t r = 0; r < S_.rels.size(); ++r)
      for (std::size_t slot = 0; slot < m_.rel_tab[r].size(); ++slot)
        m_.rel_tab[r][slot].assign(m_.domain_size(S_.rel_arg_sorts[r], static_cast<int>(slot)), 0);
  }

  void funs(std::size_t f, std::size_t slot) {
    if (f == S_.funs.size()) {
      rels(0, 0);
      return;
    }
    if (slot == m_.fun_tab[f].size()) {
      if (hook_(2 + static_cast<int>(f))) funs(f + 1, 0);
      return;
    }
    auto& tab = m_.fun_tab[f][slot];
    int radix = m_.size(S_.fun_result_sort[f], static_cast<int>(slot));
    std::fill(tab.begin(), tab.end(), 0);
    do {
      tick();
      funs(f, slot + 1);
      if (stop_) return;
    } while (bump(tab, radix));
  }

  void rels(std::size_t r, std::size_t slot) {
    if (r == S_.rels.size()) {
      if (leaf_()) stop_ = true;
      return;
    }
    if (slot == m_.rel_tab[r].size()) {
      if (hook_(2 + static_cast<int>(S_.funs.size() + r))) rels(r + 1, 0);
      return;
    }
    auto& tab = m_.rel_tab[r][slot];
    std::fill(tab.begin(), tab.end(), 0);
    do {
      tick();
      rels(r, slot + 1);
      if (stop_) return;
    } while (bump(tab));
  }

  SigPtr sig_;
  const HybridSignature& S_;
  const SearchBounds& b_;
  Hook hook_;
  Leaf leaf_;
  KripkeStructure m_;
  std::size_t nodes_ = 0;
  bool stop_ = false;
};

// Last enumeration stage on which a sentence depends.
struct StageOf {
  const HybridSignature& S;

  int term(const Term& t) const {
    int f = S.fun_index(t->fun);
    int st = f < 0 ? 1 : 2 + f;
    for (const auto& a : t->args) st = std::max(st, term(a));
    return st;
  }

  int sentence(const Sentence& s) const {
    int st = 0;
    switch (s->kind) {
      case SenKind::Rel: st = 2 + static_cast<int>(S.funs.size()) + S.rel_index(s->rel); break;
      case SenKind::Exists: st = 1; break;
      default: break;
    }
    for (const auto& t : s->terms) st = std::max(st, term(t));
    for (const auto& sub : s->subs) st = std::max(st, sentence(sub));
    return st;
  }
};

OracleVerdict search(const SigPtr& sig, const std::vector<Sentence>& gamma, const SearchBounds& bounds,
                     VerdictTag found_tag) {
  bounds.validate(*sig);
  Scope scope(sig);
  const int stages = 2 + static_cast<int>(sig->funs.size() + sig->rels.size());
  std::vector<std::vector<Compiled>> by_stage(static_cast<std::size_t>(stages));
  StageOf stage_of{*sig};
  for (const auto& s : gamma) by_stage[static_cast<std::size_t>(stage_of.sentence(s))].push_back(compile(scope, s));

  // masks[i]: worlds satisfying every sentence of stages < i.
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(stages) + 1, 0);
  OracleVerdict out;
  out.bounds = bounds;
  const KripkeStructure* cur = nullptr;

  auto filter = [&](int stage) {
    std::uint64_t mask = masks[static_cast<std::size_t>(stage)];
    for (const auto& c : by_stage[static_cast<std::size_t>(stage)]) {
      for (int w = 0; w < cur->num_worlds(); ++w)
        if ((mask >> w & 1U) && evaluate(*cur, w, *c) != Truth::True) mask &= ~(std::uint64_t{1} << w);
      if (!mask) break;
    }
    masks[static_cast<std::size_t>(stage) + 1] = mask;
    return mask != 0;
  };
  auto hook = [&](int stage) {
    if (stage == 0) {
      int W = cur->num_worlds();
      masks[0] = W >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << W) - 1;
    }
    return filter(stage);
  };
  auto leaf = [&]() {
    std::uint64_t mask = masks[static_cast<std::size_t>(stages)];
    int w = 0;
    while (!(mask >> w & 1U)) ++w;
    out.witness = PointedWitness{*cur, w};
    return true;
  };

  Enumerator e(sig, bounds, hook, leaf);
  cur = &e.model();
  e.run();
  out.nodes = e.nodes();
  if (out.witness) {
    for (const auto& s : gamma)
      if (!satisfies({&out.witness->model, out.witness->world}, s))
        throw InvalidModel("oracle witness fails re-verification");
    out.tag = found_tag;
  } else {
    out.tag = bounds.mode == SearchMode::Closed ? VerdictTag::ExhaustedComplete : VerdictTag::NoneWithinBounds;
  }
  return out;
}

}  // namespace

OracleVerdict find_model(const SigPtr& sig, const std::vector<Sentence>& gamma, const SearchBounds& bounds) {
  return search(sig, gamma, bounds, VerdictTag::Satisfiable);
}

OracleVerdict consistent(const SigPtr& sig, const std::vector<Sentence>& gamma, const SearchBounds& bounds) {
  return find_model(sig, gamma, bounds);
}

OracleVerdict entails(const SigPtr& sig, const std::vector<Sentence>& gamma, const Sentence& psi,
                      const SearchBounds& bounds) {
  std::vector<Sentence> g = gamma;
  g.push_back(sen::neg(psi));
  return search(sig, g, bounds, VerdictTag::Refuted);
}

OracleVerdict entails_at(const SigPtr& sig, const std::vector<Sentence>& gamma, const std::string& k,
                         const Sentence& psi, const SearchBounds& bounds) {
  Scope scope(sig);
  std::vector<Sentence> g = gamma;
  g.push_back(sen::neg(sen::at(scope, k, psi)));
  return search(sig, g, bounds, VerdictTag::Refuted);
}

std::size_t enumerate_models(const SigPtr& sig, const SearchBounds& bounds,
                             const std::function<bool(const KripkeStructure&)>& visit) {
  bounds.validate(*sig);
  std::size_t count = 0;
  const KripkeStructure* cur = nullptr;
  Enumerator e(
      sig, bounds, [](int) { return true; },
      [&]() {
        ++count;
        return !visit(*cur);
      });
  cur = &e.model();
  e.run();
  return count;
}

nlohmann::json to_json(const SearchBounds& b) {
  nlohmann::json j;
  j["maxWorlds"] = b.max_worlds;
  j["maxCarrier"] = b.max_carrier;
  j["carrier"] = b.carrier;
  j["termDepth"] = b.term_depth;
  j["budget"] = b.budget;
  j["mode"] = b.mode == SearchMode::Closed ? "closed" : "open";
  if (b.domain) j["domain"] = {{"worlds", b.domain->worlds}, {"carriers", b.domain->carriers}};
  return j;
}

nlohmann::json to_json(const OracleVerdict& v) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["tag"] = tag_name(v.tag);
  if (v.witness) j["witness"] = {{"model", to_json(v.witness->model)}, {"world", v.witness->model.worlds[v.witness->world]}};
  j["boundsUsed"] = to_json(v.bounds);
  j["nodesVisited"] = v.nodes;
  return j;
}

}  // namespace hwb
