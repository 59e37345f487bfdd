#include <algorithm>
#include <map>
#include <numeric>

#include "hwb/kripke.hpp"

namespace hwb {

namespace {

// Every flexible symbol in t carries an explicit world tag.
bool fully_tagged(const Scope& scope, const Term& t) {
  if (!t->at && !scope.is_rigid_fun(t->fun)) return false;
  return std::all_of(t->args.begin(), t->args.end(), [&](const Term& a) { return fully_tagged(scope, a); });
}

struct Loc {
  int sort, slot, idx;
};

struct Universe {
  TermModel tm;
  std::map<std::string, Loc> where;  // term key -> element
};

Universe build_universe(const SigPtr& sig, int depth) {
  Universe u;
  Scope scope(sig);
  auto& m = u.tm.model;
  m = blank_model(sig, static_cast<int>(sig->nominals.size()));
  m.worlds = sig->nominals;
  for (size_t k = 0; k < sig->nominals.size(); ++k) m.nom_val[k] = static_cast<int>(k);
  u.tm.terms.resize(sig->sorts.size());
  for (size_t s = 0; s < sig->sorts.size(); ++s) u.tm.terms[s].resize(m.carriers[s].size());

  for (const auto& t : ground_terms(scope, depth)) {
    if (!fully_tagged(scope, t)) continue;
    HybridSort hs = sort_of(t, scope);
    int s = sig->sort_index(hs.sort);
    int slot = sig->sort_rigid[s] ? 0 : sig->nominal_index(*hs.at);
    auto& terms = u.tm.terms[s][slot];
    u.where[t->key] = {s, slot, static_cast<int>(terms.size())};
    terms.push_back(t);
    m.carriers[s][slot].push_back(show(t));
  }
  resize_tables(m);

  for (size_t f = 0; f < sig->funs.size(); ++f) {
    const auto& fs = sig->funs[f];
    const auto& ar = sig->fun_arg_sorts[f];
    for (size_t slot = 0; slot < m.fun_tab[f].size(); ++slot) {
      int w = static_cast<int>(slot);
      std::optional<std::string> tag;
      if (!sig->fun_rigid[f]) tag = sig->nominals[w];
      auto& tab = m.fun_tab[f][slot];
      std::vector<int> idx(ar.size(), 0);
      for (std::size_t n = 0; n < tab.size(); ++n) {
        std::vector<Term> args;
        for (size_t i = 0; i < ar.size(); ++i) args.push_back(u.tm.terms[ar[i]][m.sort_slot(ar[i], w)][idx[i]]);
        Term app = make_app(scope, fs, std::move(args), tag);
        auto it = u.where.find(app->key);
        if (it != u.where.end()) {
          tab[m.index(ar, w, idx.data())] = it->second.idx;
        } else {
          tab[m.index(ar, w, idx.data())] = kSentinel;
          m.partial = true;
        }
        for (size_t i = 0; i < idx.size(); ++i) {
          if (++idx[i] < m.size(ar[i], w)) break;
          idx[i] = 0;
        }
      }
    }
  }
  return u;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Keeps the smaller representative.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

TermModel term_model(const SigPtr& sig, int depth) {
  if (depth < 0) throw PreconditionFailed("term_model needs a nonnegative depth bound");
  return build_universe(sig, depth).tm;
}

BasicModel basic_model(const SigPtr& sig, const std::vector<Sentence>& psi, int depth) {
  if (depth < 0) throw PreconditionFailed("basic_model needs a nonnegative depth bound");
  Universe u = build_universe(sig, depth);
  const auto& tm = u.tm.model;
  Scope scope(sig);

  // Global element ids.
  std::vector<Loc> elems;
  std::vector<std::vector<std::vector<int>>> gid(sig->sorts.size());
  for (size_t s = 0; s < sig->sorts.size(); ++s)
    for (size_t slot = 0; slot < tm.carriers[s].size(); ++slot) {
      gid[s].emplace_back();
      for (size_t e = 0; e < tm.carriers[s][slot].size(); ++e) {
        gid[s][slot].push_back(static_cast<int>(elems.size()));
        elems.push_back({static_cast<int>(s), static_cast<int>(slot), static_cast<int>(e)});
      }
    }
  auto gid_of = [&](const Loc& l) { return gid[l.sort][l.slot][l.idx]; };
  auto locate = [&](const Term& t) -> int {
    auto it = u.where.find(t->key);
    if (it == u.where.end()) throw BoundTooSmall("term " + show(t) + " exceeds the depth bound " + std::to_string(depth));
    return gid_of(it->second);
  };

  int W = tm.num_worlds();
  UnionFind ew(static_cast<int>(elems.size())), ww(W);
  struct RelFact {
    int rel, world;
    std::vector<int> args;
  };
  std::vector<RelFact> rel_facts;
  std::vector<std::tuple<int, int, int>> edges;

  for (const auto& p : psi) {
    if (p->kind != SenKind::At) throw PreconditionFailed("basic_model: member is not of the form @k phi");
    const std::string& k = p->name;
    int kw = sig->nominal_index(k);
    if (kw < 0) throw PreconditionFailed("basic_model: unknown nominal " + k);
    const auto& b = p->subs[0];
    switch (b->kind) {
      case SenKind::Nominal: ww.unite(kw, sig->nominal_index(b->name)); break;
      case SenKind::Eq:
        ew.unite(locate(anchor(scope, b->terms[0], k)), locate(anchor(scope, b->terms[1], k)));
        break;
      case SenKind::Rel: {
        int r = sig->rel_index(b->rel);
        std::string at = b->rel_at ? *b->rel_at : k;
        RelFact fact{r, sig->nominal_index(at), {}};
        for (const auto& t : b->terms) fact.args.push_back(locate(anchor(scope, t, at)));
        rel_facts.push_back(std::move(fact));
        break;
      }
      case SenKind::Diamond: {
        const auto& inner = b->subs[0];
        int l = sig->modality_index(b->name);
        if (inner->kind != SenKind::Nominal || sig->modalities[l].rank != 2)
          throw PreconditionFailed("basic_model: diamond must be binary and point at a nominal");
        edges.emplace_back(l, kw, sig->nominal_index(inner->name));
        break;
      }
      default: throw PreconditionFailed("basic_model: member does not classify as a basic sentence");
    }
  }

  // Congruence closure over applications in the universe.
  struct App {
    int fun, world, result;
    std::vector<int> args;
  };
  std::vector<App> apps;
  for (size_t f = 0; f < sig->funs.size(); ++f) {
    const auto& ar = sig->fun_arg_sorts[f];
    for (size_t slot = 0; slot < tm.fun_tab[f].size(); ++slot) {
      int w = static_cast<int>(slot);
      const auto& tab = tm.fun_tab[f][slot];
      std::vector<int> idx(ar.size(), 0);
      for (std::size_t n = 0; n < tab.size(); ++n) {
        int r = tab[tm.index(ar, w, idx.data())];
        if (r >= 0) {
          App a{static_cast<int>(f), sig->fun_rigid[f] ? -1 : w,
                gid[sig->fun_result_sort[f]][tm.sort_slot(sig->fun_result_sort[f], w)][r], {}};
          for (size_t i = 0; i < ar.size(); ++i) a.args.push_back(gid[ar[i]][tm.sort_slot(ar[i], w)][idx[i]]);
          apps.push_back(std::move(a));
        }
        for (size_t i = 0; i < idx.size(); ++i) {
          if (++idx[i] < tm.size(ar[i], w)) break;
          idx[i] = 0;
        }
      }
    }
  }
  using AppKey = std::tuple<int, int, std::vector<int>>;
  std::map<AppKey, int> table;
  bool changed = true;
  while (changed) {
    changed = false;
    table.clear();
    for (const auto& a : apps) {
      AppKey key{a.fun, a.world < 0 ? -1 : ww.find(a.world), {}};
      for (int x : a.args) std::get<2>(key).push_back(ew.find(x));
      auto [it, fresh] = table.emplace(key, ew.find(a.result));
      if (!fresh && ew.unite(it->second, a.result)) changed = true;
    }
  }

  // Quotient.
  BasicModel out;
  auto& m = out.model;
  m.sig = sig;
  std::vector<int> wclass(W, -1);
  for (int w = 0; w < W; ++w)
    if (ww.find(w) == w) {
      wclass[w] = static_cast<int>(m.worlds.size());
      m.worlds.push_back(tm.worlds[w]);
    }
  for (int w = 0; w < W; ++w) wclass[w] = wclass[ww.find(w)];
  int Wq = m.num_worlds();
  for (int w = 0; w < W; ++w) m.nom_val.push_back(wclass[w]);

  // Element classes per (sort, quotient slot).
  std::vector<int> cls_idx(elems.size(), -1);
  m.carriers.resize(sig->sorts.size());
  std::vector<std::vector<std::vector<int>>> rep(sig->sorts.size());  // representative gid per class
  for (size_t s = 0; s < sig->sorts.size(); ++s) {
    int slots = sig->sort_rigid[s] ? 1 : Wq;
    m.carriers[s].resize(slots);
    rep[s].resize(slots);
  }
  for (size_t g = 0; g < elems.size(); ++g) {
    int root = ew.find(static_cast<int>(g));
    const Loc& l = elems[g];
    int qslot = sig->sort_rigid[l.sort] ? 0 : wclass[l.slot];
    if (cls_idx[root] < 0) {
      cls_idx[root] = static_cast<int>(m.carriers[l.sort][qslot].size());
      const Loc& rl = elems[root];
      m.carriers[l.sort][qslot].push_back(tm.carriers[rl.sort][rl.slot][rl.idx]);
      rep[l.sort][qslot].push_back(root);
    }
    cls_idx[g] = cls_idx[root];
    out.congruence.emplace_back(tm.carriers[l.sort][l.slot][l.idx], m.carriers[l.sort][qslot][cls_idx[root]]);
  }
  for (const auto& l : sig->modalities) {
    std::size_t n = 1;
    for (int i = 0; i < l.rank; ++i) n *= static_cast<std::size_t>(Wq);
    m.mod_rel.emplace_back(n, 0);
  }
  for (auto [l, a, b] : edges) m.mod_rel[l][static_cast<std::size_t>(wclass[a]) * Wq + wclass[b]] = 1;
  m.fun_tab.resize(sig->funs.size());
  m.rel_tab.resize(sig->rels.size());
  for (size_t f = 0; f < sig->funs.size(); ++f) m.fun_tab[f].resize(sig->fun_rigid[f] ? 1 : Wq);
  for (size_t r = 0; r < sig->rels.size(); ++r) m.rel_tab[r].resize(sig->rel_rigid[r] ? 1 : Wq);
  resize_tables(m);

  std::vector<int> world_rep(Wq);
  for (int w = W - 1; w >= 0; --w) world_rep[wclass[w]] = w;
  for (size_t f = 0; f < sig->funs.size(); ++f) {
    const auto& ar = sig->fun_arg_sorts[f];
    for (size_t slot = 0; slot < m.fun_tab[f].size(); ++slot) {
      int qw = static_cast<int>(slot);
      auto& tab = m.fun_tab[f][slot];
      std::vector<int> idx(ar.size(), 0);
      for (std::size_t n = 0; n < tab.size(); ++n) {
        AppKey key{static_cast<int>(f), sig->fun_rigid[f] ? -1 : ww.find(world_rep[qw]), {}};
        for (size_t i = 0; i < ar.size(); ++i) std::get<2>(key).push_back(rep[ar[i]][m.sort_slot(ar[i], qw)][idx[i]]);
        auto it = table.find(key);
        std::size_t at = m.index(ar, qw, idx.data());
        if (it == table.end()) {
          tab[at] = kSentinel;
          m.partial = true;
        } else {
          tab[at] = cls_idx[it->second];
        }
        for (size_t i = 0; i < idx.size(); ++i) {
          if (++idx[i] < m.size(ar[i], qw)) break;
          idx[i] = 0;
        }
      }
    }
  }
  for (const auto& fact : rel_facts) {
    int qw = wclass[fact.world];
    std::vector<int> args;
    for (int g : fact.args) args.push_back(cls_idx[g]);
    m.rel_tab[fact.rel][m.rel_slot(fact.rel, qw)][m.index(sig->rel_arg_sorts[fact.rel], qw, args.data())] = 1;
  }

  validate_model(m);
  for (const auto& p : psi) {
    Truth t = Wq > 0 ? truth({&m, 0}, p) : Truth::True;
    if (t == Truth::False) throw PreconditionFailed("basic model fails an input sentence");
  }
  return out;
}

}  // namespace hwb
