#include <algorithm>
#include <functional>
#include <map>

#include "hwb/kripke.hpp"

namespace hwb {

namespace {

// Calls fn on every tuple drawn from choices[0] x choices[1] x ...
template <class Fn>
void for_each_tuple(const std::vector<std::vector<int>>& choices, Fn&& fn) {
  std::vector<int> tup(choices.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == choices.size()) {
      fn(tup);
      return;
    }
    for (int x : choices[i]) {
      tup[i] = x;
      rec(i + 1);
    }
  };
  for (const auto& c : choices)
    if (c.empty()) return;
  rec(0);
}

std::vector<int> kept_list(const std::vector<char>& mask) {
  std::vector<int> out;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> range(int n) {
  std::vector<int> out(static_cast<size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

// Least sets closed under function application at the seeded worlds.
Mask closure(const KripkeStructure& m, const std::vector<char>& world_seed, bool seed_rigid) {
  const auto& sig = *m.sig;
  Mask kept(sig.sorts.size());
  for (size_t s = 0; s < sig.sorts.size(); ++s)
    for (const auto& c : m.carriers[s]) kept[s].emplace_back(c.size(), sig.sort_rigid[s] && seed_rigid ? 1 : 0);
  int W = m.num_worlds();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t f = 0; f < sig.funs.size(); ++f) {
      const auto& ar = sig.fun_arg_sorts[f];
      int res = sig.fun_result_sort[f];
      std::vector<int> worlds;
      if (sig.fun_rigid[f]) worlds.push_back(0);
      else
        for (int w = 0; w < W; ++w)
          if (world_seed[w]) worlds.push_back(w);
      for (int w : worlds) {
        std::vector<std::vector<int>> choices;
        for (int s : ar) choices.push_back(kept_list(kept[s][m.sort_slot(s, w)]));
        auto& out = kept[res][m.sort_slot(res, w)];
        for_each_tuple(choices, [&](const std::vector<int>& t) {
          int v = m.apply(static_cast<int>(f), w, t.data());
          if (v >= 0 && !out[v]) {
            out[v] = 1;
            changed = true;
          }
        });
      }
    }
  }
  return kept;
}

struct FrameSearch {
  const KripkeStructure& a;
  const KripkeStructure& b;
  bool bijective;
  std::vector<int> forced;
  std::vector<int> frame;
  std::vector<char> used;

  FrameSearch(const KripkeStructure& a_, const KripkeStructure& b_, bool bij, std::optional<std::pair<int, int>> point)
      : a(a_), b(b_), bijective(bij) {
    int Wa = a.num_worlds();
    forced.assign(Wa, -1);
    bool ok = true;
    for (size_t k = 0; k < a.nom_val.size(); ++k) {
      int& slot = forced[a.nom_val[k]];
      if (slot >= 0 && slot != b.nom_val[k]) ok = false;
      slot = b.nom_val[k];
    }
    if (point) {
      int& slot = forced[point->first];
      if (slot >= 0 && slot != point->second) ok = false;
      slot = point->second;
    }
    if (bij) {
      std::vector<int> seen(b.num_worlds(), -1);
      for (int w = 0; w < Wa; ++w)
        if (forced[w] >= 0) {
          if (seen[forced[w]] >= 0) ok = false;
          seen[forced[w]] = w;
        }
      if (Wa != b.num_worlds()) ok = false;
    }
    if (!ok) forced.clear();
  }

  bool edge_ok(int l, int x, int y) const {
    bool ea = a.edge(l, x, y), eb = b.edge(l, frame[x], frame[y]);
    return bijective ? ea == eb : (!ea || eb);
  }

  bool full_ok() const {
    const auto& sig = *a.sig;
    int W = a.num_worlds();
    for (size_t l = 0; l < sig.modalities.size(); ++l) {
      int r = sig.modalities[l].rank;
      if (r == 2) continue;
      std::vector<std::vector<int>> choices(r, range(W));
      bool ok = true;
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        if (!ok) return;
        std::size_t ia = 0, ib = 0, sa = 1, sb = 1;
        for (int i = r - 1; i >= 0; --i) {
          ia += t[i] * sa;
          ib += frame[t[i]] * sb;
          sa *= W;
          sb *= b.num_worlds();
        }
        bool ea = a.mod_rel[l][ia] != 0, eb = b.mod_rel[l][ib] != 0;
        if (bijective ? ea != eb : (ea && !eb)) ok = false;
      });
      if (!ok) return false;
    }
    return true;
  }

  // Calls fn on each admissible frame map until fn returns true.
  bool run(const std::function<bool(const std::vector<int>&)>& fn) {
    if (forced.empty() && a.num_worlds() > 0) return false;
    if (bijective && a.num_worlds() != b.num_worlds()) return false;
    frame.assign(a.num_worlds(), -1);
    used.assign(b.num_worlds(), 0);
    return rec(0, fn);
  }

  bool rec(int i, const std::function<bool(const std::vector<int>&)>& fn) {
    int W = a.num_worlds();
    if (i == W) return full_ok() && fn(frame);
    std::vector<int> cands = forced[i] >= 0 ? std::vector<int>{forced[i]} : range(b.num_worlds());
    for (int v : cands) {
      if (bijective && used[v]) continue;
      if (bijective && forced[i] < 0 && std::find(forced.begin(), forced.end(), v) != forced.end()) continue;
      frame[i] = v;
      bool ok = true;
      for (size_t l = 0; l < a.sig->modalities.size() && ok; ++l) {
        if (a.sig->modalities[l].rank != 2) continue;
        for (int j = 0; j <= i && ok; ++j) ok = edge_ok(static_cast<int>(l), i, j) && edge_ok(static_cast<int>(l), j, i);
      }
      if (!ok) continue;
      used[v] = 1;
      bool stop = rec(i + 1, fn);
      used[v] = 0;
      if (stop) return true;
    }
    frame[i] = -1;
    return false;
  }
};

// Backtracking over element maps for a fixed frame map.
struct ElementSearch {
  struct Var {
    int s, slot, e;
  };
  struct Con {
    bool fun;
    int sym;
    int wa;
    std::vector<int> args;  // var ids
    int res;                // var id (functions) or truth in a (relations)
  };

  const KripkeStructure& a;
  const KripkeStructure& b;
  const std::vector<int>& frame;
  bool iso;
  std::vector<Var> vars;
  std::vector<std::vector<std::vector<int>>> vid;
  std::vector<std::vector<int>> domain;
  std::vector<std::vector<Con>> at_var;
  std::vector<int> val;
  std::map<std::pair<int, int>, std::vector<char>> used;  // (sort, b slot) -> used elements
  std::size_t* nodes = nullptr;
  std::size_t budget = 0;

  ElementSearch(const KripkeStructure& a_, const KripkeStructure& b_, const std::vector<int>& fr, bool is_iso)
      : a(a_), b(b_), frame(fr), iso(is_iso) {}

  int b_world(int wa) const { return frame.empty() ? 0 : frame[wa]; }

  // Registers the elements of `include` (by mask) as variables.
  bool setup(const Mask& include_a, const Mask& range_b) {
    const auto& sig = *a.sig;
    vid.resize(sig.sorts.size());
    for (size_t s = 0; s < sig.sorts.size(); ++s) {
      vid[s].resize(a.carriers[s].size());
      for (size_t slot = 0; slot < a.carriers[s].size(); ++slot) {
        vid[s][slot].assign(a.carriers[s][slot].size(), -1);
        int bslot = b.sort_slot(static_cast<int>(s), b_world(static_cast<int>(slot)));
        std::vector<int> dom = kept_list(range_b[s][bslot]);
        for (size_t e = 0; e < a.carriers[s][slot].size(); ++e) {
          if (!include_a[s][slot][e]) continue;
          if (dom.empty()) return false;
          vid[s][slot][e] = static_cast<int>(vars.size());
          vars.push_back({static_cast<int>(s), static_cast<int>(slot), static_cast<int>(e)});
          domain.push_back(dom);
        }
      }
    }
    at_var.resize(vars.size());
    val.assign(vars.size(), -1);
    int W = a.num_worlds();
    for (size_t f = 0; f < sig.funs.size(); ++f) {
      const auto& ar = sig.fun_arg_sorts[f];
      int res = sig.fun_result_sort[f];
      std::vector<int> worlds = sig.fun_rigid[f] ? std::vector<int>{0} : range(W);
      for (int w : worlds) {
        std::vector<std::vector<int>> choices;
        for (int s : ar) choices.push_back(range(a.size(s, w)));
        for_each_tuple(choices, [&](const std::vector<int>& t) {
          int r = a.apply(static_cast<int>(f), w, t.data());
          if (r < 0) return;
          Con c{true, static_cast<int>(f), w, {}, vid[res][a.sort_slot(res, w)][r]};
          if (c.res < 0) return;
          for (size_t i = 0; i < t.size(); ++i) {
            int v = vid[ar[i]][a.sort_slot(ar[i], w)][t[i]];
            if (v < 0) return;
            c.args.push_back(v);
          }
          attach(std::move(c));
        });
      }
    }
    for (size_t r = 0; r < sig.rels.size(); ++r) {
      const auto& ar = sig.rel_arg_sorts[r];
      std::vector<int> worlds = sig.rel_rigid[r] ? std::vector<int>{0} : range(W);
      for (int w : worlds) {
        std::vector<std::vector<int>> choices;
        for (int s : ar) choices.push_back(range(a.size(s, w)));
        for_each_tuple(choices, [&](const std::vector<int>& t) {
          bool ha = a.holds(static_cast<int>(r), w, t.data());
          if (!ha && !iso) return;
          Con c{false, static_cast<int>(r), w, {}, ha ? 1 : 0};
          for (size_t i = 0; i < t.size(); ++i) {
            int v = vid[ar[i]][a.sort_slot(ar[i], w)][t[i]];
            if (v < 0) return;
            c.args.push_back(v);
          }
          if (c.args.empty()) {
            ground.push_back(std::move(c));
            return;
          }
          attach(std::move(c));
        });
      }
    }
    for (const auto& c : ground)
      if (!check(c)) return false;
    return true;
  }

  std::vector<Con> ground;

  void attach(Con c) {
    int last = c.fun ? c.res : -1;
    for (int v : c.args) last = std::max(last, v);
    at_var[last].push_back(std::move(c));
  }

  bool check(const Con& c) const {
    int buf[16];
    std::vector<int> big;
    int* args = buf;
    if (c.args.size() > 16) {
      big.resize(c.args.size());
      args = big.data();
    }
    for (size_t i = 0; i < c.args.size(); ++i) args[i] = val[c.args[i]];
    int wb = b_world(c.wa);
    if (c.fun) {
      if (a.sig->fun_rigid[c.sym]) wb = 0;
      return b.apply(c.sym, wb, args) == val[c.res];
    }
    if (a.sig->rel_rigid[c.sym]) wb = 0;
    bool hb = b.holds(c.sym, wb, args);
    return iso ? hb == (c.res != 0) : (c.res == 0 || hb);
  }

  std::vector<char>& used_for(int i) {
    const auto& v = vars[i];
    int bslot = b.sort_slot(v.s, b_world(v.slot));
    auto& u = used[{v.s, bslot}];
    if (u.empty()) u.assign(b.carriers[v.s][bslot].size() + 1, 0);
    return u;
  }

  // Calls fn at each complete assignment until it returns true.
  bool run(size_t i, const std::function<bool()>& fn) {
    if (nodes && budget && ++*nodes > budget) throw BudgetExceeded("homomorphism search budget exhausted");
    if (i == vars.size()) return fn();
    for (int x : domain[i]) {
      if (iso && used_for(static_cast<int>(i))[x]) continue;
      val[i] = x;
      bool ok = true;
      for (const auto& c : at_var[i])
        if (!check(c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (iso) used_for(static_cast<int>(i))[x] = 1;
      bool stop = run(i + 1, fn);
      if (iso) used_for(static_cast<int>(i))[x] = 0;
      if (stop) return true;
    }
    val[i] = -1;
    return false;
  }

  ModelMorphism morphism() const {
    ModelMorphism h;
    h.frame = frame;
    for (size_t s = 0; s < vid.size(); ++s) {
      h.elems.emplace_back();
      for (const auto& slot : vid[s]) {
        h.elems[s].emplace_back();
        for (int v : slot) h.elems[s].back().push_back(v < 0 ? kUndef : val[v]);
      }
    }
    return h;
  }
};

Mask full_mask(const KripkeStructure& m) {
  Mask k;
  for (const auto& sort : m.carriers) {
    k.emplace_back();
    for (const auto& c : sort) k.back().emplace_back(c.size(), 1);
  }
  return k;
}

void require_same_sig(const KripkeStructure& a, const KripkeStructure& b) {
  if (a.sig->fingerprint != b.sig->fingerprint) throw PreconditionFailed("models are over different signatures");
}

}  // namespace

bool is_homomorphism(const KripkeStructure& a, const KripkeStructure& b, const ModelMorphism& h) {
  require_same_sig(a, b);
  const auto& sig = *a.sig;
  int Wa = a.num_worlds();
  if (static_cast<int>(h.frame.size()) != Wa || h.elems.size() != sig.sorts.size()) return false;
  for (int w : h.frame)
    if (w < 0 || w >= b.num_worlds()) return false;
  for (size_t k = 0; k < sig.nominals.size(); ++k)
    if (h.frame[a.nom_val[k]] != b.nom_val[k]) return false;
  FrameSearch fs(a, b, false, std::nullopt);
  fs.frame = h.frame;
  for (size_t l = 0; l < sig.modalities.size(); ++l)
    if (sig.modalities[l].rank == 2)
      for (int x = 0; x < Wa; ++x)
        for (int y = 0; y < Wa; ++y)
          if (!fs.edge_ok(static_cast<int>(l), x, y)) return false;
  if (!fs.full_ok()) return false;
  auto map = [&](int s, int w, int e) -> int {
    const auto& slot = h.elems[s][a.sort_slot(s, w)];
    return e >= 0 && e < static_cast<int>(slot.size()) ? slot[e] : kUndef;
  };
  for (size_t s = 0; s < sig.sorts.size(); ++s) {
    if (h.elems[s].size() != a.carriers[s].size()) return false;
    for (size_t slot = 0; slot < a.carriers[s].size(); ++slot) {
      if (h.elems[s][slot].size() != a.carriers[s][slot].size()) return false;
      int wb = sig.sort_rigid[s] ? 0 : h.frame[slot];
      for (int x : h.elems[s][slot])
        if (x != kUndef && (x < 0 || x >= b.size(static_cast<int>(s), wb))) return false;
    }
  }
  for (size_t f = 0; f < sig.funs.size(); ++f) {
    const auto& ar = sig.fun_arg_sorts[f];
    int res = sig.fun_result_sort[f];
    std::vector<int> worlds = sig.fun_rigid[f] ? std::vector<int>{0} : range(Wa);
    bool ok = true;
    for (int w : worlds) {
      int wb = sig.fun_rigid[f] ? 0 : h.frame[w];
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(range(a.size(s, w)));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        if (!ok) return;
        int r = a.apply(static_cast<int>(f), w, t.data());
        if (r < 0) return;
        std::vector<int> bt;
        for (size_t i = 0; i < t.size(); ++i) {
          int x = map(ar[i], w, t[i]);
          if (x == kUndef) return;
          bt.push_back(x);
        }
        int hr = map(res, w, r);
        if (hr == kUndef) return;
        if (b.apply(static_cast<int>(f), wb, bt.data()) != hr) ok = false;
      });
    }
    if (!ok) return false;
  }
  for (size_t r = 0; r < sig.rels.size(); ++r) {
    const auto& ar = sig.rel_arg_sorts[r];
    std::vector<int> worlds = sig.rel_rigid[r] ? std::vector<int>{0} : range(Wa);
    bool ok = true;
    for (int w : worlds) {
      int wb = sig.rel_rigid[r] ? 0 : h.frame[w];
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(range(a.size(s, w)));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        if (!ok || !a.holds(static_cast<int>(r), w, t.data())) return;
        std::vector<int> bt;
        for (size_t i = 0; i < t.size(); ++i) {
          int x = map(ar[i], w, t[i]);
          if (x == kUndef) return;
          bt.push_back(x);
        }
        if (!b.holds(static_cast<int>(r), wb, bt.data())) ok = false;
      });
    }
    if (!ok) return false;
  }
  return true;
}

std::optional<ModelMorphism> find_homomorphism(const KripkeStructure& a, const KripkeStructure& b, std::size_t budget) {
  require_same_sig(a, b);
  std::optional<ModelMorphism> out;
  FrameSearch fs(a, b, false, std::nullopt);
  std::size_t nodes = 0;
  Mask ia = full_mask(a), rb = full_mask(b);
  fs.run([&](const std::vector<int>& frame) {
    ElementSearch es(a, b, frame, false);
    es.nodes = &nodes;
    es.budget = budget;
    if (!es.setup(ia, rb)) return false;
    return es.run(0, [&] {
      out = es.morphism();
      return true;
    });
  });
  return out;
}

std::size_t count_homomorphisms(const KripkeStructure& a, const KripkeStructure& b, std::size_t cap) {
  require_same_sig(a, b);
  std::size_t count = 0;
  FrameSearch fs(a, b, false, std::nullopt);
  Mask ia = full_mask(a), rb = full_mask(b);
  fs.run([&](const std::vector<int>& frame) {
    ElementSearch es(a, b, frame, false);
    if (!es.setup(ia, rb)) return false;
    return es.run(0, [&] { return ++count >= cap; });
  });
  return count;
}

Mask generated_mask(const KripkeStructure& m) {
  if (m.num_worlds() == 0) throw EmptyFrame("generated submodel needs a nonempty frame");
  return closure(m, std::vector<char>(m.num_worlds(), 1), true);
}

GeneratedSubmodel generated_submodel(const KripkeStructure& m) {
  GeneratedSubmodel g;
  g.kept = generated_mask(m);
  const auto& sig = *m.sig;
  auto& r = g.model;
  r.sig = m.sig;
  r.worlds = m.worlds;
  r.nom_val = m.nom_val;
  r.mod_rel = m.mod_rel;
  r.partial = m.partial;
  g.inclusion.frame = range(m.num_worlds());
  std::vector<std::vector<std::vector<int>>> reindex(sig.sorts.size());
  for (size_t s = 0; s < sig.sorts.size(); ++s) {
    r.carriers.emplace_back();
    g.inclusion.elems.emplace_back();
    for (size_t slot = 0; slot < m.carriers[s].size(); ++slot) {
      std::vector<int> idx(m.carriers[s][slot].size(), kUndef);
      std::vector<std::string> labels;
      std::vector<int> incl;
      for (size_t e = 0; e < idx.size(); ++e)
        if (g.kept[s][slot][e]) {
          idx[e] = static_cast<int>(labels.size());
          labels.push_back(m.carriers[s][slot][e]);
          incl.push_back(static_cast<int>(e));
        }
      r.carriers[s].push_back(std::move(labels));
      g.inclusion.elems[s].push_back(std::move(incl));
      reindex[s].push_back(std::move(idx));
    }
  }
  for (size_t f = 0; f < sig.funs.size(); ++f) {
    r.fun_tab.emplace_back();
    const auto& ar = sig.fun_arg_sorts[f];
    int res = sig.fun_result_sort[f];
    for (size_t slot = 0; slot < m.fun_tab[f].size(); ++slot) {
      int w = static_cast<int>(slot);
      std::vector<int> tab(r.domain_size(ar, w), kUndef);
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(range(r.size(s, w)));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        std::vector<int> orig;
        for (size_t i = 0; i < t.size(); ++i) orig.push_back(g.inclusion.elems[ar[i]][r.sort_slot(ar[i], w)][t[i]]);
        int v = m.apply(static_cast<int>(f), w, orig.data());
        tab[r.index(ar, w, t.data())] = v < 0 ? v : reindex[res][m.sort_slot(res, w)][v];
      });
      r.fun_tab[f].push_back(std::move(tab));
    }
  }
  for (size_t q = 0; q < sig.rels.size(); ++q) {
    r.rel_tab.emplace_back();
    const auto& ar = sig.rel_arg_sorts[q];
    for (size_t slot = 0; slot < m.rel_tab[q].size(); ++slot) {
      int w = static_cast<int>(slot);
      std::vector<char> tab(r.domain_size(ar, w), 0);
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(range(r.size(s, w)));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        std::vector<int> orig;
        for (size_t i = 0; i < t.size(); ++i) orig.push_back(g.inclusion.elems[ar[i]][r.sort_slot(ar[i], w)][t[i]]);
        tab[r.index(ar, w, t.data())] = m.holds(static_cast<int>(q), w, orig.data()) ? 1 : 0;
      });
      r.rel_tab[q].push_back(std::move(tab));
    }
  }
  return g;
}

std::optional<std::string> check_generated_iso(const KripkeStructure& a, const KripkeStructure& b,
                                               const ModelMorphism& h) {
  require_same_sig(a, b);
  const auto& sig = *a.sig;
  Mask ka = generated_mask(a), kb = generated_mask(b);
  int W = a.num_worlds();
  if (W != b.num_worlds() || static_cast<int>(h.frame.size()) != W) return "frame sizes differ";
  {
    std::vector<char> seen(W, 0);
    for (int w : h.frame) {
      if (w < 0 || w >= W || seen[w]) return std::string("frame map is not a bijection");
      seen[w] = 1;
    }
  }
  for (size_t k = 0; k < sig.nominals.size(); ++k)
    if (h.frame[a.nom_val[k]] != b.nom_val[k]) return "nominal " + sig.nominals[k] + " not preserved";
  FrameSearch fs(a, b, true, std::nullopt);
  fs.frame = h.frame;
  for (size_t l = 0; l < sig.modalities.size(); ++l)
    if (sig.modalities[l].rank == 2)
      for (int x = 0; x < W; ++x)
        for (int y = 0; y < W; ++y)
          if (!fs.edge_ok(static_cast<int>(l), x, y)) return "modality " + sig.modalities[l].name + " not preserved";
  if (!fs.full_ok()) return std::string("a unary modality is not preserved");
  if (h.elems.size() != sig.sorts.size()) return std::string("element map has wrong shape");
  for (size_t s = 0; s < sig.sorts.size(); ++s) {
    if (h.elems[s].size() != a.carriers[s].size()) return "element map of " + sig.sorts[s] + " has wrong shape";
    for (size_t slot = 0; slot < a.carriers[s].size(); ++slot) {
      int bslot = sig.sort_rigid[s] ? 0 : h.frame[slot];
      const auto& map = h.elems[s][slot];
      if (map.size() != a.carriers[s][slot].size()) return "element map of " + sig.sorts[s] + " has wrong shape";
      std::vector<char> hit(b.carriers[s][bslot].size(), 0);
      int count = 0;
      for (size_t e = 0; e < map.size(); ++e) {
        if (!ka[s][slot][e]) continue;
        int x = map[e];
        if (x < 0 || x >= static_cast<int>(hit.size()) || !kb[s][bslot][x])
          return "element " + a.carriers[s][slot][e] + " of " + sig.sorts[s] + " maps outside the generated part";
        if (hit[x]) return "element map of " + sig.sorts[s] + " is not injective";
        hit[x] = 1;
        ++count;
      }
      int kept_b = static_cast<int>(std::count(kb[s][bslot].begin(), kb[s][bslot].end(), 1));
      if (count != kept_b) return "element map of " + sig.sorts[s] + " is not surjective";
    }
  }
  std::optional<std::string> err;
  for (size_t f = 0; f < sig.funs.size() && !err; ++f) {
    const auto& ar = sig.fun_arg_sorts[f];
    int res = sig.fun_result_sort[f];
    std::vector<int> worlds = sig.fun_rigid[f] ? std::vector<int>{0} : range(W);
    for (int w : worlds) {
      int wb = sig.fun_rigid[f] ? 0 : h.frame[w];
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(kept_list(ka[s][a.sort_slot(s, w)]));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        if (err) return;
        std::vector<int> bt;
        for (size_t i = 0; i < t.size(); ++i) bt.push_back(h.elems[ar[i]][a.sort_slot(ar[i], w)][t[i]]);
        int ra = a.apply(static_cast<int>(f), w, t.data());
        int rb = b.apply(static_cast<int>(f), wb, bt.data());
        int hra = ra < 0 ? ra : h.elems[res][a.sort_slot(res, w)][ra];
        if (hra != rb) err = "op " + sig.funs[f].str() + " not preserved at " + a.worlds[w];
      });
    }
  }
  for (size_t r = 0; r < sig.rels.size() && !err; ++r) {
    const auto& ar = sig.rel_arg_sorts[r];
    std::vector<int> worlds = sig.rel_rigid[r] ? std::vector<int>{0} : range(W);
    for (int w : worlds) {
      int wb = sig.rel_rigid[r] ? 0 : h.frame[w];
      std::vector<std::vector<int>> choices;
      for (int s : ar) choices.push_back(kept_list(ka[s][a.sort_slot(s, w)]));
      for_each_tuple(choices, [&](const std::vector<int>& t) {
        if (err) return;
        std::vector<int> bt;
        for (size_t i = 0; i < t.size(); ++i) bt.push_back(h.elems[ar[i]][a.sort_slot(ar[i], w)][t[i]]);
        if (a.holds(static_cast<int>(r), w, t.data()) != b.holds(static_cast<int>(r), wb, bt.data()))
          err = "rel " + sig.rels[r].str() + " not preserved at " + a.worlds[w];
      });
    }
  }
  return err;
}

std::optional<ModelMorphism> quasi_isomorphic(const KripkeStructure& a, const KripkeStructure& b,
                                              std::optional<std::pair<int, int>> point) {
  require_same_sig(a, b);
  if (a.num_worlds() == 0 || b.num_worlds() == 0) throw EmptyFrame("quasi-isomorphism needs nonempty frames");
  if (a.num_worlds() != b.num_worlds()) return std::nullopt;
  const auto& sig = *a.sig;
  Mask ka = generated_mask(a), kb = generated_mask(b);
  auto count = [](const std::vector<char>& v) { return std::count(v.begin(), v.end(), 1); };
  for (size_t s = 0; s < sig.sorts.size(); ++s)
    if (sig.sort_rigid[s] && count(ka[s][0]) != count(kb[s][0])) return std::nullopt;

  // Rigid elements are searched; flexible ones follow by propagation.
  Mask rigid_a = ka, rigid_b = kb;
  for (size_t s = 0; s < sig.sorts.size(); ++s)
    if (!sig.sort_rigid[s]) {
      for (auto& slot : rigid_a[s]) std::fill(slot.begin(), slot.end(), 0);
    }

  int W = a.num_worlds();
  std::optional<ModelMorphism> out;
  FrameSearch fs(a, b, true, point);
  fs.run([&](const std::vector<int>& frame) {
    for (size_t s = 0; s < sig.sorts.size(); ++s)
      if (!sig.sort_rigid[s])
        for (int w = 0; w < W; ++w)
          if (count(ka[s][w]) != count(kb[s][frame[w]])) return false;
    ElementSearch es(a, b, frame, true);
    if (!es.setup(rigid_a, rigid_b)) return false;
    return es.run(0, [&] {
      ModelMorphism h = es.morphism();
      // Flexible elements of the generated part are images of applications at their world.
      bool progress = true, clash = false;
      while (progress && !clash) {
        progress = false;
        for (size_t f = 0; f < sig.funs.size() && !clash; ++f) {
          int res = sig.fun_result_sort[f];
          if (sig.sort_rigid[res]) continue;
          const auto& ar = sig.fun_arg_sorts[f];
          for (int w = 0; w < W && !clash; ++w) {
            std::vector<std::vector<int>> choices;
            for (int s : ar) {
              std::vector<int> c;
              for (int e : kept_list(ka[s][a.sort_slot(s, w)]))
                if (h.elems[s][a.sort_slot(s, w)][e] != kUndef) c.push_back(e);
              choices.push_back(std::move(c));
            }
            for_each_tuple(choices, [&](const std::vector<int>& t) {
              if (clash) return;
              int ra = a.apply(static_cast<int>(f), w, t.data());
              if (ra < 0) return;
              std::vector<int> bt;
              for (size_t i = 0; i < t.size(); ++i) bt.push_back(h.elems[ar[i]][a.sort_slot(ar[i], w)][t[i]]);
              int rb = b.apply(static_cast<int>(f), frame[w], bt.data());
              int& slot = h.elems[res][w][ra];
              if (slot == kUndef) {
                if (rb < 0) {
                  clash = true;
                  return;
                }
                slot = rb;
                progress = true;
              } else if (slot != rb) {
                clash = true;
              }
            });
          }
        }
      }
      if (clash) return false;
      if (check_generated_iso(a, b, h)) return false;
      out = std::move(h);
      return true;
    });
  });
  return out;
}

Reachability is_reachable(const KripkeStructure& m) {
  const auto& sig = *m.sig;
  int W = m.num_worlds();
  std::vector<char> named(W, 0);
  for (int w : m.nom_val) named[w] = 1;
  for (int w = 0; w < W; ++w)
    if (!named[w]) return {false, "world " + m.worlds[w]};
  Mask k = closure(m, named, false);
  for (size_t s = 0; s < sig.sorts.size(); ++s) {
    if (!sig.sort_rigid[s]) continue;
    for (size_t e = 0; e < m.carriers[s][0].size(); ++e)
      if (!k[s][0][e]) return {false, "element " + m.carriers[s][0][e] + " of " + sig.sorts[s]};
  }
  return {true, ""};
}

Equivalence equiv_at_depth(const KripkeStructure& a, const KripkeStructure& b,
                           const std::vector<std::pair<int, int>>& points, int depth, const EnumBudget& budget) {
  require_same_sig(a, b);
  Equivalence out{true, std::nullopt, -1, -1, 0};
  Scope scope(a.sig);
  for (const auto& s : enumerate_sentences(scope, depth, budget)) {
    auto c = compile(scope, s);
    ++out.sentences_checked;
    for (const auto& [wa, wb] : points) {
      Truth ta = evaluate(a, wa, *c), tb = evaluate(b, wb, *c);
      if (ta == Truth::Unknown || tb == Truth::Unknown) continue;
      if (ta != tb) {
        out.equivalent = false;
        out.distinguishing = s;
        out.world_a = wa;
        out.world_b = wb;
        return out;
      }
    }
  }
  return out;
}

}  // namespace hwb
