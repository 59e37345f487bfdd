#include <algorithm>
#include <set>

#include "hwb/kripke.hpp"

namespace hwb {

std::size_t KripkeStructure::domain_size(const std::vector<int>& arg_sorts, int w) const {
  std::size_t n = 1;
  for (int s : arg_sorts) n *= static_cast<std::size_t>(size(s, w));
  return n;
}

std::size_t KripkeStructure::index(const std::vector<int>& arg_sorts, int w, const int* args) const {
  std::size_t idx = 0, stride = 1;
  for (size_t i = 0; i < arg_sorts.size(); ++i) {
    idx += static_cast<std::size_t>(args[i]) * stride;
    stride *= static_cast<std::size_t>(size(arg_sorts[i], w));
  }
  return idx;
}

int KripkeStructure::apply(int f, int w, const int* args) const {
  return fun_tab[f][fun_slot(f, w)][index(sig->fun_arg_sorts[f], w, args)];
}

bool KripkeStructure::holds(int r, int w, const int* args) const {
  return rel_tab[r][rel_slot(r, w)][index(sig->rel_arg_sorts[r], w, args)] != 0;
}

bool KripkeStructure::edge(int l, int from, int to) const {
  return mod_rel[l][static_cast<std::size_t>(from) * worlds.size() + to] != 0;
}

int KripkeStructure::world_index(const std::string& name) const {
  auto it = std::find(worlds.begin(), worlds.end(), name);
  return it == worlds.end() ? -1 : static_cast<int>(it - worlds.begin());
}

int KripkeStructure::element_index(int s, int w, const std::string& label) const {
  const auto& c = carriers[s][sort_slot(s, w)];
  auto it = std::find(c.begin(), c.end(), label);
  return it == c.end() ? -1 : static_cast<int>(it - c.begin());
}

KripkeStructure blank_model(const SigPtr& sig, int worlds) {
  KripkeStructure m;
  m.sig = sig;
  for (int w = 0; w < worlds; ++w) m.worlds.push_back("w" + std::to_string(w));
  m.nom_val.assign(sig->nominals.size(), 0);
  for (const auto& l : sig->modalities) {
    std::size_t n = 1;
    for (int i = 0; i < l.rank; ++i) n *= static_cast<std::size_t>(worlds);
    m.mod_rel.emplace_back(n, 0);
  }
  for (size_t s = 0; s < sig->sorts.size(); ++s) m.carriers.emplace_back(sig->sort_rigid[s] ? 1 : worlds);
  for (size_t f = 0; f < sig->funs.size(); ++f) m.fun_tab.emplace_back(sig->fun_rigid[f] ? 1 : worlds);
  for (size_t r = 0; r < sig->rels.size(); ++r) m.rel_tab.emplace_back(sig->rel_rigid[r] ? 1 : worlds);
  resize_tables(m);
  return m;
}

void set_carrier(KripkeStructure& m, int s, int w, int n) {
  auto& c = m.carriers[s][m.sort_slot(s, w)];
  c.clear();
  for (int i = 0; i < n; ++i) c.push_back("e" + std::to_string(i));
}

void resize_tables(KripkeStructure& m) {
  const auto& sig = *m.sig;
  int W = m.num_worlds();
  for (size_t f = 0; f < sig.funs.size(); ++f)
    for (size_t slot = 0; slot < m.fun_tab[f].size(); ++slot) {
      int w = sig.fun_rigid[f] ? 0 : static_cast<int>(slot);
      int res = sig.fun_result_sort[f];
      std::size_t n = m.domain_size(sig.fun_arg_sorts[f], w);
      int fill = (sig.sort_rigid[res] || W > 0) && m.size(res, w) > 0 ? 0 : kUndef;
      m.fun_tab[f][slot].resize(n, fill);
    }
  for (size_t r = 0; r < sig.rels.size(); ++r)
    for (size_t slot = 0; slot < m.rel_tab[r].size(); ++slot) {
      int w = sig.rel_rigid[r] ? 0 : static_cast<int>(slot);
      m.rel_tab[r][slot].resize(m.domain_size(sig.rel_arg_sorts[r], w), 0);
    }
}

void validate_model(const KripkeStructure& m) {
  std::vector<std::string> v;
  if (!m.sig) throw InvalidModel("model has no signature");
  const auto& sig = *m.sig;
  int W = m.num_worlds();
  if (W == 0 && !sig.nominals.empty()) v.push_back("empty frame with nominals");
  {
    std::set<std::string> names(m.worlds.begin(), m.worlds.end());
    if (names.size() != m.worlds.size()) v.push_back("duplicate world names");
  }
  if (m.nom_val.size() != sig.nominals.size()) v.push_back("nominal table has wrong size");
  for (size_t k = 0; k < m.nom_val.size() && k < sig.nominals.size(); ++k)
    if (m.nom_val[k] < 0 || m.nom_val[k] >= W) v.push_back("nominal " + sig.nominals[k] + " denotes no world");
  if (m.mod_rel.size() != sig.modalities.size()) v.push_back("modality table has wrong size");
  for (size_t l = 0; l < m.mod_rel.size() && l < sig.modalities.size(); ++l) {
    std::size_t n = 1;
    for (int i = 0; i < sig.modalities[l].rank; ++i) n *= static_cast<std::size_t>(W);
    if (m.mod_rel[l].size() != n) v.push_back("modality " + sig.modalities[l].name + " has wrong size");
  }
  if (m.carriers.size() != sig.sorts.size()) {
    v.push_back("carrier table has wrong size");
    throw InvalidModel(ValidationError::join(v));
  }
  for (size_t s = 0; s < sig.sorts.size(); ++s) {
    size_t want = sig.sort_rigid[s] ? 1 : static_cast<size_t>(W);
    if (m.carriers[s].size() != want) {
      v.push_back("sort " + sig.sorts[s] + " has wrong slot count");
      continue;
    }
    for (const auto& c : m.carriers[s]) {
      std::set<std::string> labels(c.begin(), c.end());
      if (labels.size() != c.size()) v.push_back("sort " + sig.sorts[s] + " has duplicate element labels");
    }
  }
  if (!v.empty()) throw InvalidModel(ValidationError::join(v));
  if (m.fun_tab.size() != sig.funs.size()) v.push_back("function table has wrong size");
  for (size_t f = 0; f < m.fun_tab.size() && f < sig.funs.size(); ++f) {
    size_t want = sig.fun_rigid[f] ? 1 : static_cast<size_t>(W);
    if (m.fun_tab[f].size() != want) {
      v.push_back("op " + sig.funs[f].str() + " has wrong slot count");
      continue;
    }
    for (size_t slot = 0; slot < want; ++slot) {
      int w = static_cast<int>(slot);
      const auto& tab = m.fun_tab[f][slot];
      if (tab.size() != m.domain_size(sig.fun_arg_sorts[f], w)) {
        v.push_back("op " + sig.funs[f].str() + " table has wrong size");
        continue;
      }
      int res = sig.fun_result_sort[f];
      int n = m.size(res, w);
      for (int x : tab) {
        if (x >= 0 && x < n) continue;
        if (x == kUndef && n == 0) continue;
        if (x == kSentinel && m.partial) continue;
        v.push_back("op " + sig.funs[f].str() + " has a value outside its codomain");
        break;
      }
    }
  }
  if (m.rel_tab.size() != sig.rels.size()) v.push_back("relation table has wrong size");
  for (size_t r = 0; r < m.rel_tab.size() && r < sig.rels.size(); ++r) {
    size_t want = sig.rel_rigid[r] ? 1 : static_cast<size_t>(W);
    if (m.rel_tab[r].size() != want) {
      v.push_back("rel " + sig.rels[r].str() + " has wrong slot count");
      continue;
    }
    for (size_t slot = 0; slot < want; ++slot)
      if (m.rel_tab[r][slot].size() != m.domain_size(sig.rel_arg_sorts[r], static_cast<int>(slot)))
        v.push_back("rel " + sig.rels[r].str() + " table has wrong size");
  }
  if (!v.empty()) throw InvalidModel(ValidationError::join(v));
}

std::optional<std::string> first_difference(const KripkeStructure& a, const KripkeStructure& b, bool labels) {
  const auto& sig = *a.sig;
  if (a.sig->fingerprint != b.sig->fingerprint) return std::string("signatures differ");
  if (a.num_worlds() != b.num_worlds()) return std::string("world counts differ");
  if (labels && a.worlds != b.worlds) return std::string("world names differ");
  for (size_t k = 0; k < sig.nominals.size(); ++k)
    if (a.nom_val[k] != b.nom_val[k]) return "nominal " + sig.nominals[k];
  for (size_t l = 0; l < sig.modalities.size(); ++l)
    if (a.mod_rel[l] != b.mod_rel[l]) return "modality " + sig.modalities[l].name;
  for (size_t s = 0; s < sig.sorts.size(); ++s)
    for (size_t slot = 0; slot < a.carriers[s].size(); ++slot) {
      if (a.carriers[s][slot].size() != b.carriers[s][slot].size())
        return "carrier of " + sig.sorts[s] + (sig.sort_rigid[s] ? "" : " at " + a.worlds[slot]);
      if (labels && a.carriers[s][slot] != b.carriers[s][slot])
        return "labels of " + sig.sorts[s] + (sig.sort_rigid[s] ? "" : " at " + a.worlds[slot]);
    }
  for (size_t f = 0; f < sig.funs.size(); ++f)
    for (size_t slot = 0; slot < a.fun_tab[f].size(); ++slot)
      if (a.fun_tab[f][slot] != b.fun_tab[f][slot])
        return "op " + sig.funs[f].str() + (sig.fun_rigid[f] ? "" : " at " + a.worlds[slot]);
  for (size_t r = 0; r < sig.rels.size(); ++r)
    for (size_t slot = 0; slot < a.rel_tab[r].size(); ++slot)
      if (a.rel_tab[r][slot] != b.rel_tab[r][slot])
        return "rel " + sig.rels[r].str() + (sig.rel_rigid[r] ? "" : " at " + a.worlds[slot]);
  if (a.partial != b.partial) return std::string("partiality flags differ");
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compiled evaluation

namespace {

struct Ref {
  int nom = -1;  // signature nominal
  int var = -1;  // environment slot
};

struct CTerm {
  int fun = -1;
  int var = -1;
  Ref at;
  std::vector<CTerm> args;
};

struct CSen {
  SenKind kind;
  int idx = -1;
  Ref ref;
  int slot = -1;
  int sort = -1;  // binder sort; -1 for nominal variables
  std::vector<CTerm> terms;
  std::vector<CSen> subs;
};

struct Compiler {
  const HybridSignature& sig;
  std::vector<Variable> stack;
  int max_slots = 0;

  int find_var(const std::string& name, const std::string& sort) const {
    for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i)
      if (stack[i].name == name && stack[i].sort == sort) return i;
    return -1;
  }

  Ref nominal(const std::string& k) const {
    int v = find_var(k, kNom);
    if (v >= 0) return {-1, v};
    int n = sig.nominal_index(k);
    if (n < 0) throw IllFormedSentence("unknown nominal " + k);
    return {n, -1};
  }

  CTerm term(const Term& t) const {
    CTerm c;
    if (t->fun.arity.empty()) {
      int v = find_var(t->fun.name, t->fun.result);
      if (v >= 0) {
        c.var = v;
        return c;
      }
    }
    c.fun = sig.fun_index(t->fun);
    if (c.fun < 0) throw IllFormedTerm("unknown function symbol " + t->fun.str());
    if (t->at) c.at = nominal(*t->at);
    for (const auto& a : t->args) c.args.push_back(term(a));
    return c;
  }

  CSen sentence(const Sentence& s) {
    CSen c;
    c.kind = s->kind;
    switch (s->kind) {
      case SenKind::Nominal: c.ref = nominal(s->name); break;
      case SenKind::Eq:
        for (const auto& t : s->terms) c.terms.push_back(term(t));
        break;
      case SenKind::Rel:
        c.idx = sig.rel_index(s->rel);
        if (c.idx < 0) throw IllFormedSentence("unknown relation symbol " + s->rel.str());
        if (s->rel_at) c.ref = nominal(*s->rel_at);
        for (const auto& t : s->terms) c.terms.push_back(term(t));
        break;
      case SenKind::Or:
      case SenKind::Not:
        for (const auto& x : s->subs) c.subs.push_back(sentence(x));
        break;
      case SenKind::At:
        c.ref = nominal(s->name);
        c.subs.push_back(sentence(s->subs[0]));
        break;
      case SenKind::Diamond:
        c.idx = sig.modality_index(s->name);
        if (c.idx < 0) throw IllFormedSentence("unknown modality " + s->name);
        c.subs.push_back(sentence(s->subs[0]));
        break;
      case SenKind::Store:
      case SenKind::Exists:
        if (!s->var.is_nominal()) {
          c.sort = sig.sort_index(s->var.sort);
          if (c.sort < 0) throw IllFormedSentence("unknown sort " + s->var.sort);
        }
        c.slot = static_cast<int>(stack.size());
        stack.push_back(s->var);
        max_slots = std::max(max_slots, static_cast<int>(stack.size()));
        c.subs.push_back(sentence(s->subs[0]));
        stack.pop_back();
        break;
    }
    return c;
  }
};

struct Eval {
  const KripkeStructure& m;
  std::vector<int> env;

  int world_of(const Ref& r, int w) const {
    if (r.nom >= 0) return m.nom_val[r.nom];
    if (r.var >= 0) return env[r.var];
    return w;
  }

  int term(const CTerm& t, int w) const {
    if (t.var >= 0) return env[t.var];
    int at = world_of(t.at, w);
    int buf[16];
    std::vector<int> big;
    int* args = buf;
    if (t.args.size() > 16) {
      big.resize(t.args.size());
      args = big.data();
    }
    int status = 0;
    for (size_t i = 0; i < t.args.size(); ++i) {
      args[i] = term(t.args[i], at);
      if (args[i] == kSentinel) status = kSentinel;
      else if (args[i] == kUndef && status == 0) status = kUndef;
    }
    if (status != 0) return status;
    return m.apply(t.fun, at, args);
  }

  Truth atom(const std::vector<int>& vals) const {
    for (int v : vals)
      if (v == kSentinel) return Truth::Unknown;
    for (int v : vals)
      if (v == kUndef) return Truth::False;
    return Truth::True;
  }

  Truth sentence(const CSen& s, int w) {
    switch (s.kind) {
      case SenKind::Nominal: return world_of(s.ref, w) == w ? Truth::True : Truth::False;
      case SenKind::Eq: {
        int a = term(s.terms[0], w), b = term(s.terms[1], w);
        Truth t = atom({a, b});
        if (t != Truth::True) return t;
        return a == b ? Truth::True : Truth::False;
      }
      case SenKind::Rel: {
        int at = world_of(s.ref, w);
        std::vector<int> vals;
        for (const auto& t : s.terms) vals.push_back(term(t, at));
        Truth t = atom(vals);
        if (t != Truth::True) return t;
        return m.holds(s.idx, at, vals.data()) ? Truth::True : Truth::False;
      }
      case SenKind::Or: {
        bool unknown = false;
        for (const auto& x : s.subs) {
          Truth t = sentence(x, w);
          if (t == Truth::True) return Truth::True;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::False;
      }
      case SenKind::Not: {
        Truth t = sentence(s.subs[0], w);
        if (t == Truth::Unknown) return t;
        return t == Truth::True ? Truth::False : Truth::True;
      }
      case SenKind::At: return sentence(s.subs[0], world_of(s.ref, w));
      case SenKind::Diamond: {
        bool unknown = false;
        int W = m.num_worlds();
        for (int v = 0; v < W; ++v) {
          if (!m.edge(s.idx, w, v)) continue;
          Truth t = sentence(s.subs[0], v);
          if (t == Truth::True) return Truth::True;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::False;
      }
      case SenKind::Store: {
        int saved = env[s.slot];
        env[s.slot] = w;
        Truth t = sentence(s.subs[0], w);
        env[s.slot] = saved;
        return t;
      }
      case SenKind::Exists: {
        int saved = env[s.slot];
        int n = s.sort < 0 ? m.num_worlds() : m.size(s.sort, w);
        bool unknown = false;
        Truth out = Truth::False;
        for (int e = 0; e < n; ++e) {
          env[s.slot] = e;
          Truth t = sentence(s.subs[0], w);
          if (t == Truth::True) {
            out = Truth::True;
            break;
          }
          if (t == Truth::Unknown) unknown = true;
        }
        env[s.slot] = saved;
        if (out == Truth::True) return out;
        return unknown ? Truth::Unknown : Truth::False;
      }
    }
    return Truth::Unknown;
  }
};

}  // namespace

struct CompiledSentence {
  CSen root;
  int slots = 0;
};

void CompiledDeleter::operator()(CompiledSentence* p) const { delete p; }

Compiled compile(const Scope& scope, const Sentence& s) {
  Compiler c{*scope.sig(), scope.bound(), 0};
  c.max_slots = static_cast<int>(scope.bound().size());
  Compiled out(new CompiledSentence);
  out->root = c.sentence(s);
  out->slots = c.max_slots;
  return out;
}

Truth evaluate(const KripkeStructure& m, int w, const CompiledSentence& c) {
  Eval e{m, std::vector<int>(static_cast<size_t>(c.slots), 0)};
  return e.sentence(c.root, w);
}

int eval_term(const PointedModel& pm, const Term& t) {
  Compiler c{*pm.model->sig, {}, 0};
  CTerm ct = c.term(t);
  Eval e{*pm.model, {}};
  int v = e.term(ct, pm.world);
  if (v == kUndef) throw EmptyCarrier("term has no denotation: a carrier on its path is empty");
  if (v == kSentinel) throw PartialModel("term reaches the bound of a partial model");
  return v;
}

Truth truth(const PointedModel& pm, const Sentence& s) {
  auto c = compile(Scope(pm.model->sig), s);
  return evaluate(*pm.model, pm.world, *c);
}

bool satisfies(const PointedModel& pm, const Sentence& s) {
  Truth t = truth(pm, s);
  if (t == Truth::Unknown) throw PartialModel("truth value depends on the bound of a partial model");
  return t == Truth::True;
}

bool satisfies_globally(const KripkeStructure& m, const Sentence& s) {
  auto c = compile(Scope(m.sig), s);
  for (int w = 0; w < m.num_worlds(); ++w) {
    Truth t = evaluate(m, w, *c);
    if (t == Truth::Unknown) throw PartialModel("truth value depends on the bound of a partial model");
    if (t == Truth::False) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reducts

KripkeStructure reduct(const SignatureMorphism& chi, const KripkeStructure& m) {
  if (m.sig->fingerprint != chi.target->fingerprint)
    throw PreconditionFailed("reduct: model is not over the target of " + chi.name);
  const auto& S = *chi.source;
  const auto& T = *chi.target;
  int W = m.num_worlds();
  KripkeStructure r;
  r.sig = chi.source;
  r.worlds = m.worlds;
  r.partial = m.partial;
  for (size_t k = 0; k < S.nominals.size(); ++k) r.nom_val.push_back(m.nom_val[chi.nom_map[k]]);
  for (size_t l = 0; l < S.modalities.size(); ++l) r.mod_rel.push_back(m.mod_rel[chi.mod_map[l]]);
  auto slots = [&](const auto& src, bool src_rigid, bool tgt_rigid) {
    using V = std::decay_t<decltype(src)>;
    if (src_rigid || !tgt_rigid) return src;
    return V(static_cast<size_t>(W), src[0]);
  };
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    int t = chi.sort_map[s];
    r.carriers.push_back(slots(m.carriers[t], S.sort_rigid[s], T.sort_rigid[t]));
  }
  for (size_t f = 0; f < S.funs.size(); ++f) {
    int g = chi.fun_map[f];
    r.fun_tab.push_back(slots(m.fun_tab[g], S.fun_rigid[f], T.fun_rigid[g]));
  }
  for (size_t p = 0; p < S.rels.size(); ++p) {
    int q = chi.rel_map[p];
    r.rel_tab.push_back(slots(m.rel_tab[q], S.rel_rigid[p], T.rel_rigid[q]));
  }
  return r;
}

ModelMorphism reduct_morphism(const SignatureMorphism& chi, const ModelMorphism& h) {
  ModelMorphism r;
  r.frame = h.frame;
  const auto& S = *chi.source;
  const auto& T = *chi.target;
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    int t = chi.sort_map[s];
    const auto& src = h.elems[t];
    if (S.sort_rigid[s] || !T.sort_rigid[t]) r.elems.push_back(src);
    else r.elems.emplace_back(h.frame.size(), src[0]);
  }
  return r;
}

KripkeStructure reduct_along(const Substitution& th, const KripkeStructure& m) {
  if (m.sig->fingerprint != th.target->fingerprint)
    throw PreconditionFailed("reduct_along: model is not over the substitution target");
  const auto& S = *th.source;
  const auto& T = *th.target;
  int W = m.num_worlds();
  KripkeStructure r;
  r.sig = th.source;
  r.worlds = m.worlds;
  r.partial = m.partial;
  for (const auto& k : S.nominals) {
    std::string img = k;
    for (const auto& [z, j] : th.nominals)
      if (z == k) img = j;
    r.nom_val.push_back(m.nom_val[T.nominal_index(img)]);
  }
  for (const auto& l : S.modalities) r.mod_rel.push_back(m.mod_rel[T.modality_index(l.name)]);
  for (const auto& s : S.sorts) r.carriers.push_back(m.carriers[T.sort_index(s)]);
  for (size_t f = 0; f < S.funs.size(); ++f) {
    const Term* img = nullptr;
    for (const auto& [c, t] : th.constants)
      if (c == S.funs[f]) img = &t;
    if (!img) {
      r.fun_tab.push_back(m.fun_tab[T.fun_index(S.funs[f])]);
      continue;
    }
    int res = S.fun_result_sort[f];
    int v = kUndef;
    if (W > 0 || m.carriers[T.sort_index(S.sorts[res])][0].size() > 0) {
      try {
        v = eval_term({&m, 0}, *img);
      } catch (const EmptyCarrier&) {
        v = kUndef;
      }
    }
    if (v == kUndef && !m.carriers[T.sort_index(S.sorts[res])][0].empty())
      throw EmptyCarrier("substituted term for " + S.funs[f].str() + " has no denotation");
    r.fun_tab.push_back({std::vector<int>{v}});
  }
  for (const auto& p : S.rels) r.rel_tab.push_back(m.rel_tab[T.rel_index(p)]);
  return r;
}

// ---------------------------------------------------------------------------
// Amalgamation

KripkeStructure amalgamate(const SignatureSquare& sq, const KripkeStructure& ma, const KripkeStructure& mb) {
  if (ma.sig->fingerprint != sq.chi.target->fingerprint || mb.sig->fingerprint != sq.delta.target->fingerprint)
    throw PreconditionFailed("amalgamate: models are not over the square's signatures");
  if (auto d = first_difference(reduct(sq.chi, ma), reduct(sq.delta, mb)))
    throw ReductMismatch("reducts differ at " + *d);
  const auto& A = *sq.delta_a.source;
  const auto& B = *sq.chi_b.source;
  const auto& D = *sq.delta_a.target;
  int W = ma.num_worlds();

  // Picks a preimage for target index t, preferring one whose rigidity matches.
  struct Pick {
    const KripkeStructure* m;
    int idx;
    bool rigid;
  };
  auto pick = [&](int t, bool trig, const std::vector<int>& amap, const std::vector<bool>& arig,
                  const std::vector<int>& bmap, const std::vector<bool>& brig) -> Pick {
    std::optional<Pick> any;
    for (size_t i = 0; i < amap.size(); ++i)
      if (amap[i] == t) {
        Pick p{&ma, static_cast<int>(i), static_cast<bool>(arig[i])};
        if (p.rigid == trig) return p;
        if (!any) any = p;
      }
    for (size_t i = 0; i < bmap.size(); ++i)
      if (bmap[i] == t) {
        Pick p{&mb, static_cast<int>(i), static_cast<bool>(brig[i])};
        if (p.rigid == trig) return p;
        if (!any) any = p;
      }
    if (!any) throw PreconditionFailed("amalgamate: symbol of the apex has no preimage; square is not a pushout");
    return *any;
  };
  auto adapt = [&](const auto& src, bool src_rigid, bool tgt_rigid) {
    using V = std::decay_t<decltype(src)>;
    if (src_rigid == tgt_rigid) return src;
    if (src_rigid) return V(static_cast<size_t>(W), src[0]);
    return V(1, src.empty() ? typename V::value_type{} : src[0]);
  };

  KripkeStructure r;
  r.sig = sq.delta_a.target;
  r.worlds = ma.worlds;
  r.partial = ma.partial || mb.partial;
  std::vector<bool> no_rig_a(A.nominals.size(), false), no_rig_b(B.nominals.size(), false);
  for (size_t k = 0; k < D.nominals.size(); ++k) {
    Pick p = pick(static_cast<int>(k), false, sq.delta_a.nom_map, no_rig_a, sq.chi_b.nom_map, no_rig_b);
    r.nom_val.push_back(p.m->nom_val[p.idx]);
  }
  std::vector<bool> mra(A.modalities.size(), false), mrb(B.modalities.size(), false);
  for (size_t l = 0; l < D.modalities.size(); ++l) {
    Pick p = pick(static_cast<int>(l), false, sq.delta_a.mod_map, mra, sq.chi_b.mod_map, mrb);
    r.mod_rel.push_back(p.m->mod_rel[p.idx]);
  }
  for (size_t s = 0; s < D.sorts.size(); ++s) {
    Pick p = pick(static_cast<int>(s), D.sort_rigid[s], sq.delta_a.sort_map, A.sort_rigid, sq.chi_b.sort_map,
                  B.sort_rigid);
    r.carriers.push_back(adapt(p.m->carriers[p.idx], p.rigid, D.sort_rigid[s]));
  }
  for (size_t f = 0; f < D.funs.size(); ++f) {
    Pick p = pick(static_cast<int>(f), D.fun_rigid[f], sq.delta_a.fun_map, A.fun_rigid, sq.chi_b.fun_map,
                  B.fun_rigid);
    r.fun_tab.push_back(adapt(p.m->fun_tab[p.idx], p.rigid, D.fun_rigid[f]));
  }
  for (size_t q = 0; q < D.rels.size(); ++q) {
    Pick p = pick(static_cast<int>(q), D.rel_rigid[q], sq.delta_a.rel_map, A.rel_rigid, sq.chi_b.rel_map,
                  B.rel_rigid);
    r.rel_tab.push_back(adapt(p.m->rel_tab[p.idx], p.rigid, D.rel_rigid[q]));
  }
  validate_model(r);
  if (auto d = first_difference(reduct(sq.delta_a, r), ma))
    throw ReductMismatch("amalgam does not restrict to the first model at " + *d);
  if (auto d = first_difference(reduct(sq.chi_b, r), mb))
    throw ReductMismatch("amalgam does not restrict to the second model at " + *d);
  return r;
}

}  // namespace hwb
