#include "hwb/syntax.hpp"

#include <algorithm>
#include <set>

namespace hwb {

namespace {

std::string enc(const std::string& s) { return std::to_string(s.size()) + ":" + s; }

std::string fun_key(const FunSym& f) {
  std::string k = enc(f.name) + "[";
  for (const auto& a : f.arity) k += enc(a);
  return k + "]" + enc(f.result);
}

std::string var_key(const Variable& v) { return enc(v.name) + enc(v.sort) + enc(v.owner) + v.role; }

Term node(FunSym f, std::optional<std::string> at, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->key = "T" + fun_key(f) + (at ? "@" + enc(*at) : "") + "(";
  for (size_t i = 0; i < args.size(); ++i) n->key += (i ? "," : "") + args[i]->key;
  n->key += ")";
  n->fun = std::move(f);
  n->at = std::move(at);
  n->args = std::move(args);
  return n;
}

// Sort of a node whose children are already known to be well formed.
HybridSort shallow_sort(const Scope& scope, const TermNode& t) {
  if (scope.is_rigid_fun(t.fun) || scope.is_rigid_sort(t.fun.result)) return {t.fun.result, std::nullopt};
  return {t.fun.result, t.at};
}

void check_args(const Scope& scope, const std::string& what, const std::vector<std::string>& arity,
                const std::vector<Term>& args, const std::optional<std::string>& at) {
  if (args.size() != arity.size())
    throw IllFormedTerm(what + " expects " + std::to_string(arity.size()) + " arguments, got " +
                        std::to_string(args.size()));
  for (size_t i = 0; i < args.size(); ++i) {
    HybridSort got = shallow_sort(scope, *args[i]);
    HybridSort want{arity[i], scope.is_rigid_sort(arity[i]) ? std::nullopt : at};
    if (!(got == want))
      throw IllFormedTerm(what + " argument " + std::to_string(i + 1) + " has sort " + got.str() + ", expected " +
                          want.str());
  }
}

Sentence snode(SentenceNode n) {
  auto p = std::make_shared<SentenceNode>(std::move(n));
  std::string& k = p->key;
  switch (p->kind) {
    case SenKind::Nominal: k = "N" + enc(p->name); break;
    case SenKind::Eq: k = "E(" + p->terms[0]->key + "," + p->terms[1]->key + ")"; break;
    case SenKind::Rel:
      k = "R" + enc(p->rel.name) + "[";
      for (const auto& a : p->rel.arity) k += enc(a);
      k += "]" + (p->rel_at ? "@" + enc(*p->rel_at) : std::string()) + "(";
      for (size_t i = 0; i < p->terms.size(); ++i) k += (i ? "," : "") + p->terms[i]->key;
      k += ")";
      break;
    case SenKind::Or:
      k = "O{";
      for (size_t i = 0; i < p->subs.size(); ++i) k += (i ? ";" : "") + p->subs[i]->key;
      k += "}";
      break;
    case SenKind::Not: k = "!" + p->subs[0]->key; break;
    case SenKind::At: k = "@" + enc(p->name) + p->subs[0]->key; break;
    case SenKind::Diamond: k = "D" + enc(p->name) + p->subs[0]->key; break;
    case SenKind::Store: k = "S" + var_key(p->var) + p->subs[0]->key; break;
    case SenKind::Exists: k = "X" + var_key(p->var) + p->subs[0]->key; break;
  }
  return p;
}

}  // namespace

std::string HybridSort::str() const { return at ? "@" + *at + " " + sort : sort; }

// ---------------------------------------------------------------------------
// Scope

bool Scope::name_in_use(const std::string& name) const {
  if (sig_->nominal_index(name) >= 0 || !sig_->funs_named(name).empty()) return true;
  return std::any_of(bound_.begin(), bound_.end(), [&](const Variable& v) { return v.name == name; });
}

std::string Scope::fresh_name(const std::string& prefix) const {
  for (int i = 0;; ++i) {
    std::string n = prefix + std::to_string(i);
    if (!name_in_use(n)) return n;
  }
}

Scope Scope::with(const Variable& v) const {
  if (v.sort == kNom) {
    if (is_nominal(v.name)) throw ClashError("nominal " + v.name + " is already in scope");
  } else {
    int s = sig_->sort_index(v.sort);
    if (s < 0) throw ResolveError("unknown sort " + v.sort + " for variable " + v.name);
    if (!sig_->sort_rigid[s])
      throw FlexibleQuantificationError("variable " + v.name + " has flexible sort " + v.sort);
    if (has_fun(v.as_constant())) throw ClashError("constant " + v.as_constant().str() + " is already in scope");
  }
  Scope out = *this;
  out.bound_.push_back(v);
  return out;
}

Variable Scope::variable(const std::string& name, const std::string& sort, char role) const {
  return {name, sort, sig_->fingerprint, role};
}

bool Scope::is_nominal(const std::string& k) const {
  if (sig_->nominal_index(k) >= 0) return true;
  return std::any_of(bound_.begin(), bound_.end(), [&](const Variable& v) { return v.is_nominal() && v.name == k; });
}

bool Scope::is_binary_modality(const std::string& l) const {
  int i = sig_->modality_index(l);
  return i >= 0 && sig_->modalities[i].rank == 2;
}

bool Scope::has_fun(const FunSym& f) const {
  if (sig_->fun_index(f) >= 0) return true;
  return std::any_of(bound_.begin(), bound_.end(),
                     [&](const Variable& v) { return !v.is_nominal() && f.arity.empty() && v.name == f.name && v.sort == f.result; });
}

bool Scope::is_rigid_fun(const FunSym& f) const {
  int i = sig_->fun_index(f);
  if (i >= 0) return sig_->fun_rigid[i];
  return has_fun(f);
}

std::vector<FunSym> Scope::funs_named(const std::string& name) const {
  std::vector<FunSym> out;
  for (int i : sig_->funs_named(name)) out.push_back(sig_->funs[i]);
  for (const auto& v : bound_)
    if (!v.is_nominal() && v.name == name) out.push_back(v.as_constant());
  return out;
}

// ---------------------------------------------------------------------------
// Terms

Term make_app(const Scope& scope, const FunSym& f, std::vector<Term> args, std::optional<std::string> at) {
  if (!scope.has_fun(f)) throw IllFormedTerm("unknown function symbol " + f.str());
  if (scope.is_rigid_fun(f)) at.reset();
  else if (at && !scope.is_nominal(*at)) throw IllFormedTerm("unknown nominal " + *at + " in tag of " + f.name);
  check_args(scope, f.name, f.arity, args, at);
  return node(f, std::move(at), std::move(args));
}

Term make_const(const Scope& scope, const FunSym& f, std::optional<std::string> at) {
  return make_app(scope, f, {}, std::move(at));
}

HybridSort sort_of(const Term& t, const Scope& scope) {
  if (!scope.has_fun(t->fun)) throw IllFormedTerm("unknown function symbol " + t->fun.str());
  bool rigid = scope.is_rigid_fun(t->fun);
  if (rigid && t->at) throw IllFormedTerm("rigid symbol " + t->fun.name + " carries a world tag");
  if (t->at && !scope.is_nominal(*t->at)) throw IllFormedTerm("unknown nominal " + *t->at);
  for (const auto& a : t->args) sort_of(a, scope);
  check_args(scope, t->fun.name, t->fun.arity, t->args, t->at);
  return shallow_sort(scope, *t);
}

int term_depth(const Term& t) {
  int d = 0;
  for (const auto& a : t->args) d = std::max(d, 1 + term_depth(a));
  return d;
}

std::string show(const Term& t) {
  std::string out = t->fun.name + (t->at ? "@" + *t->at : "");
  if (t->args.empty()) return out;
  out += "(";
  for (size_t i = 0; i < t->args.size(); ++i) out += (i ? ", " : "") + show(t->args[i]);
  return out + ")";
}

Term anchor(const Scope& scope, const Term& t, const std::string& k) {
  std::optional<std::string> at = t->at;
  if (!at && !scope.is_rigid_fun(t->fun)) at = k;
  const std::string& inner = at ? *at : k;
  std::vector<Term> args;
  for (const auto& a : t->args) args.push_back(anchor(scope, a, inner));
  return make_app(scope, t->fun, std::move(args), at);
}

// ---------------------------------------------------------------------------
// Sentences

namespace sen {

Sentence nominal(const Scope& scope, const std::string& k) {
  if (!scope.is_nominal(k)) throw IllFormedSentence("unknown nominal " + k);
  SentenceNode n{};
  n.kind = SenKind::Nominal;
  n.name = k;
  return snode(std::move(n));
}

Sentence eq(const Scope& scope, const Term& l, const Term& r) {
  HybridSort a = sort_of(l, scope), b = sort_of(r, scope);
  if (!(a == b)) throw IllFormedSentence("equation between sorts " + a.str() + " and " + b.str());
  SentenceNode n{};
  n.kind = SenKind::Eq;
  n.terms = {l, r};
  return snode(std::move(n));
}

Sentence rel(const Scope& scope, const RelSym& r, std::vector<Term> args, std::optional<std::string> at) {
  int i = scope.sig()->rel_index(r);
  if (i < 0) throw IllFormedSentence("unknown relation symbol " + r.str());
  if (scope.sig()->rel_rigid[i]) at.reset();
  else if (at && !scope.is_nominal(*at)) throw IllFormedSentence("unknown nominal " + *at);
  for (const auto& a : args) sort_of(a, scope);
  try {
    check_args(scope, r.name, r.arity, args, at);
  } catch (const IllFormedTerm& e) {
    throw IllFormedSentence(e.what());
  }
  SentenceNode n{};
  n.kind = SenKind::Rel;
  n.rel = r;
  n.rel_at = std::move(at);
  n.terms = std::move(args);
  return snode(std::move(n));
}

Sentence disj(std::vector<Sentence> subs) {
  std::sort(subs.begin(), subs.end(), [](const Sentence& a, const Sentence& b) { return a->key < b->key; });
  subs.erase(std::unique(subs.begin(), subs.end(), [](const Sentence& a, const Sentence& b) { return a->key == b->key; }),
             subs.end());
  SentenceNode n{};
  n.kind = SenKind::Or;
  n.subs = std::move(subs);
  return snode(std::move(n));
}

Sentence neg(const Sentence& s) {
  SentenceNode n{};
  n.kind = SenKind::Not;
  n.subs = {s};
  return snode(std::move(n));
}

Sentence at(const Scope& scope, const std::string& k, const Sentence& s) {
  if (!scope.is_nominal(k)) throw IllFormedSentence("unknown nominal " + k);
  SentenceNode n{};
  n.kind = SenKind::At;
  n.name = k;
  n.subs = {s};
  return snode(std::move(n));
}

Sentence diamond(const Scope& scope, const std::string& l, const Sentence& s) {
  if (!scope.is_binary_modality(l)) throw IllFormedSentence(l + " is not a binary modality");
  SentenceNode n{};
  n.kind = SenKind::Diamond;
  n.name = l;
  n.subs = {s};
  return snode(std::move(n));
}

Sentence store(const Scope& scope, const Variable& z, const Sentence& body) {
  if (!z.is_nominal()) throw IllFormedSentence("store binds a nominal variable, got sort " + z.sort);
  scope.with(z);
  SentenceNode n{};
  n.kind = SenKind::Store;
  n.var = z;
  n.subs = {body};
  return snode(std::move(n));
}

Sentence exists(const Scope& scope, const Variable& x, const Sentence& body) {
  scope.with(x);
  SentenceNode n{};
  n.kind = SenKind::Exists;
  n.var = x;
  n.subs = {body};
  return snode(std::move(n));
}

Sentence bot() { return disj({}); }
Sentence top() { return neg(bot()); }

Sentence conj(std::vector<Sentence> subs) {
  for (auto& s : subs) s = neg(s);
  return neg(disj(std::move(subs)));
}

Sentence implies(const Sentence& a, const Sentence& b) { return disj({neg(a), b}); }

Sentence box(const Scope& scope, const std::string& l, const Sentence& s) { return neg(diamond(scope, l, neg(s))); }

Sentence forall(const Scope& scope, const Variable& x, const Sentence& body) {
  return neg(exists(scope, x, neg(body)));
}

namespace {
void collect_names(const Sentence& s, std::set<std::string>& out) {
  if (s->kind == SenKind::Store || s->kind == SenKind::Exists) out.insert(s->var.name);
  for (const auto& c : s->subs) collect_names(c, out);
}
}  // namespace

Sentence until(const Scope& scope, const Sentence& phi, const Sentence& psi) {
  const auto& mods = scope.sig()->modalities;
  if (mods.size() != 1 || mods[0].rank != 2)
    throw IllFormedSentence("until requires exactly one modality, of rank 2");
  const std::string& l = mods[0].name;
  std::set<std::string> taken;
  collect_names(phi, taken);
  collect_names(psi, taken);
  auto pick = [&](const Scope& sc) {
    for (int i = 0;; ++i) {
      std::string n = "v" + std::to_string(i);
      if (!sc.name_in_use(n) && !taken.count(n)) {
        taken.insert(n);
        return n;
      }
    }
  };
  Variable x = scope.variable(pick(scope), kNom);
  Scope sx = scope.with(x);
  Variable y = scope.variable(pick(sx), kNom);
  Scope sxy = sx.with(y);
  Sentence inner = at(sxy, x.name, box(sxy, l, implies(diamond(sxy, l, nominal(sxy, y.name)), psi)));
  Sentence body_y = conj({phi, inner});
  return store(scope, x, diamond(sx, l, store(sx, y, body_y)));
}

}  // namespace sen

void check_sentence(const Sentence& s, const Scope& scope) {
  switch (s->kind) {
    case SenKind::Nominal: sen::nominal(scope, s->name); return;
    case SenKind::Eq: sen::eq(scope, s->terms[0], s->terms[1]); return;
    case SenKind::Rel: {
      auto r = sen::rel(scope, s->rel, s->terms, s->rel_at);
      if (r->key != s->key) throw IllFormedSentence("relation atom tag is not normalized");
      return;
    }
    case SenKind::Or:
      for (size_t i = 1; i < s->subs.size(); ++i)
        if (!(s->subs[i - 1]->key < s->subs[i]->key)) throw IllFormedSentence("disjunction is not canonical");
      for (const auto& c : s->subs) check_sentence(c, scope);
      return;
    case SenKind::Not: check_sentence(s->subs[0], scope); return;
    case SenKind::At:
      if (!scope.is_nominal(s->name)) throw IllFormedSentence("unknown nominal " + s->name);
      check_sentence(s->subs[0], scope);
      return;
    case SenKind::Diamond:
      if (!scope.is_binary_modality(s->name)) throw IllFormedSentence(s->name + " is not a binary modality");
      check_sentence(s->subs[0], scope);
      return;
    case SenKind::Store:
      if (!s->var.is_nominal()) throw IllFormedSentence("store binds a nominal variable");
      check_sentence(s->subs[0], scope.with(s->var));
      return;
    case SenKind::Exists: check_sentence(s->subs[0], scope.with(s->var)); return;
  }
}

int sentence_depth(const Sentence& s) {
  switch (s->kind) {
    case SenKind::Nominal:
    case SenKind::Eq:
    case SenKind::Rel: return 0;
    case SenKind::Diamond:
      if (s->subs[0]->kind == SenKind::Nominal) return 0;
      return 1 + sentence_depth(s->subs[0]);
    case SenKind::Or: {
      int d = 0;
      for (const auto& c : s->subs) d = std::max(d, sentence_depth(c));
      return 1 + d;
    }
    default: return 1 + sentence_depth(s->subs[0]);
  }
}

// ---------------------------------------------------------------------------
// Rewriting engine shared by translation and substitution.

namespace {

struct SymbolMapper {
  std::function<std::string(const std::string&)> sort;
  // Rebuilds an application of a free (non-bound) symbol in the target.
  std::function<Term(const Scope&, const FunSym&, std::vector<Term>, std::optional<std::string>)> app;
  std::function<RelSym(const RelSym&)> rel;
  std::function<std::string(const std::string&)> nominal;
  std::function<std::string(const std::string&)> modality;
  std::string owner;  // owner of translated binders; empty keeps the original
};

struct Rewriter {
  const SymbolMapper& m;
  Scope tgt;
  std::vector<std::pair<Variable, Variable>> vars;  // innermost last

  const Variable* bound_source(const std::string& name, const std::string& sort) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first.name == name && it->first.sort == sort) return &it->second;
    return nullptr;
  }

  std::string nominal(const std::string& k) const {
    if (const Variable* v = bound_source(k, kNom)) return v->name;
    return m.nominal(k);
  }

  Term term(const Term& t) const {
    std::vector<Term> args;
    for (const auto& a : t->args) args.push_back(term(a));
    std::optional<std::string> at;
    if (t->at) at = nominal(*t->at);
    if (t->fun.arity.empty())
      if (const Variable* v = bound_source(t->fun.name, t->fun.result)) return make_const(tgt, v->as_constant());
    return m.app(tgt, t->fun, std::move(args), std::move(at));
  }

  Sentence sentence(const Sentence& s) {
    switch (s->kind) {
      case SenKind::Nominal: return sen::nominal(tgt, nominal(s->name));
      case SenKind::Eq: return sen::eq(tgt, term(s->terms[0]), term(s->terms[1]));
      case SenKind::Rel: {
        std::vector<Term> args;
        for (const auto& a : s->terms) args.push_back(term(a));
        std::optional<std::string> at;
        if (s->rel_at) at = nominal(*s->rel_at);
        return sen::rel(tgt, m.rel(s->rel), std::move(args), std::move(at));
      }
      case SenKind::Or: {
        std::vector<Sentence> subs;
        for (const auto& c : s->subs) subs.push_back(sentence(c));
        return sen::disj(std::move(subs));
      }
      case SenKind::Not: return sen::neg(sentence(s->subs[0]));
      case SenKind::At: {
        std::string k = nominal(s->name);
        return sen::at(tgt, k, sentence(s->subs[0]));
      }
      case SenKind::Diamond: return sen::diamond(tgt, m.modality(s->name), sentence(s->subs[0]));
      case SenKind::Store:
      case SenKind::Exists: {
        Variable x = s->var;
        Variable y = x;
        if (!x.is_nominal()) y.sort = m.sort(x.sort);
        if (!m.owner.empty()) y.owner = m.owner;
        bool clash = false;
        try {
          tgt.with(y);
        } catch (const ClashError&) {
          clash = true;
        }
        if (clash) y.name = tgt.fresh_name("v");
        Scope outer = tgt;
        tgt = outer.with(y);
        vars.emplace_back(x, y);
        Sentence body = sentence(s->subs[0]);
        vars.pop_back();
        tgt = outer;
        return s->kind == SenKind::Store ? sen::store(tgt, y, body) : sen::exists(tgt, y, body);
      }
    }
    throw IllFormedSentence("unknown sentence kind");
  }
};

SymbolMapper morphism_mapper(const SignatureMorphism& chi) {
  SymbolMapper m;
  m.sort = [&chi](const std::string& s) { return chi.map_sort(s); };
  m.app = [&chi](const Scope& sc, const FunSym& f, std::vector<Term> args, std::optional<std::string> at) {
    return make_app(sc, chi.map_fun(f), std::move(args), std::move(at));
  };
  m.rel = [&chi](const RelSym& r) { return chi.map_rel(r); };
  m.nominal = [&chi](const std::string& k) { return chi.map_nominal(k); };
  m.modality = [&chi](const std::string& l) { return chi.map_modality(l); };
  m.owner = chi.target->fingerprint;
  return m;
}

SymbolMapper identity_mapper() {
  SymbolMapper m;
  m.sort = [](const std::string& s) { return s; };
  m.app = [](const Scope& sc, const FunSym& f, std::vector<Term> args, std::optional<std::string> at) {
    return make_app(sc, f, std::move(args), std::move(at));
  };
  m.rel = [](const RelSym& r) { return r; };
  m.nominal = [](const std::string& k) { return k; };
  m.modality = [](const std::string& l) { return l; };
  return m;
}

}  // namespace

Sentence translate(const SignatureMorphism& chi, const Sentence& s) {
  SymbolMapper m = morphism_mapper(chi);
  Rewriter rw{m, Scope(chi.target), {}};
  return rw.sentence(s);
}

Term translate(const SignatureMorphism& chi, const Term& t) {
  SymbolMapper m = morphism_mapper(chi);
  Rewriter rw{m, Scope(chi.target), {}};
  return rw.term(t);
}

void validate_substitution(const Substitution& th) {
  Scope tgt(th.target);
  std::vector<std::string> v;
  for (const auto& [c, t] : th.constants) {
    if (th.source->fun_index(c) < 0 || !c.arity.empty()) {
      v.push_back(c.str() + " is not a constant of the source");
      continue;
    }
    if (!th.source->is_rigid_sort(c.result)) v.push_back(c.str() + " is not of a rigid sort");
    try {
      HybridSort hs = sort_of(t, tgt);
      if (hs.sort != c.result || hs.at) v.push_back(c.str() + " is mapped to a term of sort " + hs.str());
    } catch (const Error& e) {
      v.push_back(c.str() + ": " + e.what());
    }
  }
  for (const auto& [z, k] : th.nominals) {
    if (th.source->nominal_index(z) < 0) v.push_back("nominal " + z + " is not in the source");
    if (th.target->nominal_index(k) < 0) v.push_back("nominal " + k + " is not in the target");
  }
  for (const auto& f : th.source->funs)
    if (th.target->fun_index(f) < 0 &&
        std::none_of(th.constants.begin(), th.constants.end(), [&](const auto& e) { return e.first == f; }))
      v.push_back(f.str() + " is neither shared nor substituted");
  for (const auto& k : th.source->nominals)
    if (th.target->nominal_index(k) < 0 &&
        std::none_of(th.nominals.begin(), th.nominals.end(), [&](const auto& e) { return e.first == k; }))
      v.push_back("nominal " + k + " is neither shared nor substituted");
  if (!v.empty()) throw ValidationError(v);
}

namespace {
SymbolMapper substitution_mapper(const Substitution& th) {
  SymbolMapper m = identity_mapper();
  m.app = [&th](const Scope& sc, const FunSym& f, std::vector<Term> args, std::optional<std::string> at) -> Term {
    if (f.arity.empty())
      for (const auto& [c, t] : th.constants)
        if (c == f) return t;
    return make_app(sc, f, std::move(args), std::move(at));
  };
  m.nominal = [&th](const std::string& k) {
    for (const auto& [z, w] : th.nominals)
      if (z == k) return w;
    return k;
  };
  return m;
}
}  // namespace

Sentence apply_substitution(const Substitution& th, const Sentence& s) {
  SymbolMapper m = substitution_mapper(th);
  Rewriter rw{m, Scope(th.target), {}};
  return rw.sentence(s);
}

Term apply_substitution(const Substitution& th, const Term& t) {
  SymbolMapper m = substitution_mapper(th);
  Rewriter rw{m, Scope(th.target), {}};
  return rw.term(t);
}

Sentence replace_nominal(const Scope& scope, const Sentence& s, const std::string& z, const std::string& k) {
  SymbolMapper m = identity_mapper();
  m.nominal = [&](const std::string& n) { return n == z ? k : n; };
  Rewriter rw{m, scope, {}};
  return rw.sentence(s);
}

Sentence replace_constant(const Scope& scope, const Sentence& s, const FunSym& x, const Term& t) {
  SymbolMapper m = identity_mapper();
  m.app = [&](const Scope& sc, const FunSym& f, std::vector<Term> args, std::optional<std::string> at) -> Term {
    if (f == x) return t;
    return make_app(sc, f, std::move(args), std::move(at));
  };
  Rewriter rw{m, scope, {}};
  return rw.sentence(s);
}

// ---------------------------------------------------------------------------
// Rigidification and classification

std::vector<Sentence> rigidify(const Scope& scope, const Sentence& s) {
  if (s->kind == SenKind::At) return {s};
  std::vector<Sentence> out;
  for (const auto& k : scope.sig()->nominals) out.push_back(sen::at(scope, k, s));
  return out;
}

std::vector<Sentence> rigidify(const Scope& scope, const std::vector<Sentence>& ss) {
  std::vector<Sentence> out;
  std::set<std::string> seen;
  for (const auto& s : ss)
    for (auto& r : rigidify(scope, s))
      if (seen.insert(r->key).second) out.push_back(r);
  return out;
}

SenClass classify_sentence(const Sentence& s) {
  auto sen0 = [](const Sentence& x) {
    return x->kind == SenKind::Eq || x->kind == SenKind::Rel ||
           (x->kind == SenKind::Diamond && x->subs[0]->kind == SenKind::Nominal);
  };
  if (sen0(s)) return SenClass::Sen0;
  if (s->kind == SenKind::At && sen0(s->subs[0])) return SenClass::SenB;
  return SenClass::Full;
}

std::string sen_class_name(SenClass c) {
  switch (c) {
    case SenClass::Sen0: return "Sen0";
    case SenClass::SenB: return "SenB";
    case SenClass::Full: return "Full";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<Term> ground_terms(const Scope& scope, int depth) {
  std::vector<std::optional<std::string>> tags{std::nullopt};
  for (const auto& k : scope.sig()->nominals) tags.emplace_back(k);
  for (const auto& v : scope.bound())
    if (v.is_nominal()) tags.emplace_back(v.name);

  std::vector<FunSym> funs(scope.sig()->funs.begin(), scope.sig()->funs.end());
  for (const auto& v : scope.bound())
    if (!v.is_nominal()) funs.push_back(v.as_constant());

  std::vector<Term> all;
  std::set<std::string> seen;
  auto add = [&](const Term& t) {
    if (seen.insert(t->key).second) all.push_back(t);
  };
  for (int d = 0; d <= depth; ++d) {
    std::vector<Term> prior = all;
    for (const auto& f : funs) {
      if ((d == 0) != f.arity.empty()) continue;
      bool rigid = scope.is_rigid_fun(f);
      for (const auto& tag : tags) {
        if (rigid && tag) continue;
        // Candidate arguments per position.
        std::vector<std::vector<Term>> cand(f.arity.size());
        for (size_t i = 0; i < f.arity.size(); ++i) {
          HybridSort want{f.arity[i], scope.is_rigid_sort(f.arity[i]) ? std::nullopt : tag};
          for (const auto& t : prior)
            if (shallow_sort(scope, *t) == want) cand[i].push_back(t);
        }
        if (std::any_of(cand.begin(), cand.end(), [](const auto& c) { return c.empty(); })) continue;
        std::vector<size_t> idx(f.arity.size(), 0);
        while (true) {
          std::vector<Term> args;
          for (size_t i = 0; i < idx.size(); ++i) args.push_back(cand[i][idx[i]]);
          add(make_app(scope, f, std::move(args), tag));
          size_t i = 0;
          while (i < idx.size() && ++idx[i] == cand[i].size()) idx[i++] = 0;
          if (i == idx.size()) break;
        }
      }
    }
  }
  std::sort(all.begin(), all.end(), [](const Term& a, const Term& b) { return a->key < b->key; });
  return all;
}

namespace {

std::vector<Sentence> atoms(const Scope& scope, const EnumBudget& b) {
  std::vector<Sentence> out;
  std::vector<std::string> noms(scope.sig()->nominals.begin(), scope.sig()->nominals.end());
  for (const auto& v : scope.bound())
    if (v.is_nominal()) noms.push_back(v.name);
  for (const auto& k : noms) out.push_back(sen::nominal(scope, k));
  for (const auto& m : scope.sig()->modalities)
    if (m.rank == 2)
      for (const auto& k : noms) out.push_back(sen::diamond(scope, m.name, sen::nominal(scope, k)));

  auto terms = ground_terms(scope, b.term_depth);
  std::vector<HybridSort> sorts;
  for (const auto& t : terms) sorts.push_back(shallow_sort(scope, *t));
  for (size_t i = 0; i < terms.size(); ++i)
    for (size_t j = i; j < terms.size(); ++j)
      if (sorts[i] == sorts[j]) out.push_back(sen::eq(scope, terms[i], terms[j]));

  const auto& sig = *scope.sig();
  for (size_t r = 0; r < sig.rels.size(); ++r) {
    std::vector<std::optional<std::string>> tags{std::nullopt};
    if (!sig.rel_rigid[r])
      for (const auto& k : noms) tags.emplace_back(k);
    for (const auto& tag : tags) {
      const auto& ar = sig.rels[r].arity;
      std::vector<std::vector<Term>> cand(ar.size());
      for (size_t i = 0; i < ar.size(); ++i) {
        HybridSort want{ar[i], scope.is_rigid_sort(ar[i]) ? std::nullopt : tag};
        for (size_t t = 0; t < terms.size(); ++t)
          if (sorts[t] == want) cand[i].push_back(terms[t]);
      }
      if (std::any_of(cand.begin(), cand.end(), [](const auto& c) { return c.empty(); })) continue;
      std::vector<size_t> idx(ar.size(), 0);
      while (true) {
        std::vector<Term> args;
        for (size_t i = 0; i < idx.size(); ++i) args.push_back(cand[i][idx[i]]);
        out.push_back(sen::rel(scope, sig.rels[r], std::move(args), tag));
        size_t i = 0;
        while (i < idx.size() && ++idx[i] == cand[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Sentence& a, const Sentence& b) { return a->key < b->key; });
  return out;
}

struct Enumerator {
  const EnumBudget& b;
  std::vector<Sentence> out;
  std::set<std::string> seen;

  bool full() const { return out.size() >= b.max_count; }
  bool add(const Sentence& s) {
    if (full()) return false;
    if (seen.insert(s->key).second) out.push_back(s);
    return !full();
  }

  void run(const Scope& scope, int depth) {
    for (const auto& a : atoms(scope, b))
      if (!add(a)) return;
    size_t level_begin = 0;
    for (int d = 1; d <= depth && !full(); ++d) {
      size_t level_end = out.size();
      std::vector<Sentence> prior(out.begin(), out.begin() + level_end);
      auto fresh_from = [&](size_t i) { return i >= level_begin; };
      // Unary operators over the previous level.
      for (size_t i = level_begin; i < level_end; ++i) {
        const auto& s = prior[i];
        if (!add(sen::neg(s))) return;
        for (const auto& k : scope.sig()->nominals)
          if (!add(sen::at(scope, k, s))) return;
        for (const auto& v : scope.bound())
          if (v.is_nominal() && !add(sen::at(scope, v.name, s))) return;
        for (const auto& m : scope.sig()->modalities)
          if (m.rank == 2 && !add(sen::diamond(scope, m.name, s))) return;
      }
      // Binders over bodies of depth d-1 in the extended scope.
      if (b.binders) {
        std::vector<std::string> bsorts{kNom};
        for (size_t s = 0; s < scope.sig()->sorts.size(); ++s)
          if (scope.sig()->sort_rigid[s]) bsorts.push_back(scope.sig()->sorts[s]);
        for (const auto& bs : bsorts) {
          Variable x = scope.variable(scope.fresh_name("v"), bs);
          Scope inner = scope.with(x);
          EnumBudget ib = b;
          ib.max_count = b.max_count - out.size();
          Enumerator sub{ib, {}, {}};
          sub.run(inner, d - 1);
          for (const auto& body : sub.out) {
            if (sentence_depth(body) != d - 1) continue;
            if (bs == kNom && !add(sen::store(scope, x, body))) return;
            if (!add(sen::exists(scope, x, body))) return;
          }
        }
      }
      // Disjunctions of up to or_fanout members, at least one from the previous level.
      if (d == 1 && !add(sen::disj({}))) return;
      std::vector<size_t> pick;
      std::function<bool(size_t, bool)> rec = [&](size_t start, bool has_fresh) -> bool {
        if (!pick.empty() && has_fresh) {
          std::vector<Sentence> subs;
          for (size_t i : pick) subs.push_back(prior[i]);
          if (!add(sen::disj(std::move(subs)))) return false;
        }
        if (static_cast<int>(pick.size()) == b.or_fanout) return true;
        for (size_t i = start; i < level_end; ++i) {
          pick.push_back(i);
          bool ok = rec(i + 1, has_fresh || fresh_from(i));
          pick.pop_back();
          if (!ok) return false;
        }
        return true;
      };
      if (b.or_fanout > 0 && !rec(0, false)) return;
      level_begin = level_end;
    }
  }
};

}  // namespace

std::vector<Sentence> enumerate_sentences(const Scope& scope, int depth, const EnumBudget& budget) {
  Enumerator e{budget, {}, {}};
  e.run(scope, depth);
  return e.out;
}

}  // namespace hwb
