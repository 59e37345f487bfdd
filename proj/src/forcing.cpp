#include "hwb/forcing.hpp"

#include <algorithm>
#include <set>

#include "hwb/textio.hpp"

namespace hwb {

namespace {

bool is_atom(const Sentence& s) {
  return s->kind == SenKind::Nominal || classify_sentence(s) == SenClass::Sen0;
}

void collect_bound(const Sentence& s, std::set<std::string>& out) {
  if (s->kind == SenKind::Store || s->kind == SenKind::Exists) out.insert(s->var.name);
  for (const auto& sub : s->subs) collect_bound(sub, out);
}

SigPtr omega(const SigPtr& base, const std::vector<HenkinConstant>& cs) {
  if (cs.empty()) return base;
  std::vector<ConstantDecl> decls;
  for (const auto& c : cs) decls.push_back({c.name, c.sort});
  return extend_with_constants(base, decls).signature;
}

Truth disjoin(Truth a, Truth b) {
  if (a == Truth::True || b == Truth::True) return Truth::True;
  if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
  return Truth::False;
}

bool all_rigid(const Scope& sc, const Term& t) {
  if (t->at || !sc.is_rigid_fun(t->fun)) return false;
  return std::all_of(t->args.begin(), t->args.end(), [&](const Term& a) { return all_rigid(sc, a); });
}

std::vector<Term> rigid_terms(const Scope& sc, const std::string& sort, int depth) {
  std::vector<Term> out;
  for (const auto& t : ground_terms(sc, depth))
    if (t->fun.result == sort && all_rigid(sc, t)) out.push_back(t);
  return out;
}

Sentence instantiate(const Scope& sc, const Sentence& ex, const std::string& name) {
  const Variable& x = ex->var;
  if (x.is_nominal()) return replace_nominal(sc, ex->subs[0], x.name, name);
  return replace_constant(sc, ex->subs[0], x.as_constant(), make_const(sc, FunSym{name, {}, x.sort}));
}

OracleVerdict consistency(const SigPtr& sig, const std::vector<Sentence>& gamma, const Sentence& extra,
                          const SearchBounds& b) {
  std::vector<Sentence> g = gamma;
  g.push_back(extra);
  return find_model(sig, g, b);
}

Truth verdict_truth(const OracleVerdict& v, bool found_means) {
  if (v.found()) return found_means ? Truth::True : Truth::False;
  if (v.exhausted()) return found_means ? Truth::False : Truth::True;
  return Truth::Unknown;
}

}  // namespace

bool Condition::contains(const Sentence& s) const {
  return std::any_of(gamma.begin(), gamma.end(), [&](const Sentence& g) { return g->key == s->key; });
}

std::vector<Sentence> Condition::f() const {
  std::vector<Sentence> out;
  for (const auto& s : gamma)
    if (s->kind == SenKind::At && is_atom(s->subs[0])) out.push_back(s);
  return out;
}

nlohmann::json Condition::to_json() const {
  nlohmann::json j;
  Scope sc = scope();
  j["constants"] = nlohmann::json::array();
  for (const auto& c : constants) j["constants"].push_back({{"name", c.name}, {"sort", c.sort}, {"role", std::string(1, c.role)}});
  j["gamma"] = nlohmann::json::array();
  for (const auto& s : gamma) j["gamma"].push_back(print_sentence(sc, s));
  j["certificate"] = tag_name(certificate.tag);
  return j;
}

bool leq(const Condition& p, const Condition& q) {
  if (p.base->fingerprint != q.base->fingerprint) return false;
  for (const auto& c : p.constants)
    if (std::find(q.constants.begin(), q.constants.end(), c) == q.constants.end()) return false;
  return std::all_of(p.gamma.begin(), p.gamma.end(), [&](const Sentence& s) { return q.contains(s); });
}

Condition extend(const Condition& p, const std::vector<HenkinConstant>& fresh, const std::vector<Sentence>& add,
                 const SearchBounds& bounds) {
  Condition q;
  q.base = p.base;
  q.constants = p.constants;
  q.constants.insert(q.constants.end(), fresh.begin(), fresh.end());
  q.sig = fresh.empty() ? p.sig : omega(p.base, q.constants);
  q.gamma = p.gamma;
  for (const auto& s : add)
    if (!q.contains(s)) q.gamma.push_back(s);
  Scope sc = q.scope();
  for (const auto& s : q.gamma) check_sentence(s, sc);
  q.certificate = find_model(q.sig, q.gamma, bounds);
  if (q.certificate.exhausted()) throw PreconditionFailed("condition is inconsistent in the closed class");
  if (!q.certificate.found()) throw ConsistencyLost("no model of the extended condition within bounds");
  return q;
}

Condition initial_condition(const SigPtr& base, const std::vector<Sentence>& gamma, const SearchBounds& bounds) {
  Condition empty{base, base, {}, {}, {}};
  try {
    return extend(empty, {}, gamma, bounds);
  } catch (const ConsistencyLost& e) {
    throw OracleInconclusive(e.what());
  }
}

HenkinConstant HenkinPool::fresh(const Condition& p, const std::string& sort) {
  std::set<std::string> bound;
  for (const auto& s : p.gamma) collect_bound(s, bound);
  Scope sc = p.scope();
  for (;;) {
    std::string name = std::string(1, role_) + std::to_string(next_++);
    if (!sc.name_in_use(name) && !bound.count(name)) return {name, sort, role_};
  }
}

Truth forces(const Condition& p, const std::string& k, const Sentence& phi, const SearchBounds& bounds) {
  Scope sc = p.scope();
  if (phi->kind == SenKind::Nominal && phi->name == k) return Truth::True;
  if (is_atom(phi)) return p.contains(sen::at(sc, k, phi)) ? Truth::True : Truth::False;
  switch (phi->kind) {
    case SenKind::Or: {
      Truth t = Truth::False;
      for (const auto& s : phi->subs) {
        t = disjoin(t, forces(p, k, s, bounds));
        if (t == Truth::True) break;
      }
      return t;
    }
    case SenKind::Not:
      return verdict_truth(consistency(p.sig, p.gamma, sen::at(sc, k, phi->subs[0]), bounds), false);
    case SenKind::At: return forces(p, phi->name, phi->subs[0], bounds);
    case SenKind::Diamond: {
      Truth t = Truth::False;
      for (const auto& l : p.sig->nominals) {
        if (!p.contains(sen::at(sc, k, sen::diamond(sc, phi->name, sen::nominal(sc, l))))) continue;
        t = disjoin(t, forces(p, l, phi->subs[0], bounds));
        if (t == Truth::True) break;
      }
      return t;
    }
    case SenKind::Store: return forces(p, k, replace_nominal(sc, phi->subs[0], phi->var.name, k), bounds);
    case SenKind::Exists: {
      Truth t = Truth::False;
      if (phi->var.is_nominal()) {
        for (const auto& l : p.sig->nominals) {
          t = disjoin(t, forces(p, k, instantiate(sc, phi, l), bounds));
          if (t == Truth::True) break;
        }
        return t;
      }
      for (const auto& term : rigid_terms(sc, phi->var.sort, bounds.term_depth)) {
        t = disjoin(t, forces(p, k, replace_constant(sc, phi->subs[0], phi->var.as_constant(), term), bounds));
        if (t == Truth::True) break;
      }
      return t;
    }
    default: break;
  }
  throw IllFormedSentence("forces: unexpected sentence form");
}

Truth weak_forces(const Condition& p, const std::string& k, const Sentence& phi, const SearchBounds& bounds) {
  return verdict_truth(entails_at(p.sig, p.gamma, k, phi, bounds), false);
}

std::string rule_name(ExpandRule r) {
  switch (r) {
    case ExpandRule::SF1: return "sf1";
    case ExpandRule::SF2: return "sf2";
    case ExpandRule::SF3: return "sf3";
  }
  return "?";
}

Expansion expand(const Condition& p, const ExpandDirective& d, HenkinPool& pool, const SearchBounds& bounds) {
  Scope sc = p.scope();
  const Sentence& s = d.sentence;
  auto wrap = [&](const Scope& scope, const Sentence& x) { return d.at ? sen::at(scope, *d.at, x) : x; };
  OracleVerdict trigger = entails(p.sig, p.gamma, wrap(sc, s), bounds);
  if (trigger.found()) throw PreconditionFailed(rule_name(d.rule) + ": trigger entailment is refuted");
  if (!trigger.exhausted()) throw OracleInconclusive(rule_name(d.rule) + ": trigger entailment is not certified");

  Expansion out;
  switch (d.rule) {
    case ExpandRule::SF1: {
      if (s->kind != SenKind::Or) throw PreconditionFailed("sf1 needs a disjunction");
      for (const auto& phi : s->subs) {
        Sentence cand = wrap(sc, phi);
        if (consistency(p.sig, p.gamma, cand, bounds).found()) {
          out.added = {cand};
          out.q = extend(p, {}, out.added, bounds);
          return out;
        }
      }
      throw ConsistencyLost("sf1: no disjunct is consistent with the condition within bounds");
    }
    case ExpandRule::SF2: {
      if (s->kind != SenKind::Diamond) throw PreconditionFailed("sf2 needs a diamond");
      if (!d.at) throw PreconditionFailed("sf2 needs a retrieve nominal");
      HenkinConstant c = pool.fresh(p, kNom);
      out.fresh = {c};
      std::vector<HenkinConstant> all = p.constants;
      all.push_back(c);
      Scope sc2(omega(p.base, all));
      out.added = {sen::at(sc2, *d.at, sen::diamond(sc2, s->name, sen::nominal(sc2, c.name))),
                   sen::at(sc2, c.name, s->subs[0])};
      break;
    }
    case ExpandRule::SF3: {
      if (s->kind != SenKind::Exists) throw PreconditionFailed("sf3 needs an existential");
      HenkinConstant c = pool.fresh(p, s->var.sort);
      out.fresh = {c};
      std::vector<HenkinConstant> all = p.constants;
      all.push_back(c);
      Scope sc2(omega(p.base, all));
      out.added = {wrap(sc2, instantiate(sc2, s, c.name))};
      break;
    }
  }
  out.q = extend(p, out.fresh, out.added, bounds);
  return out;
}

namespace {

Condition build_forcing(const Condition& p, const std::string& k, const Sentence& phi, HenkinPool& pool,
                        const SearchBounds& b) {
  Scope sc = p.scope();
  if (forces(p, k, phi, b) == Truth::True) return p;
  if (is_atom(phi)) return extend(p, {}, {sen::at(sc, k, phi)}, b);
  switch (phi->kind) {
    case SenKind::Or: {
      Condition p1 = extend(p, {}, {sen::at(sc, k, phi)}, b);
      for (const auto& s : phi->subs)
        if (consistency(p1.sig, p1.gamma, sen::at(sc, k, s), b).found()) return build_forcing(p1, k, s, pool, b);
      throw ConsistencyLost("no disjunct is consistent within bounds");
    }
    case SenKind::Not: return extend(p, {}, {sen::at(sc, k, phi)}, b);
    case SenKind::At: return build_forcing(p, phi->name, phi->subs[0], pool, b);
    case SenKind::Diamond: {
      Condition p1 = extend(p, {}, {sen::at(sc, k, phi)}, b);
      Expansion e = expand(p1, {ExpandRule::SF2, k, phi}, pool, b);
      return build_forcing(e.q, e.fresh[0].name, phi->subs[0], pool, b);
    }
    case SenKind::Store: return build_forcing(p, k, replace_nominal(sc, phi->subs[0], phi->var.name, k), pool, b);
    case SenKind::Exists: {
      Condition p1 = extend(p, {}, {sen::at(sc, k, phi)}, b);
      Expansion e = expand(p1, {ExpandRule::SF3, k, phi}, pool, b);
      return build_forcing(e.q, k, instantiate(e.q.scope(), phi, e.fresh[0].name), pool, b);
    }
    default: break;
  }
  throw IllFormedSentence("force_extension: unexpected sentence form");
}

}  // namespace

ForcingExtension force_extension(const Condition& p, const std::string& k, const Sentence& phi, HenkinPool& pool,
                                 const SearchBounds& bounds) {
  ForcingExtension out;
  out.consistent = verdict_truth(consistency(p.sig, p.gamma, sen::at(p.scope(), k, phi), bounds), true);
  if (out.consistent == Truth::True) out.q = build_forcing(p, k, phi, pool, bounds);
  return out;
}

std::size_t cantor_pair(std::size_t i, std::size_t j) { return (i + j) * (i + j + 1) / 2 + j; }

std::pair<std::size_t, std::size_t> cantor_unpair(std::size_t n) {
  std::size_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  std::size_t j = n - w * (w + 1) / 2;
  return {w - j, j};
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : steps)
    j["steps"].push_back({{"kind", s.kind}, {"sentence", s.sentence}, {"decision", s.decision}, {"freshConstants", s.fresh}});
  j["result"] = result;
  return j;
}

namespace {

// Scheduled @-sentences of a condition: its rigidified presentation first,
// then enumerated sentences over its signature.
std::vector<Sentence> schedule_for(const Condition& p, const GenericOptions& opts) {
  Scope sc = p.scope();
  std::vector<Sentence> base = p.gamma;
  EnumBudget eb;
  eb.max_count = opts.max_sentences;
  for (const auto& s : enumerate_sentences(sc, opts.sentence_depth, eb)) base.push_back(s);
  std::vector<Sentence> out = rigidify(sc, base);
  if (out.size() > opts.max_sentences) out.resize(opts.max_sentences);
  return out;
}

}  // namespace

GenericRun build_generic(const SigPtr& base, const std::vector<Sentence>& gamma0, std::size_t schedule_budget,
                         const SearchBounds& bounds, const GenericOptions& opts) {
  GenericRun run;
  HenkinPool pool('u');
  Condition empty{base, base, {}, {}, {}};
  HenkinConstant a0 = pool.fresh(empty, kNom);
  run.point = a0.name;
  {
    Scope sc0(omega(base, {a0}));
    std::vector<Sentence> g{sen::nominal(sc0, a0.name)};
    g.insert(g.end(), gamma0.begin(), gamma0.end());
    try {
      run.chain.push_back(extend(empty, {a0}, g, bounds));
    } catch (const ConsistencyLost& e) {
      throw OracleInconclusive(std::string("initial presentation: ") + e.what());
    }
  }
  std::vector<std::vector<Sentence>> schedules;
  for (std::size_t n = 0; n < schedule_budget; ++n) {
    auto [i, j] = cantor_unpair(n);
    if (i >= run.chain.size()) continue;
    while (schedules.size() <= i) schedules.push_back(schedule_for(run.chain[schedules.size()], opts));
    if (j >= schedules[i].size()) continue;
    const Condition& p = run.chain.back();
    Scope sc = p.scope();
    const Sentence& s = schedules[i][j];
    const std::string kappa = s->name;
    const Sentence& gamma = s->subs[0];
    TranscriptStep step;
    step.sentence = print_sentence(sc, s);
    Truth neg = forces(p, kappa, sen::neg(gamma), bounds);
    if (neg == Truth::Unknown) throw OracleInconclusive("cannot decide " + step.sentence);
    Condition q;
    if (neg == Truth::True) {
      step.kind = "negate";
      step.decision = "not";
      q = extend(p, {}, {sen::at(sc, kappa, sen::neg(gamma))}, bounds);
    } else {
      step.kind = "assert";
      step.decision = "holds";
      ForcingExtension fe = force_extension(p, kappa, gamma, pool, bounds);
      if (!fe.q) throw OracleInconclusive("cannot extend " + step.sentence);
      q = extend(*fe.q, {}, {s}, bounds);
      for (std::size_t c = p.constants.size(); c < q.constants.size(); ++c) step.fresh.push_back(q.constants[c].name);
      if (!step.fresh.empty()) step.kind = "witness";
    }
    if (q.gamma.size() != p.gamma.size() || q.constants.size() != p.constants.size()) {
      run.chain.push_back(std::move(q));
      run.transcript.steps.push_back(std::move(step));
    }
  }
  const Condition& last = run.chain.back();
  run.psi = last.f();
  run.model = basic_model(last.sig, run.psi, bounds.term_depth);
  int w = run.model.model.nom_val[last.sig->nominal_index(run.point)];
  Scope sc = last.scope();
  for (const auto& s : last.gamma)
    if (truth({&run.model.model, w}, s) != Truth::True) run.unsatisfied.push_back(print_sentence(sc, s));
  run.transcript.result = run.unsatisfied.empty()
                              ? "generic model satisfies every condition"
                              : "generic model fails " + std::to_string(run.unsatisfied.size()) + " sentences";
  return run;
}

}  // namespace hwb
