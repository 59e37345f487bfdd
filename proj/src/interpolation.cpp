#include <algorithm>
#include <set>

#include "hwb/forcing.hpp"
#include "hwb/textio.hpp"

namespace hwb {

namespace {

bool holds(const KripkeStructure& m, int w, const Sentence& s) {
  try {
    return satisfies({&m, w}, s);
  } catch (const PartialModel&) {
    return false;
  }
}

std::optional<bool> decided(const KripkeStructure& m, int w, const Sentence& s) {
  Truth t = truth({&m, w}, s);
  if (t == Truth::Unknown) return std::nullopt;
  return t == Truth::True;
}

SigPtr omega(const SigPtr& base, const std::vector<HenkinConstant>& cs) {
  if (cs.empty()) return base;
  std::vector<ConstantDecl> decls;
  for (const auto& c : cs) decls.push_back({c.name, c.sort});
  return extend_with_constants(base, decls).signature;
}

// A bridge constant of Delta[C] with its images on the two sides.
struct Bridge {
  HenkinConstant c;
  std::string a, b;
};

// chi_n : Delta[C_n] -> Omega_p extending chi (or delta) on the bridge constants.
SignatureMorphism bridge_morphism(const SignatureMorphism& leg, const SigPtr& source, const SigPtr& target,
                                  const std::vector<Bridge>& bridges, bool side_a) {
  RawMorphism raw = leg.raw();
  for (const auto& br : bridges) {
    const std::string& image = side_a ? br.a : br.b;
    if (br.c.sort == kNom)
      raw.nominals[br.c.name] = image;
    else
      raw.functions.push_back({FunSym{br.c.name, {}, br.c.sort}, image});
  }
  return validate_morphism(source, target, raw, side_a ? "chi_n" : "delta_n");
}

class DualChain {
 public:
  DualChain(const SignatureSquare& sq, int depth, const SearchBounds& b, InterpolationRun& run)
      : sq_(sq), depth_(depth), b_(b), run_(run), pool_a_('u'), pool_b_('o'), pool_c_('c') {}

  void start(const Sentence& phi_a, const Sentence& phi_b) {
    Condition ea{sq_.chi.target, sq_.chi.target, {}, {}, {}};
    Condition eb{sq_.delta.target, sq_.delta.target, {}, {}, {}};
    a0_ = pool_a_.fresh(ea, kNom);
    b0_ = pool_b_.fresh(eb, kNom);
    Scope sa(omega(ea.base, {a0_})), sb(omega(eb.base, {b0_}));
    run_.chain_a.push_back(extend(ea, {a0_}, {sen::nominal(sa, a0_.name), phi_a}, b_));
    run_.chain_b.push_back(extend(eb, {b0_}, {sen::nominal(sb, b0_.name), sen::neg(phi_b)}, b_));
    Condition ec{sq_.chi.source, sq_.chi.source, {}, {}, {}};
    bridges_.push_back({pool_c_.fresh(ec, kNom), a0_.name, b0_.name});
  }

  void step(std::size_t n) {
    bool side_a = n % 2 == 0;
    auto [i, j] = cantor_unpair(n / 2);
    auto& chain = side_a ? run_.chain_a : run_.chain_b;
    auto& sched = side_a ? sched_a_ : sched_b_;
    if (i >= chain.size()) return;
    while (sched.size() <= i) sched.push_back(schedule(chain[sched.size()]));
    if (j >= sched[i].size()) return;
    const Condition& p = chain.back();
    const Condition& other = side_a ? run_.chain_b.back() : run_.chain_a.back();
    Scope sc = p.scope();
    const Sentence& s = sched[i][j];
    const std::string kappa = s->name;
    const Sentence& gamma = s->subs[0];
    TranscriptStep st;
    st.sentence = std::string(side_a ? "a: " : "b: ") + print_sentence(sc, s);

    Condition next;
    std::vector<HenkinConstant> other_fresh;
    Truth neg = forces(p, kappa, sen::neg(gamma), b_);
    if (neg == Truth::Unknown) throw OracleInconclusive("cannot decide " + st.sentence);
    if (neg == Truth::True) {
      st.kind = "negate";
      st.decision = "not";
      next = extend(p, {}, {sen::at(sc, kappa, sen::neg(gamma))}, b_);
    } else {
      Condition with = extend(p, {}, {s}, b_);
      if (auto phi = separates(side_a ? with : other, side_a ? other : with)) {
        st.kind = "joint-negate";
        st.decision = "not";
        next = extend(p, {}, {sen::at(sc, kappa, sen::neg(gamma))}, b_);
      } else {
        st.decision = "holds";
        HenkinPool& own = side_a ? pool_a_ : pool_b_;
        ForcingExtension fe = force_extension(p, kappa, gamma, own, b_);
        if (!fe.q) throw OracleInconclusive("cannot extend " + st.sentence);
        next = extend(*fe.q, {}, {s}, b_);
        std::vector<HenkinConstant> own_fresh(next.constants.begin() + p.constants.size(), next.constants.end());
        st.kind = own_fresh.empty() ? "assert" : "witness";
        // Bridge constants for every base sort mapped onto a witness sort.
        const SignatureMorphism& leg = side_a ? sq_.chi : sq_.delta;
        const SignatureMorphism& far = side_a ? sq_.delta : sq_.chi;
        HenkinPool& far_pool = side_a ? pool_b_ : pool_a_;
        for (const auto& a : own_fresh) {
          st.fresh.push_back(a.name);
          std::vector<std::string> base_sorts;
          if (a.sort == kNom)
            base_sorts.push_back(kNom);
          else
            for (const auto& s0 : leg.source->sorts)
              if (leg.source->is_rigid_sort(s0) && leg.map_sort(s0) == a.sort) base_sorts.push_back(s0);
          for (const auto& s0 : base_sorts) {
            HenkinConstant c{pool_c_.fresh(bridge_probe(), s0).name, s0, 'c'};
            std::string far_sort = s0 == kNom ? kNom : far.map_sort(s0);
            Condition probe = other;
            probe.constants.insert(probe.constants.end(), other_fresh.begin(), other_fresh.end());
            probe.sig = omega(probe.base, probe.constants);
            HenkinConstant bconst = far_pool.fresh(probe, far_sort);
            other_fresh.push_back(bconst);
            bridges_.push_back({c, side_a ? a.name : bconst.name, side_a ? bconst.name : a.name});
            st.fresh.push_back(c.name);
            st.fresh.push_back(bconst.name);
          }
        }
      }
    }
    bool grew = next.gamma.size() != p.gamma.size() || next.constants.size() != p.constants.size();
    if (grew) chain.push_back(std::move(next));
    if (!other_fresh.empty()) {
      auto& far_chain = side_a ? run_.chain_b : run_.chain_a;
      far_chain.push_back(extend(far_chain.back(), other_fresh, {}, b_));
    }
    if (grew || !other_fresh.empty()) {
      run_.transcript.steps.push_back(st);
      if (auto phi = separates(run_.chain_a.back(), run_.chain_b.back()))
        throw JointConsistencyLost("step " + std::to_string(n) + " (" + st.sentence + ") separated by " + *phi);
    }
  }

  const HenkinConstant& a0() const { return a0_; }
  const HenkinConstant& b0() const { return b0_; }

 private:
  std::vector<Sentence> schedule(const Condition& p) const {
    Scope sc = p.scope();
    std::vector<Sentence> base = p.gamma;
    EnumBudget eb;
    eb.max_count = 200;
    for (const auto& s : enumerate_sentences(sc, 1, eb)) base.push_back(s);
    return rigidify(sc, base);
  }

  // Delta[C_n] as a condition, used only to allocate unused bridge names.
  Condition bridge_probe() const {
    std::vector<HenkinConstant> cs;
    for (const auto& br : bridges_) cs.push_back(br.c);
    return {sq_.chi.source, omega(sq_.chi.source, cs), cs, {}, {}};
  }

  // A Delta[C_n]-sentence phi with Gamma_a |= chi_n(phi) and Gamma_b |= delta_n(not phi).
  std::optional<std::string> separates(const Condition& pa, const Condition& pb) {
    std::vector<Bridge> usable;
    std::set<std::string> in_a, in_b;
    for (const auto& c : pa.constants) in_a.insert(c.name);
    for (const auto& c : pb.constants) in_b.insert(c.name);
    for (const auto& br : bridges_)
      if (in_a.count(br.a) && in_b.count(br.b)) usable.push_back(br);
    std::vector<HenkinConstant> cs;
    for (const auto& br : usable) cs.push_back(br.c);
    SigPtr dc = omega(sq_.chi.source, cs);
    SignatureMorphism chi_n = bridge_morphism(sq_.chi, dc, pa.sig, usable, true);
    SignatureMorphism delta_n = bridge_morphism(sq_.delta, dc, pb.sig, usable, false);
    Scope sc(dc);
    EnumBudget eb;
    eb.max_count = 120;
    for (const auto& phi : enumerate_sentences(sc, std::min(depth_, 1), eb)) {
      OracleVerdict va = entails(pa.sig, pa.gamma, translate(chi_n, phi), b_);
      if (!va.exhausted()) continue;
      OracleVerdict vb = entails(pb.sig, pb.gamma, translate(delta_n, sen::neg(phi)), b_);
      if (vb.exhausted()) return print_sentence(sc, phi);
    }
    return std::nullopt;
  }

  const SignatureSquare& sq_;
  int depth_;
  const SearchBounds& b_;
  InterpolationRun& run_;
  HenkinPool pool_a_, pool_b_, pool_c_;
  HenkinConstant a0_, b0_;
  std::vector<Bridge> bridges_;
  std::vector<std::vector<Sentence>> sched_a_, sched_b_;
};

}  // namespace

std::optional<ModelMorphism> certify_pair(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b,
                                          const WitnessPair& pair) {
  if (pair.wa < 0 || pair.wa >= pair.a.num_worlds() || pair.wb < 0 || pair.wb >= pair.b.num_worlds())
    return std::nullopt;
  auto sa = decided(pair.a, pair.wa, phi_a);
  auto sb = decided(pair.b, pair.wb, phi_b);
  if (!sa || !*sa || !sb || *sb) return std::nullopt;
  KripkeStructure ra = reduct(sq.chi, pair.a), rb = reduct(sq.delta, pair.b);
  return quasi_isomorphic(ra, rb, std::make_pair(pair.wa, pair.wb));
}

InterpolantSearch interpolant_search(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b,
                                     int depth, const SearchBounds& bounds, const std::vector<WitnessPair>& hints) {
  InterpolantSearch out;
  std::vector<const WitnessPair*> usable;
  for (const auto& h : hints)
    if (holds(h.a, h.wa, phi_a) && !holds(h.b, h.wb, phi_b)) usable.push_back(&h);
  Scope sc(sq.chi.source);
  for (const auto& phi : enumerate_sentences(sc, depth)) {
    Sentence ca = translate(sq.chi, phi), cb = translate(sq.delta, phi);
    CandidateOutcome o{phi, "unknown", "oracle"};
    for (const auto* h : usable) {
      auto ta = decided(h->a, h->wa, ca);
      if (!ta) continue;
      if (!*ta) {
        o = {phi, "refuted-a", "stored-witness"};
        break;
      }
      auto tb = decided(h->b, h->wb, cb);
      if (tb && *tb) {
        o = {phi, "refuted-b", "stored-witness"};
        break;
      }
    }
    if (o.verdict == "unknown") {
      try {
        OracleVerdict va = entails(sq.chi.target, {phi_a}, ca, bounds);
        if (va.found()) {
          o.verdict = "refuted-a";
        } else if (va.exhausted()) {
          OracleVerdict vb = entails(sq.delta.target, {cb}, phi_b, bounds);
          if (vb.found()) o.verdict = "refuted-b";
          else if (vb.exhausted()) o.verdict = "interpolant";
        }
      } catch (const BudgetExceeded&) {
        o.verdict = "unknown";
      }
    }
    out.candidates.push_back(o);
    if (o.verdict == "interpolant") {
      out.interpolant = phi;
      break;
    }
  }
  return out;
}

std::string run_kind_name(RunKind k) {
  switch (k) {
    case RunKind::Interpolant: return "Interpolant";
    case RunKind::Witnesses: return "Witnesses";
    case RunKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

InterpolationRun dual_chain(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b, int depth,
                            std::size_t step_budget, const SearchBounds& bounds,
                            const std::vector<WitnessPair>& hints) {
  InterpolationRun run;
  try {
    OracleVerdict pre = entails(sq.delta_a.target, {translate(sq.delta_a, phi_a)}, translate(sq.chi_b, phi_b), bounds);
    if (pre.found()) throw PreconditionFailed("the translated premise does not entail the translated conclusion");
  } catch (const BudgetExceeded&) {
    run.transcript.steps.push_back({"precondition", "", "budget exhausted; entailment not refuted", {}});
  }

  run.search = interpolant_search(sq, phi_a, phi_b, depth, bounds, hints);
  if (run.search.interpolant) {
    run.kind = RunKind::Interpolant;
    run.interpolant = run.search.interpolant;
    run.transcript.result = "interpolant " + print_sentence(Scope(sq.chi.source), *run.interpolant);
    return run;
  }

  std::string chain_note;
  try {
    DualChain dc(sq, depth, bounds, run);
    dc.start(phi_a, phi_b);
    for (std::size_t n = 0; n < step_budget; ++n) dc.step(n);
    const Condition& pa = run.chain_a.back();
    const Condition& pb = run.chain_b.back();
    WitnessPair pair;
    pair.a = basic_model(pa.sig, pa.f(), bounds.term_depth).model;
    pair.b = basic_model(pb.sig, pb.f(), bounds.term_depth).model;
    pair.wa = pair.a.nom_val[pa.sig->nominal_index(dc.a0().name)];
    pair.wb = pair.b.nom_val[pb.sig->nominal_index(dc.b0().name)];
    WitnessPair base_pair{reduct(inclusion_morphism(sq.chi.target, pa.sig), pair.a), pair.wa,
                          reduct(inclusion_morphism(sq.delta.target, pb.sig), pair.b), pair.wb};
    if (auto iso = certify_pair(sq, phi_a, phi_b, base_pair)) {
      run.kind = RunKind::Witnesses;
      run.witnesses = std::move(base_pair);
      run.iso = std::move(iso);
      run.witness_source = "chains";
      run.transcript.result = "chains yield quasi-isomorphic witnesses";
      return run;
    }
    chain_note = "extracted chain models are not certified witnesses";
  } catch (const Error& e) {
    chain_note = e.kind() + ": " + e.what();
  }
  run.transcript.steps.push_back({"extract", "", chain_note, {}});

  for (const auto& h : hints) {
    if (auto iso = certify_pair(sq, phi_a, phi_b, h)) {
      run.kind = RunKind::Witnesses;
      run.witnesses = h;
      run.iso = std::move(iso);
      run.witness_source = "certified-pair";
      run.transcript.result = "certified witness pair";
      return run;
    }
  }
  run.kind = RunKind::Inconclusive;
  run.reason = chain_note;
  run.transcript.result = "inconclusive: " + chain_note;
  return run;
}

}  // namespace hwb
