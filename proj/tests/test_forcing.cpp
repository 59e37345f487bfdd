#include <doctest.h>

#include <random>

#include "hwb/forcing.hpp"
#include "hwb/textio.hpp"
#include "support.hpp"

using namespace hwb;
using hwb::test::load_corpus;

namespace {

SearchBounds closed(int worlds, int carrier) {
  SearchBounds b;
  b.max_worlds = worlds;
  b.max_carrier = carrier;
  b.mode = SearchMode::Closed;
  return b;
}

const char* kSmall = R"(
signature S {
  nominals k;
  modality lam : nom nom;
  rigid sorts E;
  sorts A;
  op c : -> A;
  op d : -> A;
  op e : -> A;
}
)";

struct Small {
  Document doc = parse_document(kSmall);
  SigPtr sig = doc.signature("S");
  Scope sc{sig};
  Sentence s(const std::string& text) const { return parse_sentence(sc, text); }
  Condition cond(const std::vector<std::string>& texts, const SearchBounds& b) const {
    std::vector<Sentence> g;
    for (const auto& t : texts) g.push_back(s(t));
    return initial_condition(sig, g, b);
  }
};

bool model_satisfies_chain(const GenericRun& run) {
  const auto& m = run.model.model;
  int w = m.nom_val[run.chain.back().sig->nominal_index(run.point)];
  for (const auto& p : run.chain)
    for (const auto& s : p.gamma)
      if (truth({&m, w}, s) != Truth::True) return false;
  return true;
}

}  // namespace

TEST_SUITE("forcing") {
  TEST_CASE("atoms are forced exactly when their retrieve is a member") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k (c = d)"}, b);
    CHECK(forces(p, "k", t.s("c = d"), b) == Truth::True);
    CHECK(forces(p, "k", t.s("c = e"), b) == Truth::False);
    CHECK(forces(p, "k", t.s("k"), b) == Truth::True);
    CHECK(p.f().size() == 1);
  }

  TEST_CASE("the empty disjunction is never forced") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k (c = d)"}, b);
    CHECK(forces(p, "k", sen::disj({}), b) == Truth::False);
    CHECK(forces(p, "k", sen::neg(sen::disj({})), b) == Truth::True);
  }

  TEST_CASE("double negation of a member atom is forced in closed mode") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k (c = d)"}, b);
    CHECK(forces(p, "k", t.s("not not (c = d)"), b) == Truth::True);
    CHECK(forces(p, "k", t.s("not (c = d)"), b) == Truth::False);
  }

  TEST_CASE("weak forcing differs from forcing on a disjunction") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k or { c = d; c = e; }"}, b);
    Sentence phi = t.s("or { c = d; c = e; }");
    CHECK(weak_forces(p, "k", phi, b) == Truth::True);
    CHECK(forces(p, "k", phi, b) == Truth::False);
    CHECK(weak_forces(p, "k", t.s("c = d"), b) == Truth::False);
    Condition q = t.cond({"@k (c = d)"}, b);
    CHECK(weak_forces(q, "k", t.s("c = d"), b) == Truth::True);
    CHECK(weak_forces(q, "k", t.s("c != d"), b) == Truth::False);
  }

  TEST_CASE("sf1 adds the single disjunct") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k or { c = d; }"}, b);
    HenkinPool pool('u');
    Expansion e = expand(p, {ExpandRule::SF1, "k", sen::disj({t.s("c = d")})}, pool, b);
    REQUIRE(e.added.size() == 1);
    CHECK(print_sentence(t.sc, e.added[0]) == print_sentence(t.sc, t.s("@k (c = d)")));
    CHECK(e.fresh.empty());
    CHECK(leq(p, e.q));
    CHECK(forces(e.q, "k", t.s("c = d"), b) == Truth::True);
  }

  TEST_CASE("sf2 adds a nominal witness for a diamond") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k <lam> (c = d)"}, b);
    HenkinPool pool('u');
    Expansion e = expand(p, {ExpandRule::SF2, "k", t.s("<lam> (c = d)")}, pool, b);
    REQUIRE(e.fresh.size() == 1);
    CHECK(e.fresh[0].name == "u0");
    CHECK(e.fresh[0].sort == kNom);
    Scope sq = e.q.scope();
    CHECK(e.added.size() == 2);
    CHECK(e.q.contains(parse_sentence(sq, "@k <lam> u0")));
    CHECK(e.q.contains(parse_sentence(sq, "@u0 (c = d)")));
    CHECK(forces(e.q, "k", t.s("<lam> (c = d)"), b) == Truth::True);
    CHECK(forces(p, "k", t.s("<lam> (c = d)"), b) == Truth::False);
  }

  TEST_CASE("sf3 adds a rigid constant for an existential") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k exists x : E . top"}, b);
    HenkinPool pool('u');
    Expansion e = expand(p, {ExpandRule::SF3, "k", t.s("exists x : E . top")}, pool, b);
    REQUIRE(e.fresh.size() == 1);
    CHECK(e.fresh[0].sort == "E");
    CHECK(!e.q.sig->funs_named(e.fresh[0].name).empty());
    CHECK(leq(p, e.q));
  }

  TEST_CASE("expansion requires a certified trigger") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k (c = d)"}, b);
    HenkinPool pool('u');
    CHECK_THROWS_AS(expand(p, {ExpandRule::SF3, "k", t.s("exists x : E . top")}, pool, b), PreconditionFailed);
    SearchBounds open = b;
    open.mode = SearchMode::Open;
    Condition q = t.cond({"@k (c = d)"}, open);
    CHECK_THROWS_AS(expand(q, {ExpandRule::SF1, "k", t.s("or { c = d; c = e; }")}, pool, open), OracleInconclusive);
  }

  TEST_CASE("inconsistent presentations are rejected") {
    Small t;
    SearchBounds b = closed(2, 2);
    CHECK_THROWS_AS(t.cond({"bot"}, b), PreconditionFailed);
    CHECK_THROWS_AS(build_generic(t.sig, {sen::bot()}, 10, b), PreconditionFailed);
    Condition p = t.cond({"@k (c = d)"}, b);
    CHECK_THROWS_AS(extend(p, {}, {t.s("@k (c != d)")}, b), PreconditionFailed);
  }

  TEST_CASE("henkin pool skips names in use") {
    Document d = parse_document("signature S { nominals u0, u2; }");
    SigPtr sig = d.signature("S");
    Condition p = initial_condition(sig, {}, closed(1, 1));
    HenkinPool pool('u');
    CHECK(pool.fresh(p, kNom).name == "u1");
    CHECK(pool.fresh(p, kNom).name == "u3");
  }

  TEST_CASE("cantor pairing is a bijection with small components") {
    for (std::size_t n = 0; n < 500; ++n) {
      auto [i, j] = cantor_unpair(n);
      CHECK(cantor_pair(i, j) == n);
      CHECK(i <= n);
      CHECK(j <= n);
    }
  }

  TEST_CASE("force_extension builds a forcing condition") {
    Small t;
    SearchBounds b = closed(2, 2);
    Condition p = t.cond({"@k (c = d)"}, b);
    HenkinPool pool('u');
    for (const char* text : {"c = e", "<lam> (c = e)", "exists x : E . top", "or { c = e; d != e; }"}) {
      Sentence phi = t.s(text);
      ForcingExtension fe = force_extension(p, "k", phi, pool, b);
      REQUIRE(fe.consistent == Truth::True);
      REQUIRE(fe.q);
      CHECK(leq(p, *fe.q));
      CHECK(forces(*fe.q, "k", phi, b) == Truth::True);
    }
    ForcingExtension none = force_extension(p, "k", t.s("c != d"), pool, b);
    CHECK(none.consistent == Truth::False);
    CHECK(!none.q);
  }

  TEST_CASE("generic model for the classic presentation") {
    Document d = load_corpus("classic.hwb");
    SigPtr sig = d.signature("Classic2");
    SearchBounds b = closed(2, 1);
    GenericRun run = build_generic(sig, d.presentation("Gamma2").sentences, 60, b);
    CHECK(run.unsatisfied.empty());
    CHECK(model_satisfies_chain(run));
    const auto& m = run.model.model;
    int w = m.nom_val[run.chain.back().sig->nominal_index(run.point)];
    for (const auto& s : d.presentation("Gamma2").sentences) CHECK(truth({&m, w}, s) == Truth::True);
    CHECK((m.carriers[0][0].empty() || m.carriers[1][0].empty()));
    CHECK(is_reachable(m).reachable);
    for (std::size_t i = 1; i < run.chain.size(); ++i) CHECK(leq(run.chain[i - 1], run.chain[i]));
    CHECK(run.transcript.to_json()["result"] == "generic model satisfies every condition");
  }

  TEST_CASE("classical henkin constants make the classic presentation inconsistent") {
    Document d = load_corpus("classic.hwb");
    SigPtr sig = d.signature("Classic2");
    Condition empty{sig, sig, {}, {}, {}};
    std::vector<HenkinConstant> cs{{"h1", "s1", 'u'}, {"h2", "s2", 'u'}};
    SearchBounds b = closed(3, 2);
    CHECK_THROWS_AS(extend(empty, cs, d.presentation("Gamma2").sentences, b), PreconditionFailed);
  }

  TEST_CASE("generic model for a lambda cycle") {
    Small t;
    SearchBounds b = closed(2, 1);
    GenericRun run = build_generic(t.sig, {t.s("@k <lam> <lam> k")}, 40, b);
    CHECK(run.unsatisfied.empty());
    const auto& m = run.model.model;
    CHECK(m.num_worlds() >= 1);
    CHECK(m.num_worlds() <= 2);
    int k = m.nom_val[run.chain.back().sig->nominal_index("k")];
    bool cycle = false;
    for (int v = 0; v < m.num_worlds(); ++v) cycle = cycle || (m.edge(0, k, v) && m.edge(0, v, k));
    CHECK(cycle);
    CHECK(is_reachable(m).reachable);
  }

  TEST_CASE("forcing property laws on chain conditions") {
    Small t;
    SearchBounds b = closed(2, 1);
    GenericRun run = build_generic(t.sig, {t.s("@k <lam> (c = d)"), t.s("@k or { c = e; d = e; }")}, 40, b);
    REQUIRE(run.chain.size() >= 2);
    EnumBudget eb;
    eb.max_count = 60;
    std::vector<Sentence> pool = enumerate_sentences(t.sc, 1, eb);
    for (std::size_t i = 0; i < run.chain.size(); ++i) {
      const Condition& p = run.chain[i];
      for (const auto& phi : pool) {
        Truth pos = forces(p, "k", phi, b), neg = forces(p, "k", sen::neg(phi), b);
        CHECK(!(pos == Truth::True && neg == Truth::True));
        if (pos == Truth::True) {
          CHECK(forces(p, "k", sen::neg(sen::neg(phi)), b) == Truth::True);
          for (std::size_t j = i + 1; j < run.chain.size(); ++j) CHECK(forces(run.chain[j], "k", phi, b) == Truth::True);
        }
      }
    }
  }

  TEST_CASE("semantic forcing agreement on random sentences") {
    Small t;
    SearchBounds b = closed(2, 1);
    Condition p = t.cond({"@k (c = d)", "@k <lam> k"}, b);
    EnumBudget eb;
    eb.max_count = 3000;
    std::vector<Sentence> all = enumerate_sentences(t.sc, 2, eb);
    std::mt19937 rng(7);
    for (int n = 0; n < 25; ++n) {
      const Sentence& phi = all[rng() % all.size()];
      HenkinPool pool('u');
      OracleVerdict v = consistent(p.sig, {p.gamma[0], p.gamma[1], sen::at(t.sc, "k", phi)}, b);
      ForcingExtension fe = force_extension(p, "k", phi, pool, b);
      CHECK(fe.q.has_value() == v.found());
      if (fe.q) CHECK(forces(*fe.q, "k", phi, b) == Truth::True);
    }
  }

  TEST_CASE("interpolant search finds a sentence over the shared signature") {
    Document d = load_corpus("positive_squares.hwb");
    const SignatureSquare& sq = d.square("pos_fresh_rigid");
    Scope sa(sq.chi.target), sb(sq.delta.target);
    Sentence pa = parse_sentence(sa, "@k (a = a)"), pb = parse_sentence(sb, "@k (a = a)");
    InterpolationRun run = dual_chain(sq, pa, pb, 1, 0, closed(2, 1));
    REQUIRE(run.kind == RunKind::Interpolant);
    REQUIRE(run.interpolant);
    Scope sc(sq.chi.source);
    CHECK(entails(sq.chi.target, {pa}, translate(sq.chi, *run.interpolant), closed(2, 1)).exhausted());
    CHECK(entails(sq.delta.target, {translate(sq.delta, *run.interpolant)}, pb, closed(2, 1)).exhausted());
  }

  TEST_CASE("interpolant search reports the bottom interpolant for an unsatisfiable premise") {
    Document d = load_corpus("positive_squares.hwb");
    const SignatureSquare& sq = d.square("pos_identity");
    Scope sc(sq.chi.target);
    InterpolantSearch s = interpolant_search(sq, parse_sentence(sc, "a != a"), parse_sentence(sc, "top"), 1,
                                             closed(2, 1));
    REQUIRE(s.interpolant);
    CHECK(entails(sq.chi.target, {parse_sentence(sc, "a != a")}, *s.interpolant, closed(2, 1)).exhausted());
  }

  TEST_CASE("stored witnesses refute every candidate on the sort injectivity square") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const SignatureSquare& sq = d.square("sort_injectivity");
    WitnessPair hint{d.model("Ma"), 0, d.model("Mb"), 0};
    REQUIRE(certify_pair(sq, d.sentence("phi_a"), d.sentence("phi_b"), hint));
    InterpolantSearch s = interpolant_search(sq, d.sentence("phi_a"), d.sentence("phi_b"), 1, closed(2, 1), {hint});
    CHECK(!s.interpolant);
    REQUIRE(!s.candidates.empty());
    for (const auto& c : s.candidates) CHECK(c.source == "stored-witness");
  }

  TEST_CASE("dual chain returns witnesses for the sort injectivity square") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const SignatureSquare& sq = d.square("sort_injectivity");
    WitnessPair hint{d.model("Ma"), 0, d.model("Mb"), 0};
    InterpolationRun run = dual_chain(sq, d.sentence("phi_a"), d.sentence("phi_b"), 1, 12, closed(2, 2), {hint});
    REQUIRE(run.kind == RunKind::Witnesses);
    REQUIRE(run.witnesses);
    REQUIRE(run.iso);
    CHECK(certify_pair(sq, d.sentence("phi_a"), d.sentence("phi_b"), *run.witnesses));
    CHECK(!run.transcript.result.empty());
  }

  TEST_CASE("dual chain returns witnesses for the operation surjectivity square") {
    Document d = load_corpus("lemma_op_surjectivity.hwb");
    const SignatureSquare& sq = d.square("op_surjectivity");
    WitnessPair hint{d.model("Ma"), 0, d.model("Mb"), 0};
    InterpolationRun run = dual_chain(sq, d.sentence("phi_a"), d.sentence("phi_b"), 1, 12, closed(2, 1), {hint});
    REQUIRE(run.kind == RunKind::Witnesses);
    REQUIRE(run.witnesses);
    CHECK(run.witnesses->a.carriers.size() > 0);
    CHECK(certify_pair(sq, d.sentence("phi_a"), d.sentence("phi_b"), *run.witnesses));
  }

  TEST_CASE("certify_pair rejects pairs that fail the sentences") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const SignatureSquare& sq = d.square("sort_injectivity");
    WitnessPair swapped{d.model("Ma"), 0, d.model("Mb"), 0};
    CHECK(!certify_pair(sq, d.sentence("phi_a"), sen::neg(d.sentence("phi_b")), swapped));
    WitnessPair bad_world{d.model("Ma"), 7, d.model("Mb"), 0};
    CHECK(!certify_pair(sq, d.sentence("phi_a"), d.sentence("phi_b"), bad_world));
  }
}
