#include <doctest.h>

#include <random>

#include "hwb/oracle.hpp"
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

bool holds_somewhere(const KripkeStructure& m, const std::vector<Compiled>& gamma) {
  for (int w = 0; w < m.num_worlds(); ++w) {
    bool all = true;
    for (const auto& c : gamma) all = all && evaluate(m, w, *c) == Truth::True;
    if (all) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("classic presentation is satisfiable and forces an empty guarded sort") {
    Document d = load_corpus("classic.hwb");
    SigPtr sig = d.signature("Classic2");
    const auto& gamma = d.presentation("Gamma2").sentences;
    OracleVerdict v = find_model(sig, gamma, closed(2, 1));
    REQUIRE(v.tag == VerdictTag::Satisfiable);
    const auto& m = v.witness->model;
    CHECK((m.carriers[0][0].empty() || m.carriers[1][0].empty()));

    Scope sc(sig);
    std::vector<Compiled> cg;
    for (const auto& s : gamma) cg.push_back(compile(sc, s));
    std::size_t models = 0;
    enumerate_models(sig, closed(2, 1), [&](const KripkeStructure& k) {
      if (holds_somewhere(k, cg)) {
        ++models;
        CHECK((k.carriers[0][0].empty() || k.carriers[1][0].empty()));
      }
      return true;
    });
    CHECK(models > 0);
  }

  TEST_CASE("contradiction has no model in the closed class") {
    Document d = parse_document("signature S { nominals k; }");
    SigPtr sig = d.signature("S");
    Scope sc(sig);
    OracleVerdict v = find_model(sig, {parse_sentence(sc, "k"), parse_sentence(sc, "not k")}, closed(3, 1));
    CHECK(v.tag == VerdictTag::ExhaustedComplete);
    CHECK(!v.found());
    SearchBounds open = closed(3, 1);
    open.mode = SearchMode::Open;
    CHECK(find_model(sig, {parse_sentence(sc, "k"), parse_sentence(sc, "not k")}, open).tag ==
          VerdictTag::NoneWithinBounds);
  }

  TEST_CASE("empty presentation has a one-world model") {
    Document d = parse_document("signature S { nominals k; }");
    OracleVerdict v = find_model(d.signature("S"), {}, SearchBounds{});
    REQUIRE(v.tag == VerdictTag::Satisfiable);
    CHECK(v.witness->model.num_worlds() == 1);
    CHECK(v.witness->world == 0);
  }

  TEST_CASE("entailment: members are entailed, existence over an empty sort is not") {
    Document d = load_corpus("classic.hwb");
    SigPtr sig = d.signature("Classic2");
    const auto& gamma = d.presentation("Gamma2").sentences;
    for (const auto& g : gamma) CHECK(entails(sig, gamma, g, closed(2, 1)).tag == VerdictTag::ExhaustedComplete);

    Document e = load_corpus("empty.hwb");
    SearchBounds b = closed(1, 0);
    OracleVerdict r =
        entails(e.signature("E"), {}, parse_sentence(Scope(e.signature("E")), "exists x : Elt . true"), b);
    REQUIRE(r.tag == VerdictTag::Refuted);
    CHECK(r.witness->model.carriers[0][0].empty());
  }

  TEST_CASE("a counterexample premise does not entail a base sentence") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const auto& sq = d.square("sort_injectivity");
    Sentence phi = parse_sentence(Scope(sq.chi.source), "<lam> top");
    Sentence translated = translate(sq.chi, phi);
    OracleVerdict v = entails(sq.chi.target, {d.sentence("phi_a")}, translated, closed(1, 2));
    REQUIRE(v.tag == VerdictTag::Refuted);
    const auto& ma = d.model("Ma");
    int w4 = ma.world_index("w4");
    CHECK(satisfies({&ma, w4}, d.sentence("phi_a")));
    CHECK(!satisfies({&ma, w4}, translated));
  }

  TEST_CASE("pointed entailment evaluates the goal at the named world") {
    Document d = parse_document("signature S { nominals k, j; modality l : nom nom; }");
    SigPtr sig = d.signature("S");
    Scope sc(sig);
    Sentence edge = parse_sentence(sc, "@k <l> j");
    CHECK(entails_at(sig, {edge}, "k", parse_sentence(sc, "<l> j"), closed(2, 0)).exhausted());
    OracleVerdict v = entails_at(sig, {edge}, "j", parse_sentence(sc, "<l> j"), closed(2, 0));
    REQUIRE(v.tag == VerdictTag::Refuted);
    const auto& m = v.witness->model;
    CHECK(!m.edge(0, m.nom_val[1], m.nom_val[1]));
  }

  TEST_CASE("models with undefined constants are outside the class") {
    Document d = parse_document("signature S { rigid sorts E; rigid op c : -> E; }");
    SigPtr sig = d.signature("S");
    Scope sc(sig);
    CHECK(find_model(sig, {parse_sentence(sc, "forall x : E . bot")}, closed(2, 2)).exhausted());
    std::size_t n = enumerate_models(sig, closed(1, 2), [](const KripkeStructure&) { return true; });
    CHECK(n == 3);  // |E| = 1 with one table, |E| = 2 with two
  }

  TEST_CASE("pruned search agrees with plain generate-and-test") {
    Document d = parse_document(R"(
      signature S { nominals k; modality l : nom nom; rigid sorts E; sorts F;
                    rigid op c : -> E; op g : E -> F; rel P : F; })");
    SigPtr sig = d.signature("S");
    Scope sc(sig);
    EnumBudget eb;
    eb.max_count = 4000;
    auto pool = enumerate_sentences(sc, 2, eb);
    REQUIRE(pool.size() > 50);
    std::mt19937 rng(20261016);
    SearchBounds b = closed(2, 1);
    int agree = 0, sat = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
      std::vector<Sentence> gamma;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      int n = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i) gamma.push_back(pool[pick(rng)]);
      OracleVerdict v = find_model(sig, gamma, b);
      std::vector<Compiled> cg;
      for (const auto& s : gamma) cg.push_back(compile(sc, s));
      std::optional<KripkeStructure> first;
      enumerate_models(sig, b, [&](const KripkeStructure& m) {
        if (holds_somewhere(m, cg)) first = m;
        return !first;
      });
      bool same = first.has_value() == v.found() && (!first || *first == v.witness->model);
      agree += same;
      sat += v.found();
    }
    CHECK(agree == trials);
    CHECK(sat > 0);
    CHECK(sat < trials);
  }

  TEST_CASE("enlarging bounds keeps satisfiable verdicts") {
    Document d = load_corpus("classic.hwb");
    SigPtr sig = d.signature("Classic3");
    const auto& gamma = d.presentation("Gamma3").sentences;
    bool seen = false;
    for (int w = 1; w <= 3; ++w)
      for (int c = 0; c <= 1; ++c) {
        bool found = find_model(sig, gamma, closed(w, c)).found();
        if (seen) CHECK(found);
        seen = seen || found;
      }
    CHECK(seen);
  }

  TEST_CASE("verdicts are deterministic") {
    Document d = load_corpus("sound.hwb");
    SigPtr sig = d.signature("Sigma");
    const auto& gamma = d.presentation("Gamma").sentences;
    OracleVerdict a = find_model(sig, gamma, closed(1, 2));
    OracleVerdict b = find_model(sig, gamma, closed(1, 2));
    REQUIRE(a.found());
    CHECK(a.witness->model == b.witness->model);
    CHECK(a.nodes == b.nodes);
    CHECK(to_json(a) == to_json(b));
  }

  TEST_CASE("budget exhaustion is an error, not a verdict") {
    Document d = load_corpus("sound.hwb");
    SearchBounds b = closed(1, 2);
    b.budget = 50;
    CHECK_THROWS_AS(find_model(d.signature("Sigma"), {parse_sentence(Scope(d.signature("Sigma")), "true != true")}, b), BudgetExceeded);
  }

  TEST_CASE("bounds are validated") {
    Document d = load_corpus("empty.hwb");
    SearchBounds b;
    b.carrier["Nope"] = 1;
    CHECK_THROWS_AS(find_model(d.signature("E"), {}, b), PreconditionFailed);
    SearchBounds z;
    z.max_worlds = 0;
    CHECK_THROWS_AS(find_model(d.signature("E"), {}, z), PreconditionFailed);
  }

  TEST_CASE("domain spec pins sizes") {
    Document d = load_corpus("empty.hwb");
    SearchBounds b = closed(3, 2);
    b.domain = DomainSpec{2, {{"Elt", 1}}};
    std::size_t n = enumerate_models(d.signature("E"), b, [](const KripkeStructure& m) {
      CHECK(m.num_worlds() == 2);
      CHECK(m.carriers[0][0].size() == 1);
      return true;
    });
    CHECK(n == 1);
  }

  TEST_CASE("verdict JSON") {
    Document d = load_corpus("empty.hwb");
    SearchBounds b = closed(1, 0);
    auto v = entails(d.signature("E"), {}, parse_sentence(Scope(d.signature("E")), "exists x : Elt . true"), b);
    auto j = to_json(v);
    CHECK(j["tag"] == "Refuted");
    CHECK(j["witness"]["world"] == "w0");
    CHECK(j["boundsUsed"]["mode"] == "closed");
    CHECK(j["nodesVisited"].get<std::size_t>() == v.nodes);
  }
}
