#include <doctest.h>

#include "support.hpp"

using namespace hwb;
using hwb::test::load_corpus;

namespace {

std::set<Rule> rules_of(const CriterionReport& r) { return r.rules(); }

}  // namespace

TEST_SUITE("sigcat") {
  TEST_CASE("validation collects every violation") {
    RawSignature raw;
    raw.sort("Bool", true).sort("Elt").op("f", {"Elt"}, "Bool", true).op("g", {"Nope"}, "Bool");
    try {
      validate_signature(raw);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.violations().size() >= 2);
    }
    SigPtr empty = validate_signature(RawSignature{});
    CHECK(empty->sorts.empty());
    CHECK(empty->nominals.empty());
  }

  TEST_CASE("duplicate full profiles are rejected, overloading by arity is allowed") {
    RawSignature ok;
    ok.sort("A").op("f", {}, "A").op("f", {"A"}, "A");
    CHECK(validate_signature(ok)->funs.size() == 2);
    RawSignature bad;
    bad.sort("A").op("f", {}, "A").op("f", {}, "A");
    CHECK_THROWS_AS(validate_signature(bad), ValidationError);
  }

  TEST_CASE("fingerprints identify structurally equal signatures") {
    RawSignature a, b;
    a.sort("A").sort("B").op("c", {}, "A");
    b.op("c", {}, "A").sort("B").sort("A");
    CHECK(validate_signature(a)->fingerprint == validate_signature(b)->fingerprint);
    b.nominal("k");
    CHECK(validate_signature(a)->fingerprint != validate_signature(b)->fingerprint);
  }

  TEST_CASE("morphism validation checks profiles") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const auto& chi = d.morphism("chi");
    CHECK(!chi.injective_on_sorts());
    RawMorphism raw = chi.raw();
    for (auto& [f, g] : raw.functions)
      if (f.name == "c") g = "succ";
    CHECK_THROWS_AS(validate_morphism(chi.source, chi.target, raw), MorphismError);
    auto id = identity_morphism(chi.source);
    CHECK(compose(id, chi) == chi);
    CHECK_THROWS_AS(compose(chi, chi), CompositionError);
  }

  TEST_CASE("corpus squares commute") {
    for (const char* f : {"lemma_preservation.hwb", "lemma_sort_injectivity.hwb",
                          "lemma_op_injectivity_surjectivity.hwb", "lemma_op_surjectivity.hwb"}) {
      CAPTURE(f);
      Document d = load_corpus(f);
      REQUIRE(d.squares.size() == 1);
      const auto& sq = d.squares.begin()->second.square;
      CHECK(compose(sq.chi, sq.delta_a) == compose(sq.delta, sq.chi_b));
    }
  }

  TEST_CASE("pushouts reproduce the printed apexes") {
    Document fo = load_corpus("fo_interpolation.hwb");
    const auto& apex = *fo.square("fo_interpolation").delta_a.target;
    CHECK(apex.sorts == std::vector<std::string>{"Int"});
    std::set<std::string> names;
    for (const auto& f : apex.funs) names.insert(f.name);
    CHECK(names == std::set<std::string>{"c", "d", "pred", "suc"});

    Document os = load_corpus("lemma_op_surjectivity.hwb");
    SignatureSquare po = pushout(os.morphism("chi"), os.morphism("delta"));
    CHECK(po.delta_a.target->fingerprint == os.signature("Dd")->fingerprint);

    Document pos = load_corpus("positive_squares.hwb");
    const auto& id = pos.morphism("id_base");
    SignatureSquare same_sq = pushout(id, id);
    CHECK(same_sq.delta_a.target->fingerprint == id.source->fingerprint);
  }

  TEST_CASE("extension with constants") {
    Document d = load_corpus("classic.hwb");
    SigPtr s = d.signature("Classic2");
    Extension e = extend_with_constants(s, {{"z", kNom}, {"c", "s1"}});
    CHECK(e.signature->nominal_index("z") >= 0);
    CHECK(e.signature->fun_index({"c", {}, "s1"}) >= 0);
    CHECK(extend_with_constants(s, {}).signature->fingerprint == s->fingerprint);
    Document p = load_corpus("lemma_preservation.hwb");
    CHECK_THROWS_AS(extend_with_constants(p.signature("D"), {{"x", "Nat"}}), FlexibleQuantificationError);
  }

  TEST_CASE("criterion rule sets on the counterexample squares") {
    struct Expect {
      const char* file;
      std::set<Rule> chi, delta;
    };
    const Expect cases[] = {
        {"fo_interpolation.hwb", {Rule::SortInjectivity}, {Rule::SortInjectivity}},
        {"lemma_preservation.hwb", {Rule::Preservation}, {Rule::Preservation}},
        {"lemma_sort_injectivity.hwb", {Rule::SortInjectivity}, {Rule::SortInjectivity}},
        {"lemma_op_injectivity_surjectivity.hwb", {Rule::J1}, {Rule::I2}},
        {"lemma_op_surjectivity.hwb", {Rule::J2}, {Rule::J1}},
    };
    for (const auto& c : cases) {
      CAPTURE(c.file);
      Document d = load_corpus(c.file);
      SquareReport r = check_cip_criterion(d.squares.begin()->second.square);
      CHECK(rules_of(r.chi) == c.chi);
      CHECK(rules_of(r.delta) == c.delta);
      CHECK(!r.cip_guaranteed());
      CHECK(r.verdict() == "CIP not guaranteed");
    }
  }

  TEST_CASE("positive squares are guaranteed") {
    Document d = load_corpus("positive_squares.hwb");
    CHECK(d.squares.size() == 5);
    for (const auto& [name, sq] : d.squares) {
      CAPTURE(name);
      CHECK(check_cip_criterion(sq.square).verdict() == "CIP guaranteed");
    }
  }

  TEST_CASE("fragment classification") {
    RawSignature hpl;
    hpl.nominal("k").modality("lam");
    CHECK(classify_fragment(*validate_signature(hpl)) == std::set<std::string>{"HPL"});
    RawSignature rf;
    rf.modality("lam").sort("D", true).op("c", {}, "D");
    CHECK(classify_fragment(*validate_signature(rf)) == std::set<std::string>{"RFOHL"});
    Document p = load_corpus("lemma_preservation.hwb");
    CHECK(classify_fragment(*p.signature("Db")) == std::set<std::string>{"general"});
  }
}
