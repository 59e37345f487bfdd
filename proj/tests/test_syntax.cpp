#include <doctest.h>

#include "hwb/syntax.hpp"
#include "hwb/textio.hpp"
#include "support.hpp"

using namespace hwb;
using hwb::test::load_corpus;

namespace {

const char* kSig = R"(
signature S {
  nominals k1, k2;
  modality lam : nom nom;
  rigid sorts Nat;
  sorts A;
  rigid op zero : -> Nat;
  rigid op suc : Nat -> Nat;
  op c : -> A;
  op d : -> A;
  op g : A -> A;
}
signature Two {
  nominals k;
  modality lam : nom nom;
  modality mu : nom nom;
}
)";

struct Fixture {
  Document doc = parse_document(kSig);
  SigPtr sig = doc.signature("S");
  Scope sc{sig};
  Sentence s(const std::string& text) const { return parse_sentence(sc, text); }
  std::string p(const Sentence& x) const { return print_sentence(sc, x); }
};

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("hybrid sorts of tagged terms") {
    Fixture t;
    CHECK(sort_of(parse_term(t.sc, "c@k1"), t.sc).str() == "@k1 A");
    CHECK(sort_of(parse_term(t.sc, "g@k2(c)"), t.sc).str() == "@k2 A");
    CHECK(sort_of(parse_term(t.sc, "c"), t.sc).str() == "A");
    Term z = parse_term(t.sc, "zero@k1");
    CHECK(sort_of(z, t.sc).str() == "Nat");
    CHECK(!z->at);
    FunSym g{"g", {"A"}, "A"};
    CHECK_THROWS_AS(make_app(t.sc, g, {}), IllFormedTerm);
    CHECK_THROWS_AS(make_app(t.sc, FunSym{"h", {}, "A"}, {}), IllFormedTerm);
  }

  TEST_CASE("equations need equal hybrid sorts") {
    Fixture t;
    CHECK_NOTHROW(t.s("c@k1 = d@k1"));
    CHECK_NOTHROW(t.s("suc(zero) = zero@k2"));
    CHECK_THROWS(t.s("c@k1 = d@k2"));
    CHECK_THROWS(t.s("c = zero"));
  }

  TEST_CASE("quantification only over extended rigid sorts") {
    Fixture t;
    CHECK_NOTHROW(t.s("exists x : Nat . x = zero"));
    CHECK_NOTHROW(t.s("exists z : nom . @z k1"));
    CHECK_THROWS_AS(t.sc.with(t.sc.variable("y", "A")), FlexibleQuantificationError);
  }

  TEST_CASE("disjunctions are canonical sets") {
    Fixture t;
    Sentence a = t.s("or { c = d; k1; c = d; }");
    Sentence b = t.s("or { k1; c = d; }");
    CHECK(same(a, b));
    CHECK(a->subs.size() == 2);
    CHECK(same(sen::disj({}), sen::bot()));
  }

  TEST_CASE("derived operators expand to primitives") {
    Fixture t;
    CHECK(same(sen::top(), sen::neg(sen::disj({}))));
    Variable x = t.sc.variable("x", "Nat");
    Sentence body = parse_sentence(t.sc.with(x), "x = zero");
    Sentence all = sen::forall(t.sc, x, body);
    CHECK(all->kind == SenKind::Not);
    CHECK(all->subs[0]->kind == SenKind::Exists);
    CHECK(all->subs[0]->subs[0]->kind == SenKind::Not);
    CHECK(same(t.s("forall x : Nat . x = zero"), all));
    CHECK(same(sen::box(t.sc, "lam", t.s("k1")), sen::neg(sen::diamond(t.sc, "lam", sen::neg(t.s("k1"))))));
    CHECK_NOTHROW(sen::until(t.sc, t.s("k1"), t.s("k2")));
    Document d = parse_document(kSig);
    Scope two(d.signature("Two"));
    CHECK_THROWS_AS(sen::until(two, parse_sentence(two, "k"), parse_sentence(two, "k")), IllFormedSentence);
  }

  TEST_CASE("translation along the sort injectivity span") {
    Document d = load_corpus("lemma_sort_injectivity.hwb");
    const SignatureMorphism& chi = d.morphism("chi");
    Scope src(chi.source), tgt(chi.target);
    Sentence phi = parse_sentence(src, "exists x : Int . d = x");
    Sentence out = translate(chi, phi);
    CHECK(out->kind == SenKind::Exists);
    CHECK(out->var.sort == "Nat");
    CHECK_NOTHROW(check_sentence(out, tgt));
    Sentence eq = parse_sentence(src, "c = c");
    CHECK(print_sentence(tgt, translate(chi, eq)) == "c = c");
  }

  TEST_CASE("identity translation is structural equality") {
    Fixture t;
    SignatureMorphism id = identity_morphism(t.sig);
    for (const char* text : {"c = d", "@k1 <lam> (g(c) = d)", "store z . <lam> z", "forall x : Nat . suc(x) != x"}) {
      Sentence x = t.s(text);
      CHECK(same(translate(id, x), x));
    }
  }

  TEST_CASE("binders are renamed when translation clashes") {
    const char* text = R"(
signature P { rigid sorts N; op c : -> N; }
signature Q { rigid sorts N; op c : -> N; op x : -> N; }
morphism inc : P -> Q { }
)";
    Document d = parse_document(text);
    const SignatureMorphism& inc = d.morphism("inc");
    Scope sp(inc.source), sq(inc.target);
    Sentence out = translate(inc, parse_sentence(sp, "exists x : N . x = c"));
    CHECK(out->var.name != "x");
    CHECK_NOTHROW(check_sentence(out, sq));
  }

  TEST_CASE("substitutions instantiate constants and nominals") {
    Fixture t;
    Variable x = t.sc.variable("x", "Nat");
    Substitution theta;
    theta.source = extend_with_constants(t.sig, {{"x", "Nat"}}).signature;
    theta.target = t.sig;
    theta.constants.push_back({x.as_constant(), parse_term(t.sc, "zero")});
    validate_substitution(theta);
    Scope ssrc(theta.source);
    Sentence in = parse_sentence(ssrc, "x = suc(x)");
    CHECK(t.p(apply_substitution(theta, in)) == "zero = suc(zero)");

    Substitution id{t.sig, t.sig, {}, {}};
    Sentence s = t.s("@k1 (c = d)");
    CHECK(same(apply_substitution(id, s), s));

    Substitution nom;
    nom.source = extend_with_constants(t.sig, {{"z", kNom}}).signature;
    nom.target = t.sig;
    nom.nominals.push_back({"z", "k2"});
    validate_substitution(nom);
    Scope nsrc(nom.source);
    Sentence out = apply_substitution(nom, parse_sentence(nsrc, "@z <lam> k1"));
    CHECK_NOTHROW(check_sentence(out, t.sc));
    CHECK(t.p(out) == "@k2 <lam> k1");

    Substitution bad = theta;
    bad.constants[0].second = parse_term(t.sc, "c");
    CHECK_THROWS(validate_substitution(bad));
  }

  TEST_CASE("rigidification") {
    Fixture t;
    auto r = rigidify(t.sc, t.s("c = d"));
    REQUIRE(r.size() == 2);
    CHECK(t.p(r[0]) == "@k1 c = d");
    CHECK(t.p(r[1]) == "@k2 c = d");
    auto r2 = rigidify(t.sc, t.s("@k2 <lam> k1"));
    REQUIRE(r2.size() == 1);
    CHECK(t.p(r2[0]) == "@k2 <lam> k1");
    Document d = parse_document("signature E { rigid sorts N; op c : -> N; }");
    Scope e(d.signature("E"));
    CHECK(rigidify(e, parse_sentence(e, "c = c")).empty());
  }

  TEST_CASE("sentence classes") {
    Fixture t;
    CHECK(classify_sentence(t.s("<lam> k2")) == SenClass::Sen0);
    CHECK(classify_sentence(t.s("c = d")) == SenClass::Sen0);
    CHECK(classify_sentence(t.s("@k1 (c = d)")) == SenClass::SenB);
    CHECK(classify_sentence(t.s("@k1 <lam> k2")) == SenClass::SenB);
    CHECK(classify_sentence(t.s("not (c = d)")) == SenClass::Full);
    CHECK(classify_sentence(t.s("@k1 @k2 k1")) == SenClass::Full);
    CHECK(sen_class_name(SenClass::SenB) == "SenB");
  }

  TEST_CASE("store normalization replaces the bound nominal") {
    Fixture t;
    Sentence s = t.s("store z . or { <lam> z; store y . <lam> y; }");
    Sentence r = replace_nominal(t.sc, s->subs[0], "z", "k1");
    CHECK_NOTHROW(check_sentence(r, t.sc));
    CHECK(t.p(r) == t.p(t.s("or { <lam> k1; store y . <lam> y; }")));
    CHECK_THROWS_AS(t.s("store z . store z . z"), ParseError);
  }

  TEST_CASE("enumeration of small signatures") {
    Document d = parse_document(R"(
signature N { nominals k; modality lam : nom nom; }
signature C { rigid sorts s; rigid op c : -> s; }
)");
    Scope n(d.signature("N"));
    std::vector<std::string> atoms;
    for (const auto& s : enumerate_sentences(n, 0)) atoms.push_back(print_sentence(n, s));
    CHECK(atoms == std::vector<std::string>{"<lam> k", "k"});

    Scope c(d.signature("C"));
    std::vector<std::string> eqs;
    for (const auto& s : enumerate_sentences(c, 0)) eqs.push_back(print_sentence(c, s));
    CHECK(eqs == std::vector<std::string>{"c = c"});

    Fixture t;
    EnumBudget b;
    b.or_fanout = 2;
    b.max_count = 4000;
    auto all = enumerate_sentences(t.sc, 2, b);
    CHECK(all.size() <= 4000);
    for (const auto& s : all) {
      CHECK(sentence_depth(s) <= 2);
      if (s->kind == SenKind::Or) CHECK(s->subs.size() <= 2);
      CHECK_NOTHROW(check_sentence(s, t.sc));
    }
    auto again = enumerate_sentences(t.sc, 2, b);
    REQUIRE(again.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(same(all[i], again[i]));
  }

  TEST_CASE("ground terms cover every tag") {
    Fixture t;
    auto terms = ground_terms(t.sc, 1);
    bool here = false, tagged = false;
    for (const auto& term : terms) {
      if (show(term) == "c") here = true;
      if (show(term) == "c@k2") tagged = true;
    }
    CHECK(here);
    CHECK(tagged);
  }
}
