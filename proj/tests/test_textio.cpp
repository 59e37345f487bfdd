#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace hwb;
using hwb::test::kCorpusFiles;
using hwb::test::load_corpus;
using hwb::test::read_file;

TEST_SUITE("textio") {
  TEST_CASE("empty input yields an empty document") {
    Document d = parse_document("");
    CHECK(d.order.empty());
    CHECK(parse_document("  # only a comment\n\n").order.empty());
  }

  TEST_CASE("every corpus file parses and printing is idempotent") {
    for (const char* f : kCorpusFiles) {
      CAPTURE(f);
      Document d = load_corpus(f);
      CHECK(!d.order.empty());
      std::string once = print_document(d);
      Document again = parse_document(once);
      std::string twice = print_document(again);
      CHECK(once == twice);
      REQUIRE(again.order.size() == d.order.size());
      for (const auto& [name, m] : d.models) CHECK(!first_difference(m.model, again.model(name), true));
      for (const auto& [name, s] : d.sentences) CHECK(same(s.sentence, again.sentence(name)));
      for (const auto& [name, p] : d.presentations) {
        const auto& q = again.presentation(name);
        REQUIRE(q.sentences.size() == p.presentation.sentences.size());
        for (size_t i = 0; i < q.sentences.size(); ++i) CHECK(same(q.sentences[i], p.presentation.sentences[i]));
      }
      for (const auto& [name, m] : d.morphisms) CHECK(again.morphism(name) == m.morphism);
      for (const auto& [name, s] : d.signatures) CHECK(again.signature(name)->fingerprint == s->fingerprint);
    }
  }

  TEST_CASE("signature printing sorts symbols") {
    Document d = parse_document(
        "signature S { op z : -> B; sorts B, A; rigid sorts R; rel q : A; op a : -> A; nominals n2, n1; }");
    std::string out = print_signature("S", *d.signature("S"));
    CHECK(out ==
          "signature S {\n  nominals n1, n2;\n  rigid sorts R;\n  sorts A, B;\n  op a : -> A;\n  op z : -> B;\n"
          "  rel q : A;\n}\n");
  }

  TEST_CASE("model printing emits the shared block before world blocks") {
    Document d = load_corpus("lemma_preservation.hwb");
    std::string out = print_model("Mb", "Db", d.model("Mb"));
    auto shared = out.find("shared {");
    auto w1 = out.find("world w1 {");
    REQUIRE(shared != std::string::npos);
    REQUIRE(w1 != std::string::npos);
    CHECK(shared < w1);
    CHECK(out.find("carrier Nat", w1) == std::string::npos);
  }

  TEST_CASE("a world omitting a carrier is a resolve error") {
    const char* text =
        "signature S { sorts A; op a : -> A; }\n"
        "model M over S { worlds w0, w1; world w0 { carrier A = {x}; op a = x; } world w1 { op a = x; } }";
    CHECK_THROWS_AS(parse_document(text), ResolveError);
  }

  TEST_CASE("partial tables are rejected unless the codomain is empty") {
    const char* bad =
        "signature S { sorts A; op f : A -> A; }\n"
        "model M over S { worlds w; world w { carrier A = {x, y}; op f = {x -> y}; } }";
    CHECK_THROWS_AS(parse_document(bad), ResolveError);
    const char* ok =
        "signature S { sorts A, B; op f : A -> B; }\n"
        "model M over S { worlds w; world w { carrier A = {x}; carrier B = {}; } }";
    Document d = parse_document(ok);
    CHECK(d.model("M").fun_tab[0][0][0] == kUndef);
  }

  TEST_CASE("diagnostics carry positions") {
    try {
      parse_document("signature S {\n  sorts A\n}");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 1);
      CHECK(!e.expected().empty());
    }
    try {
      parse_document("signature S { sorts A; }\nsignature S { sorts B; }");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_document("sentence s over Nowhere = top;"), ResolveError);
  }

  TEST_CASE("overloaded terms need and accept annotations") {
    Document d = parse_document("signature S { sorts A, B; op c : -> A; op c : -> B; op f : A -> B; }");
    Scope sc(d.signature("S"));
    CHECK_THROWS_AS(parse_term(sc, "c"), ParseError);
    Term t = parse_term(sc, "(c : B)");
    CHECK(t->fun.result == "B");
    Term u = parse_term(sc, "f(c)");
    CHECK(u->args[0]->fun.result == "A");
    CHECK(print_term(sc, t) == "(c : B)");
    Sentence s = parse_sentence(sc, "f(c) = c");
    CHECK(same(parse_sentence(sc, print_sentence(sc, s)), s));
  }

  TEST_CASE("tags propagate to flexible arguments only") {
    Document d = parse_document(
        "signature S { nominals k; rigid sorts E; sorts A; op c : -> A; op f : A E -> A; rigid op z : -> E; "
        "op r : -> E; }");
    Scope sc(d.signature("S"));
    Term t = parse_term(sc, "f@k(c, r)");
    CHECK(t->at == std::optional<std::string>("k"));
    CHECK(t->args[0]->at == std::optional<std::string>("k"));
    CHECK(!t->args[1]->at);
    CHECK(print_term(sc, t) == "f@k(c@k, r)");
  }

  TEST_CASE("derived connectives parse into primitives") {
    Document d = parse_document("signature S { nominals k, j; modality lam : nom nom; rigid sorts E; }");
    Scope sc(d.signature("S"));
    Sentence s = parse_sentence(sc, "k & j -> [lam] j | forall x : E . false");
    std::string printed = print_sentence(sc, s);
    CHECK(printed.find("->") == std::string::npos);
    CHECK(same(parse_sentence(sc, printed), s));
    CHECK(same(parse_sentence(sc, "true"), sen::top()));
    CHECK(same(parse_sentence(sc, "and { }"), sen::top()));
    CHECK(same(parse_sentence(sc, "store z . @z <lam> k"), parse_sentence(sc, "store z . (@z <lam> k)")));
    CHECK_THROWS_AS(parse_sentence(sc, "exists x : Nope . true"), ResolveError);
    CHECK_THROWS_AS(parse_sentence(sc, "exists x : E . x = y"), ResolveError);
  }

  TEST_CASE("quoted names round-trip") {
    CHECK(quote_name("abc") == "abc");
    CHECK(quote_name("-1") == "-1");
    CHECK(quote_name("not") == "`not`");
    CHECK(quote_name("~") == "`~`");
    Document d = hwb::test::load_corpus("sound.hwb");
    CHECK(d.signature("Sigma")->fun_index({"~", {"Bool"}, "Bool"}) >= 0);
  }

  TEST_CASE("byte mutations never escape the error taxonomy") {
    std::mt19937 rng(7);
    std::string base = read_file(hwb::test::corpus_path("lemma_op_injectivity_surjectivity.hwb"));
    int parsed = 0, rejected = 0;
    for (int i = 0; i < 400; ++i) {
      std::string s = base;
      int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits; ++e) {
        size_t at = rng() % s.size();
        switch (rng() % 3) {
          case 0: s[at] = static_cast<char>(rng() % 256); break;
          case 1: s.erase(at, 1 + rng() % 8); break;
          default: s.insert(at, 1, "{};:,()=@<>`#-"[rng() % 14]); break;
        }
        if (s.empty()) s = " ";
      }
      try {
        parse_document(s);
        ++parsed;
      } catch (const ParseError& e) {
        CHECK(e.line() >= 1);
        ++rejected;
      } catch (const ResolveError& e) {
        CHECK(std::string(e.what()).find(':') != std::string::npos);
        ++rejected;
      }
    }
    CHECK(parsed + rejected == 400);
  }

  TEST_CASE("JSON export carries the schema tag") {
    Document d = load_corpus("sound.hwb");
    auto js = to_json(*d.signature("Sigma"));
    CHECK(js["schema"] == "hwb/1");
    CHECK(js["sorts"].size() == 2);
    auto jm = to_json(d.model("A"));
    CHECK(jm["carriers"]["Elt"]["shared"].empty());
    CHECK(jm["worlds"][0] == "w0");
  }
}
