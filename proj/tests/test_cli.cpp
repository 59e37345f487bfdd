#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "hwb/cli.hpp"
#include "support.hpp"

using namespace hwb;
using hwb::test::load_corpus;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("criterion on the preservation square lists violations on both legs") {
    Result r = run({"criterion", "--square", "lemma_preservation.hwb"});
    CHECK(r.code == cli::kRefuted);
    auto j = r.json();
    CHECK(j["schema"] == "hwb/1");
    REQUIRE(j["squares"].size() == 1);
    for (const char* leg : {"chi", "delta"}) {
      auto v = j["squares"][0][leg]["violations"];
      REQUIRE(v.size() == 1);
      CHECK(v[0]["rule"] == "Preservation");
    }
  }

  TEST_CASE("criterion on positive squares holds") {
    Result r = run({"criterion", "positive_squares.hwb", "--format", "text"});
    CHECK(r.code == cli::kHolds);
    CHECK(r.out.find("pos_merge") != std::string::npos);
    Result m = run({"criterion", "positive_squares.hwb", "--morphism", "merge"});
    CHECK(m.code == cli::kRefuted);
  }

  TEST_CASE("eval reports truth through the exit code") {
    Result r = run({"eval", "--model", "sound.hwb", "--world", "w0", "--sentence", "true = false"});
    CHECK(r.code == cli::kRefuted);
    CHECK(r.json()["truth"] == "false");
    CHECK(run({"eval", "--model", "sound.hwb", "--world", "w0", "--sentence", "elt_empty"}).code == cli::kHolds);
    CHECK(run({"eval", "--model", "sound.hwb", "--global", "--sentence", "`~`(true) = false"}).code == cli::kHolds);
    CHECK(run({"eval", "--model", "sound.hwb", "--world", "w9", "--sentence", "true = false"}).code == cli::kUsage);
  }

  TEST_CASE("entail finds the empty-carrier countermodel") {
    Result r = run({"entail", "--presentation", "empty.hwb", "--goal", "exists x:Elt . true", "--mode", "closed",
                    "--max-carrier", "Elt=0"});
    CHECK(r.code == cli::kRefuted);
    auto v = r.json()["verdict"];
    CHECK(v["tag"] == "Refuted");
    CHECK(v["witness"]["model"]["worlds"].size() == 1);
    Result closed_ok = run({"entail", "--presentation", "sound.hwb", "--goal", "`~`(true) = false", "--mode",
                            "closed", "--max-worlds", "1", "--max-carrier", "2"});
    CHECK(closed_ok.code == cli::kHolds);
    Result open = run({"entail", "--presentation", "sound.hwb", "--goal", "`~`(true) = false", "--max-worlds", "1",
                       "--max-carrier", "1"});
    CHECK(open.code == cli::kInconclusive);
  }

  TEST_CASE("bounds are validated before dispatch") {
    CHECK(run({"entail", "--presentation", "empty.hwb", "--goal", "true", "--max-carrier", "Nope=1"}).code ==
          cli::kUsage);
    CHECK(run({"entail", "--presentation", "empty.hwb", "--goal", "true", "--max-carrier", "x"}).code == cli::kUsage);
    CHECK(run({"entail", "--presentation", "empty.hwb", "--goal", "true", "--mode", "half"}).code == cli::kUsage);
  }

  TEST_CASE("budget exhaustion is inconclusive") {
    Result r = run({"entail", "--presentation", "classic.hwb", "--name", "Gamma3", "--goal", "or { k1; not k1; }",
                    "--mode", "closed", "--max-worlds", "4", "--budget", "100"});
    CHECK(r.code == cli::kInconclusive);
    CHECK(r.err.find("BudgetExceeded") != std::string::npos);
  }

  TEST_CASE("usage and input errors exit with 3") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"check", "no_such_file.hwb"}).code == cli::kUsage);
    Result r = run({"eval", "--model", "sound.hwb", "--world", "w0", "--sentence", "true = "});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("ParseError") != std::string::npos);
    CHECK(run({"--help"}).code == cli::kHolds);
  }

  TEST_CASE("check, reduct, gensub and pushout") {
    Result c = run({"check", "sound.hwb", "classic.hwb"});
    CHECK(c.code == cli::kHolds);
    CHECK(c.json()["files"].size() == 2);
    Result red = run({"reduct", "--model", "lemma_sort_injectivity.hwb", "--name", "Ma", "--morphism", "chi"});
    CHECK(red.code == cli::kHolds);
    CHECK(red.json()["model"]["worlds"].size() == 4);
    Result g = run({"gensub", "--model", "sound.hwb"});
    CHECK(g.code == cli::kHolds);
    // Sigma has no nominals, so w0 is not the denotation of any nominal.
    CHECK(g.json()["reachable"] == false);
    Result p = run({"pushout", "positive_squares.hwb", "--chi", "add_rigid", "--delta", "id_base", "--format", "text"});
    CHECK(p.code == cli::kHolds);
    CHECK(p.out.find("rigid op e") != std::string::npos);
  }

  TEST_CASE("amalgamate reports reducts that disagree") {
    // The two D-reducts interpret c and d differently at w1.
    Result r = run({"amalgamate", "lemma_sort_injectivity.hwb", "--square", "sort_injectivity", "--model-a", "Ma",
                    "--model-b", "Mb"});
    CHECK(r.code == cli::kRefuted);
    CHECK(r.json().contains("mismatch"));
  }

  TEST_CASE("quasi-iso between the sort injectivity reducts") {
    Result r = run({"quasi-iso", "lemma_sort_injectivity.hwb", "--a", "Ma", "--b", "Mb", "--square",
                    "sort_injectivity", "--world-a", "w1", "--world-b", "w1"});
    CHECK(r.code == cli::kHolds);
    Result plain = run({"quasi-iso", "lemma_sort_injectivity.hwb", "--a", "Ma", "--b", "Ma"});
    CHECK(plain.code == cli::kHolds);
  }

  TEST_CASE("force builds a generic model") {
    Result r = run({"force", "classic.hwb", "--presentation", "Gamma2", "--mode", "closed", "--max-carrier", "1"});
    CHECK(r.code == cli::kHolds);
    auto j = r.json();
    CHECK(j["unsatisfied"].empty());
    CHECK(j["reachable"] == true);
    CHECK(j["transcript"]["schema"] == "hwb/1");
  }

  TEST_CASE("interpolate distinguishes interpolants from witnesses") {
    Result w = run({"interpolate", "lemma_sort_injectivity.hwb", "--phi-a", "phi_a", "--phi-b", "phi_b", "--mode",
                    "closed", "--max-carrier", "2"});
    CHECK(w.code == cli::kRefuted);
    auto j = w.json();
    CHECK(j["kind"] == "Witnesses");
    CHECK(j["hints"].get<int>() >= 1);
    Result i = run({"interpolate", "positive_squares.hwb", "--square", "pos_fresh_rigid", "--phi-a", "@k (a = a)",
                    "--phi-b", "@k (a = a)", "--mode", "closed", "--max-carrier", "1"});
    CHECK(i.code == cli::kHolds);
    CHECK(i.json()["kind"] == "Interpolant");
  }

  TEST_CASE("hint discovery certifies the bundled pairs") {
    Document d = load_corpus("lemma_op_surjectivity.hwb");
    auto hints = cli::discover_hints(d, d.square("op_surjectivity"), d.sentence("phi_a"), d.sentence("phi_b"));
    REQUIRE(!hints.empty());
    CHECK(hints[0].wa == 0);
  }

  TEST_CASE("scenario suite passes, filters and fails on a missing corpus file") {
    Result all = run({"suite", "paper"});
    CHECK(all.code == cli::kHolds);
    for (const auto& n : cli::scenario_names()) CHECK(all.out.find(n) != std::string::npos);
    Result one = run({"suite", "paper", "--only", "sort-injectivity", "--format", "json"});
    CHECK(one.code == cli::kHolds);
    CHECK(one.json()["scenarios"].size() == 1);
    CHECK(run({"suite", "paper", "--only", "nope"}).code == cli::kUsage);

    fs::path tmp = fs::temp_directory_path() / "hwb_cli_corpus";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    for (const auto& e : fs::directory_iterator(HWB_CORPUS_DIR)) fs::copy(e.path(), tmp / e.path().filename());
    fs::remove(tmp / "lemma_preservation.hwb");
    CHECK(run({"suite", "paper", "--corpus", tmp.string()}).code == cli::kUsage);
    fs::remove_all(tmp);
  }
}
