#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hwb/cli.hpp"

namespace hwb::cli {

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

Document corpus_file(const std::string& dir, const std::string& name) {
  std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ifstream in(p);
  if (!in) throw ResolveError("corpus file missing: " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_document(os.str());
}

SearchBounds closed(int worlds, int carrier) {
  SearchBounds b;
  b.max_worlds = worlds;
  b.max_carrier = carrier;
  b.mode = SearchMode::Closed;
  return b;
}

std::string rules_text(const std::set<Rule>& rs) {
  std::string out = "{";
  for (Rule r : rs) out += (out.size() > 1 ? "," : "") + rule_name(r);
  return out + "}";
}

std::string criterion_check(const SignatureSquare& sq, const std::set<Rule>& chi, const std::set<Rule>& delta) {
  SquareReport r = check_cip_criterion(sq);
  expect(r.chi.rules() == chi, "chi rules " + rules_text(r.chi.rules()) + ", expected " + rules_text(chi));
  expect(r.delta.rules() == delta, "delta rules " + rules_text(r.delta.rules()) + ", expected " + rules_text(delta));
  expect(!r.cip_guaranteed(), "criterion unexpectedly guarantees interpolation");
  return "rules chi " + rules_text(chi) + " delta " + rules_text(delta);
}

// Witness pair (a)-(c) at the given worlds and interpolant search (d) at depth 2.
std::string lemma_check(const Document& d, const std::string& square, const std::string& wa, const std::string& wb,
                        const std::function<void(const ModelMorphism&)>& shape = {}) {
  const SignatureSquare& sq = d.square(square);
  const KripkeStructure& ma = d.model("Ma");
  const KripkeStructure& mb = d.model("Mb");
  int ia = ma.world_index(wa), ib = mb.world_index(wb);
  const Sentence& pa = d.sentence("phi_a");
  const Sentence& pb = d.sentence("phi_b");
  expect(satisfies({&ma, ia}, pa), "Ma does not satisfy phi_a");
  expect(!satisfies({&mb, ib}, pb), "Mb satisfies phi_b");
  auto iso = quasi_isomorphic(reduct(sq.chi, ma), reduct(sq.delta, mb), std::make_pair(ia, ib));
  expect(iso.has_value(), "reducts are not quasi-isomorphic");
  if (shape) shape(*iso);
  WitnessPair hint{ma, ia, mb, ib};
  InterpolantSearch s = interpolant_search(sq, pa, pb, 2, closed(2, 2), {hint});
  expect(!s.interpolant, "an interpolant was found");
  for (const auto& c : s.candidates)
    expect(c.source == "stored-witness", "a candidate was not refuted by the stored pair");
  return "witness pair certified; " + std::to_string(s.candidates.size()) + " candidates refuted";
}

using Body = std::function<std::string(const std::string&)>;

std::vector<std::pair<std::string, Body>> scenarios() {
  return {
      {"sound",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "sound.hwb");
         const KripkeStructure& a = d.model("A");
         for (const auto& s : d.presentation("Gamma").sentences) expect(satisfies({&a, 0}, s), "A fails Gamma");
         expect(!satisfies({&a, 0}, d.sentence("collapse")), "A satisfies true = false");
         expect(satisfies({&a, 0}, d.sentence("elt_empty")), "A has a nonempty Elt");
         return std::string("A satisfies Gamma, fails true = false");
       }},
      {"fo-interpolation",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "fo_interpolation.hwb");
         return criterion_check(d.square("fo_interpolation"), {Rule::SortInjectivity}, {Rule::SortInjectivity});
       }},
      {"preservation",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "lemma_preservation.hwb");
         std::string c = criterion_check(d.square("preservation"), {Rule::Preservation}, {Rule::Preservation});
         return c + "; " + lemma_check(d, "preservation", "w1", "w1");
       }},
      {"sort-injectivity",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "lemma_sort_injectivity.hwb");
         const SignatureSquare& sq = d.square("sort_injectivity");
         std::string c = criterion_check(sq, {Rule::SortInjectivity}, {Rule::SortInjectivity});
         int s_int = sq.chi.source->sort_index("Int");
         auto sign_flip = [&](const ModelMorphism& h) {
           const auto& m = h.elems[s_int][0];
           for (int x = 0; x < static_cast<int>(m.size()); ++x)
             expect(m[x] == (5 - x) % 5, "isomorphism is not the sign flip on Int");
         };
         return c + "; " + lemma_check(d, "sort_injectivity", "w1", "w1", sign_flip);
       }},
      {"op-injectivity-surjectivity",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "lemma_op_injectivity_surjectivity.hwb");
         std::string c = criterion_check(d.square("op_injectivity_surjectivity"), {Rule::J1}, {Rule::I2});
         return c + "; " + lemma_check(d, "op_injectivity_surjectivity", "w0", "w0");
       }},
      {"op-surjectivity",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "lemma_op_surjectivity.hwb");
         std::string c = criterion_check(d.square("op_surjectivity"), {Rule::J2}, {Rule::J1});
         return c + "; " + lemma_check(d, "op_surjectivity", "w0", "w0");
       }},
      {"positive-squares",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "positive_squares.hwb");
         int n = 0;
         for (const auto& e : d.order) {
           if (e.kind != DeclKind::Square) continue;
           expect(check_cip_criterion(d.square(e.name)).cip_guaranteed(), e.name + " is not guaranteed");
           ++n;
         }
         expect(n == 5, "expected five squares");
         return std::string("5 squares: CIP guaranteed");
       }},
      {"classic",
       [](const std::string& dir) {
         Document d = corpus_file(dir, "classic.hwb");
         for (int n : {2, 3}) {
           std::string k = std::to_string(n);
           SigPtr sig = d.signature("Classic" + k);
           const auto& gamma = d.presentation("Gamma" + k).sentences;
           GenericRun run = build_generic(sig, gamma, 60, closed(2, 1));
           const KripkeStructure& m = run.model.model;
           int w = m.nom_val[run.chain.back().sig->nominal_index(run.point)];
           for (const auto& s : gamma) expect(satisfies({&m, w}, s), "generic model fails Gamma" + k);
           bool empty = false;
           for (int i = 1; i <= n; ++i) empty = empty || m.size(sig->sort_index("s" + std::to_string(i)), 0) == 0;
           expect(empty, "no guarded sort is empty for n = " + k);
           expect(is_reachable(m).reachable, "generic model is not reachable");
           std::vector<HenkinConstant> cs;
           for (int i = 1; i <= n; ++i) cs.push_back({"h" + std::to_string(i), "s" + std::to_string(i), 'u'});
           Condition empty_cond{sig, sig, {}, {}, {}};
           bool inconsistent = false;
           try {
             extend(empty_cond, cs, gamma, closed(2, 1));
           } catch (const PreconditionFailed&) {
             inconsistent = true;
           }
           expect(inconsistent, "classical Henkin extension is consistent for n = " + k);
         }
         return std::string("generic models for n = 2, 3; classical Henkin control inconsistent");
       }},
  };
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [n, b] : scenarios()) out.push_back(n);
  return out;
}

std::vector<ScenarioResult> run_paper_suite(const std::string& corpus_dir, const std::optional<std::string>& only) {
  auto all = scenarios();
  if (only) {
    bool known = false;
    for (const auto& [n, b] : all) known = known || n == *only;
    if (!known) throw ResolveError("unknown scenario " + *only);
  }
  std::vector<ScenarioResult> out;
  for (const auto& [name, body] : all) {
    if (only && name != *only) continue;
    ScenarioResult r;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = body(corpus_dir);
      r.passed = true;
    } catch (const Failure& f) {
      r.detail = f.what;
    } catch (const ResolveError&) {
      throw;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      r.detail = e.kind() + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hwb::cli
