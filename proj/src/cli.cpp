#include "hwb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hwb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_input(const std::string& path) {
  if (fs::exists(path)) return path;
  fs::path alt = fs::path(HWB_CORPUS_DIR) / path;
  if (!fs::path(path).is_absolute() && fs::exists(alt)) return alt.string();
  throw ResolveError("cannot open input file " + path);
}

Document load_document(const std::string& path) {
  std::string resolved = resolve_input(path);
  std::ifstream in(resolved);
  if (!in) throw ResolveError("cannot open input file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_document(os.str());
}

std::vector<WitnessPair> discover_hints(const Document& doc, const SignatureSquare& sq, const Sentence& phi_a,
                                        const Sentence& phi_b) {
  std::vector<const KripkeStructure*> as, bs;
  for (const auto& e : doc.order) {
    if (e.kind != DeclKind::Model) continue;
    const KripkeStructure& m = doc.model(e.name);
    if (m.sig->fingerprint == sq.chi.target->fingerprint) as.push_back(&m);
    if (m.sig->fingerprint == sq.delta.target->fingerprint) bs.push_back(&m);
  }
  std::vector<WitnessPair> out;
  for (const auto* a : as)
    for (const auto* b : bs)
      for (int wa = 0; wa < a->num_worlds(); ++wa)
        for (int wb = 0; wb < b->num_worlds(); ++wb) {
          WitnessPair p{*a, wa, *b, wb};
          if (certify_pair(sq, phi_a, phi_b, p)) out.push_back(std::move(p));
        }
  return out;
}

namespace {

struct BoundsArgs {
  int max_worlds = 2;
  std::vector<std::string> max_carrier;
  int term_depth = 2;
  std::string mode = "open";
  std::size_t budget = 0;

  void add_to(CLI::App* app) {
    app->add_option("--max-worlds", max_worlds, "Largest frame enumerated")->check(CLI::PositiveNumber);
    app->add_option("--max-carrier", max_carrier, "Carrier bound K or per-sort bound S=K (repeatable)");
    app->add_option("--term-depth", term_depth, "Depth of ground terms used for witnesses")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--mode", mode, "open or closed")->check(CLI::IsMember({"open", "closed"}));
    app->add_option("--budget", budget, "Oracle node budget (default HWB_BUDGET or built-in)");
  }

  SearchBounds build(const HybridSignature& sig) const {
    SearchBounds b;
    b.max_worlds = max_worlds;
    b.term_depth = term_depth;
    b.mode = mode == "closed" ? SearchMode::Closed : SearchMode::Open;
    if (budget) b.budget = budget;
    for (const auto& spec : max_carrier) {
      auto eq = spec.find('=');
      try {
        if (eq == std::string::npos)
          b.max_carrier = std::stoi(spec);
        else
          b.carrier[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw PreconditionFailed("malformed --max-carrier value " + spec);
      }
    }
    b.validate(sig);
    return b;
  }
};

struct Common {
  std::string format = "json";
  void add_to(CLI::App* app) {
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  }
  bool json_out() const { return format == "json"; }
};

json envelope(const std::string& command) { return json{{"schema", kSchema}, {"command", command}}; }

// The named declaration, or the only one of that kind when no name is given.
std::string pick(const Document& doc, DeclKind kind, const std::string& name, const std::string& what) {
  if (!name.empty()) return name;
  std::vector<std::string> found;
  for (const auto& e : doc.order)
    if (e.kind == kind) found.push_back(e.name);
  if (found.size() == 1) return found[0];
  throw ResolveError("the document has " + std::to_string(found.size()) + " " + what + " declarations; name one");
}

std::string sig_name(const Document& doc, const SigPtr& sig) {
  std::string n = doc.signature_name(sig);
  return n.empty() ? "Sigma" : n;
}

int world_of(const KripkeStructure& m, const std::string& w) {
  int i = m.world_index(w);
  if (i < 0) throw ResolveError("unknown world " + w);
  return i;
}

std::string truth_name(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
  }
  return "?";
}

int emit(std::ostream& out, const Common& c, const json& j, const std::string& text, int code) {
  if (c.json_out()) {
    json o = j;
    o["exitCode"] = code;
    out << o.dump(2) << "\n";
  } else {
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
  }
  return code;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::vector<std::string>& files, const Common& c, std::ostream& out) {
  json j = envelope("check");
  std::ostringstream text;
  int code = kHolds;
  for (const auto& f : files) {
    Document d = load_document(f);
    std::map<std::string, int> counts;
    json squares = json::array();
    for (const auto& e : d.order) {
      switch (e.kind) {
        case DeclKind::Signature: ++counts["signatures"]; break;
        case DeclKind::Morphism: ++counts["morphisms"]; break;
        case DeclKind::Model: ++counts["models"]; break;
        case DeclKind::Presentation: ++counts["presentations"]; break;
        case DeclKind::Sentence: ++counts["sentences"]; break;
        case DeclKind::Square: {
          ++counts["squares"];
          auto fails = d.square(e.name).commutation_failures();
          if (!fails.empty()) code = kRefuted;
          squares.push_back({{"name", e.name}, {"commutationFailures", fails}});
          break;
        }
      }
    }
    j["files"].push_back({{"path", f}, {"counts", counts}, {"squares", squares}});
    text << f << ": ok";
    for (const auto& [k, n] : counts) text << " " << k << "=" << n;
    text << "\n";
  }
  return emit(out, c, j, text.str(), code);
}

int cmd_pushout(const std::string& file, const std::string& chi, const std::string& delta, const Common& c,
                std::ostream& out) {
  Document d = load_document(file);
  SignatureSquare sq = pushout(d.morphism(chi), d.morphism(delta));
  const std::string apex = "Pushout";
  std::string text = print_signature(apex, *sq.delta_a.target) + "\n" +
                     print_morphism("deltaA", sig_name(d, sq.chi.target), apex, sq.delta_a) + "\n" +
                     print_morphism("chiB", sig_name(d, sq.delta.target), apex, sq.chi_b);
  json j = envelope("pushout");
  j["apex"] = to_json(*sq.delta_a.target);
  j["text"] = text;
  return emit(out, c, j, text, kHolds);
}

int cmd_criterion(const std::string& file, const std::string& square, const std::string& morphism, const Common& c,
                  std::ostream& out) {
  Document d = load_document(file);
  json j = envelope("criterion");
  std::ostringstream text;
  int code = kHolds;
  auto report_morphism = [&](const std::string& name) {
    CriterionReport r = check_cip_criterion(d.morphism(name));
    if (!r.passes()) code = kRefuted;
    j["morphisms"].push_back(to_json(r));
    text << name << ": " << r.verdict() << "\n";
  };
  if (!morphism.empty()) {
    report_morphism(morphism);
    return emit(out, c, j, text.str(), code);
  }
  std::vector<std::string> names;
  if (!square.empty()) {
    names.push_back(square);
  } else {
    for (const auto& e : d.order)
      if (e.kind == DeclKind::Square) names.push_back(e.name);
  }
  if (names.empty()) throw ResolveError("the document declares no square");
  j["squares"] = json::array();
  for (const auto& n : names) {
    SquareReport r = check_cip_criterion(d.square(n));
    if (!r.cip_guaranteed()) code = kRefuted;
    json sj = to_json(r);
    sj["name"] = n;
    j["squares"].push_back(sj);
    text << n << ": " << r.verdict() << "\n";
  }
  return emit(out, c, j, text.str(), code);
}

int cmd_eval(const std::string& file, const std::string& name, const std::string& world, const std::string& sentence,
             bool global, const Common& c, std::ostream& out) {
  Document d = load_document(file);
  const KripkeStructure& m = d.model(pick(d, DeclKind::Model, name, "model"));
  Scope sc(m.sig);
  Sentence s = d.has(sentence) && d.sentences.count(sentence) ? d.sentence(sentence) : parse_sentence(sc, sentence);
  check_sentence(s, sc);
  json j = envelope("eval");
  j["sentence"] = print_sentence(sc, s);
  Truth t;
  if (global) {
    try {
      t = satisfies_globally(m, s) ? Truth::True : Truth::False;
    } catch (const PartialModel&) {
      t = Truth::Unknown;
    }
    j["world"] = nullptr;
  } else {
    if (world.empty()) throw PreconditionFailed("eval needs --world or --global");
    t = truth({&m, world_of(m, world)}, s);
    j["world"] = world;
  }
  j["truth"] = truth_name(t);
  int code = t == Truth::True ? kHolds : t == Truth::False ? kRefuted : kInconclusive;
  return emit(out, c, j, truth_name(t), code);
}

int cmd_reduct(const std::string& file, const std::string& name, const std::string& morphism, const Common& c,
               std::ostream& out) {
  Document d = load_document(file);
  const SignatureMorphism& chi = d.morphism(morphism);
  KripkeStructure r = reduct(chi, d.model(pick(d, DeclKind::Model, name, "model")));
  json j = envelope("reduct");
  j["model"] = to_json(r);
  return emit(out, c, j, print_model("Reduct", sig_name(d, chi.source), r), kHolds);
}

int cmd_amalgamate(const std::string& file, const std::string& square, const std::string& ma, const std::string& mb,
                   const Common& c, std::ostream& out) {
  Document d = load_document(file);
  const SignatureSquare& sq = d.square(pick(d, DeclKind::Square, square, "square"));
  json j = envelope("amalgamate");
  try {
    KripkeStructure m = amalgamate(sq, d.model(ma), d.model(mb));
    j["model"] = to_json(m);
    return emit(out, c, j, print_model("Amalgam", sig_name(d, sq.delta_a.target), m), kHolds);
  } catch (const ReductMismatch& e) {
    j["mismatch"] = e.what();
    return emit(out, c, j, std::string("reducts differ: ") + e.what(), kRefuted);
  }
}

int cmd_gensub(const std::string& file, const std::string& name, const Common& c, std::ostream& out) {
  Document d = load_document(file);
  const KripkeStructure& m = d.model(pick(d, DeclKind::Model, name, "model"));
  GeneratedSubmodel g = generated_submodel(m);
  json j = envelope("gensub");
  j["model"] = to_json(g.model);
  j["reachable"] = is_reachable(m).reachable;
  return emit(out, c, j, print_model("Generated", sig_name(d, m.sig), g.model), kHolds);
}

int cmd_quasi_iso(const std::string& file, const std::string& a, const std::string& b, const std::string& square,
                  const std::string& wa, const std::string& wb, const Common& c, std::ostream& out) {
  Document d = load_document(file);
  KripkeStructure ma = d.model(a), mb = d.model(b);
  if (!square.empty()) {
    const SignatureSquare& sq = d.square(square);
    ma = reduct(sq.chi, ma);
    mb = reduct(sq.delta, mb);
  }
  std::optional<std::pair<int, int>> point;
  if (!wa.empty() || !wb.empty()) {
    if (wa.empty() || wb.empty()) throw PreconditionFailed("give both --world-a and --world-b");
    point = std::make_pair(world_of(ma, wa), world_of(mb, wb));
  }
  auto iso = quasi_isomorphic(ma, mb, point);
  json j = envelope("quasi-iso");
  j["isomorphic"] = iso.has_value();
  if (iso) j["iso"] = morphism_json(ma, mb, *iso);
  return emit(out, c, j, iso ? "quasi-isomorphic" : "not quasi-isomorphic", iso ? kHolds : kRefuted);
}

int cmd_entail(const std::string& file, const std::string& name, const std::string& goal, const std::string& at,
               const BoundsArgs& ba, const Common& c, std::ostream& out) {
  Document d = load_document(file);
  const Presentation& p = d.presentation(pick(d, DeclKind::Presentation, name, "presentation"));
  Scope sc(p.sig);
  Sentence g = parse_sentence(sc, goal);
  SearchBounds b = ba.build(*p.sig);
  OracleVerdict v = at.empty() ? entails(p.sig, p.sentences, g, b) : entails_at(p.sig, p.sentences, at, g, b);
  json j = envelope("entail");
  j["goal"] = print_sentence(sc, g);
  j["verdict"] = to_json(v);
  int code = v.found() ? kRefuted : v.exhausted() ? kHolds : kInconclusive;
  std::string text = v.found() ? "refuted\n" + print_model("Countermodel", sig_name(d, p.sig), v.witness->model) +
                                     "\npoint " + v.witness->model.worlds[v.witness->world]
                               : v.exhausted() ? "entailed in the closed class"
                                               : "no countermodel within bounds";
  return emit(out, c, j, text, code);
}

int cmd_force(const std::string& file, const std::string& name, std::size_t steps, int depth, const BoundsArgs& ba,
              const Common& c, std::ostream& out) {
  Document d = load_document(file);
  const Presentation& p = d.presentation(pick(d, DeclKind::Presentation, name, "presentation"));
  SearchBounds b = ba.build(*p.sig);
  GenericOptions opts;
  opts.sentence_depth = depth;
  json j = envelope("force");
  try {
    GenericRun run = build_generic(p.sig, p.sentences, steps, b, opts);
    j["point"] = run.point;
    j["transcript"] = run.transcript.to_json();
    j["model"] = to_json(run.model.model);
    j["unsatisfied"] = run.unsatisfied;
    j["reachable"] = is_reachable(run.model.model).reachable;
    std::string text = run.transcript.result + "\n" + print_model("Generic", "Omega", run.model.model);
    return emit(out, c, j, text, run.unsatisfied.empty() ? kHolds : kInconclusive);
  } catch (const PreconditionFailed& e) {
    j["error"] = e.what();
    return emit(out, c, j, std::string("inconsistent presentation: ") + e.what(), kRefuted);
  }
}

int cmd_interpolate(const std::string& file, const std::string& square, const std::string& phi_a,
                    const std::string& phi_b, int depth, std::size_t steps, const BoundsArgs& ba, const Common& c,
                    std::ostream& out) {
  Document d = load_document(file);
  const SignatureSquare& sq = d.square(pick(d, DeclKind::Square, square, "square"));
  Scope sa(sq.chi.target), sb(sq.delta.target), s0(sq.chi.source);
  auto sentence = [&](const Scope& sc, const std::string& text) {
    Sentence s = d.sentences.count(text) ? d.sentence(text) : parse_sentence(sc, text);
    check_sentence(s, sc);
    return s;
  };
  Sentence pa = sentence(sa, phi_a), pb = sentence(sb, phi_b);
  SearchBounds b = ba.build(*sq.delta_a.target);
  auto hints = discover_hints(d, sq, pa, pb);
  InterpolationRun run = dual_chain(sq, pa, pb, depth, steps, b, hints);
  json j = envelope("interpolate");
  j["kind"] = run_kind_name(run.kind);
  j["hints"] = hints.size();
  j["candidates"] = run.search.candidates.size();
  std::map<std::string, int> tally;
  for (const auto& co : run.search.candidates) ++tally[co.verdict + "/" + co.source];
  j["candidateTally"] = tally;
  j["transcript"] = run.transcript.to_json();
  std::string text = run_kind_name(run.kind);
  int code = kInconclusive;
  if (run.kind == RunKind::Interpolant) {
    j["interpolant"] = print_sentence(s0, *run.interpolant);
    text += ": " + print_sentence(s0, *run.interpolant);
    code = kHolds;
  } else if (run.kind == RunKind::Witnesses) {
    j["witnessSource"] = run.witness_source;
    j["witnesses"] = {{"a", to_json(run.witnesses->a)},
                      {"worldA", run.witnesses->a.worlds[run.witnesses->wa]},
                      {"b", to_json(run.witnesses->b)},
                      {"worldB", run.witnesses->b.worlds[run.witnesses->wb]}};
    j["iso"] = morphism_json(reduct(sq.chi, run.witnesses->a), reduct(sq.delta, run.witnesses->b), *run.iso);
    text += " (" + run.witness_source + "): no interpolant; reducts quasi-isomorphic at " +
            run.witnesses->a.worlds[run.witnesses->wa] + ", " + run.witnesses->b.worlds[run.witnesses->wb];
    code = kRefuted;
  } else {
    j["reason"] = run.reason;
    text += ": " + run.reason;
  }
  return emit(out, c, j, text, code);
}

int cmd_suite(const std::string& which, const std::optional<std::string>& only, const std::string& corpus,
              const Common& c, std::ostream& out) {
  if (which != "paper") throw ResolveError("unknown suite " + which + " (expected paper)");
  std::vector<ScenarioResult> results = run_paper_suite(corpus, only);
  json j = envelope("suite");
  std::ostringstream text;
  std::size_t width = 8;
  for (const auto& r : results) width = std::max(width, r.name.size());
  text << std::left << std::setw(static_cast<int>(width) + 2) << "scenario" << "result  seconds  detail\n";
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    j["scenarios"].push_back({{"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
    text << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::setw(8)
         << (r.passed ? "PASS" : "FAIL") << std::right << std::setw(7) << std::fixed << std::setprecision(3)
         << r.seconds << "  " << r.detail << "\n";
  }
  return emit(out, c, j, text.str(), all ? kHolds : kRefuted);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for many-sorted hybrid logic with rigid symbols", "hwb"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  BoundsArgs bounds;
  std::vector<std::string> files;
  std::string file, name, square, morphism, chi, delta, world, sentence, a, b, wa, wb, goal, at, phi_a, phi_b;
  std::string which = "paper", corpus = HWB_CORPUS_DIR;
  std::optional<std::string> only;
  bool global = false;
  int depth = 1;
  std::size_t steps = 60;

  auto* check = app.add_subcommand("check", "Parse and validate documents");
  check->add_option("files", files, "Documents")->required();
  common.add_to(check);

  auto* po = app.add_subcommand("pushout", "Pushout of a span of morphisms");
  po->add_option("file", file, "Document")->required();
  po->add_option("--chi", chi, "First morphism")->required();
  po->add_option("--delta", delta, "Second morphism")->required();
  common.add_to(po);

  auto* crit = app.add_subcommand("criterion", "Check the interpolation criterion on squares or morphisms");
  auto* crit_file = crit->add_option("file", file, "Document");
  crit->add_option("--square", file, "Document holding the squares")->excludes(crit_file);
  crit->add_option("--name", square, "Square to check (default: all)");
  crit->add_option("--morphism", morphism, "Check a single morphism instead");
  common.add_to(crit);

  auto* ev = app.add_subcommand("eval", "Evaluate a sentence on a model");
  ev->add_option("--model", file, "Document holding the model")->required();
  ev->add_option("--name", name, "Model name (default: the only model)");
  ev->add_option("--world", world, "World of evaluation");
  ev->add_flag("--global", global, "Satisfaction at every world");
  ev->add_option("--sentence", sentence, "Sentence text or declared sentence name")->required();
  common.add_to(ev);

  auto* red = app.add_subcommand("reduct", "Reduct of a model along a morphism");
  red->add_option("--model", file, "Document")->required();
  red->add_option("--name", name, "Model name");
  red->add_option("--morphism", morphism, "Morphism into the model's signature")->required();
  common.add_to(red);

  auto* am = app.add_subcommand("amalgamate", "Amalgamate two models over a pushout square");
  am->add_option("file", file, "Document")->required();
  am->add_option("--square", square, "Square name");
  am->add_option("--model-a", a, "Model over the first leg's target")->required();
  am->add_option("--model-b", b, "Model over the second leg's target")->required();
  common.add_to(am);

  auto* gs = app.add_subcommand("gensub", "Generated submodel");
  gs->add_option("--model", file, "Document")->required();
  gs->add_option("--name", name, "Model name");
  common.add_to(gs);

  auto* qi = app.add_subcommand("quasi-iso", "Search for an isomorphism between generated submodels");
  qi->add_option("file", file, "Document")->required();
  qi->add_option("--a", a, "First model")->required();
  qi->add_option("--b", b, "Second model")->required();
  qi->add_option("--square", square, "Compare the reducts along the square's span");
  qi->add_option("--world-a", wa, "Point of the first model");
  qi->add_option("--world-b", wb, "Point of the second model");
  common.add_to(qi);

  auto* en = app.add_subcommand("entail", "Bounded entailment check");
  en->add_option("--presentation", file, "Document holding the presentation")->required();
  en->add_option("--name", name, "Presentation name");
  en->add_option("--goal", goal, "Goal sentence")->required();
  en->add_option("--at", at, "Evaluate the goal at this nominal");
  bounds.add_to(en);
  common.add_to(en);

  auto* fo = app.add_subcommand("force", "Generic model of a presentation by semantic forcing");
  fo->add_option("file", file, "Document")->required();
  fo->add_option("--presentation", name, "Presentation name");
  fo->add_option("--steps", steps, "Schedule budget");
  fo->add_option("--depth", depth, "Depth of scheduled sentences")->check(CLI::NonNegativeNumber);
  bounds.add_to(fo);
  common.add_to(fo);

  auto* ip = app.add_subcommand("interpolate", "Interpolant search and dual-chain witnesses");
  ip->add_option("file", file, "Document")->required();
  ip->add_option("--square", square, "Square name");
  ip->add_option("--phi-a", phi_a, "Premise over the first leg's target (name or text)")->required();
  ip->add_option("--phi-b", phi_b, "Conclusion over the second leg's target (name or text)")->required();
  ip->add_option("--depth", depth, "Candidate depth")->check(CLI::NonNegativeNumber);
  ip->add_option("--steps", steps, "Dual-chain step budget");
  bounds.add_to(ip);
  common.add_to(ip);

  auto* su = app.add_subcommand("suite", "Run the bundled scenario suite");
  su->add_option("which", which, "Suite name (paper)")->required();
  su->add_option("--only", only, "Run a single scenario");
  su->add_option("--corpus", corpus, "Corpus directory");
  Common suite_common;
  suite_common.format = "text";
  suite_common.add_to(su);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kHolds;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kHolds;
  } catch (const CLI::ParseError& e) {
    err << "hwb: " << e.what() << "\n";
    return kUsage;
  }
  try {
    if (check->parsed()) return cmd_check(files, common, out);
    if (po->parsed()) return cmd_pushout(file, chi, delta, common, out);
    if (crit->parsed()) {
      if (file.empty()) throw PreconditionFailed("criterion needs a document");
      return cmd_criterion(file, square, morphism, common, out);
    }
    if (ev->parsed()) return cmd_eval(file, name, world, sentence, global, common, out);
    if (red->parsed()) return cmd_reduct(file, name, morphism, common, out);
    if (am->parsed()) return cmd_amalgamate(file, square, a, b, common, out);
    if (gs->parsed()) return cmd_gensub(file, name, common, out);
    if (qi->parsed()) return cmd_quasi_iso(file, a, b, square, wa, wb, common, out);
    if (en->parsed()) return cmd_entail(file, name, goal, at, bounds, common, out);
    if (fo->parsed()) return cmd_force(file, name, steps, depth, bounds, common, out);
    if (ip->parsed()) return cmd_interpolate(file, square, phi_a, phi_b, depth, steps, bounds, common, out);
    if (su->parsed()) return cmd_suite(which, only, corpus, suite_common, out);
  } catch (const BudgetExceeded& e) {
    err << "hwb: " << e.kind() << ": " << e.what() << "\n";
    return kInconclusive;
  } catch (const OracleInconclusive& e) {
    err << "hwb: " << e.kind() << ": " << e.what() << "\n";
    return kInconclusive;
  } catch (const Error& e) {
    err << "hwb: " << e.kind() << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "hwb: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hwb::cli
