#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hwb/forcing.hpp"
#include "hwb/textio.hpp"

namespace hwb::cli {

// Process exit codes shared by every subcommand.
enum Exit : int { kHolds = 0, kRefuted = 1, kInconclusive = 2, kUsage = 3 };

// Parses argv (without the program name) and dispatches. Diagnostics go to
// `err`; results go to `out`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// A path as given if it exists, otherwise the same name in the bundled corpus.
std::string resolve_input(const std::string& path);
Document load_document(const std::string& path);

// Pointed pairs from the document's models over the two legs' targets that
// certify_pair accepts, in declaration order.
std::vector<WitnessPair> discover_hints(const Document& doc, const SignatureSquare& sq, const Sentence& phi_a,
                                        const Sentence& phi_b);

struct ScenarioResult {
  std::string name;
  bool passed = false;
  double seconds = 0;
  std::string detail;
};

std::vector<std::string> scenario_names();
// Runs the bundled scenarios (or only `only`) against corpus_dir. Throws
// ResolveError on an unknown scenario name and propagates input errors.
std::vector<ScenarioResult> run_paper_suite(const std::string& corpus_dir, const std::optional<std::string>& only);

}  // namespace hwb::cli
