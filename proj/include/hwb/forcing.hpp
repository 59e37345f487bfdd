#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwb/kripke.hpp"
#include "hwb/oracle.hpp"
#include "hwb/sigcat.hpp"
#include "hwb/syntax.hpp"

namespace hwb {

// A constant of sort in S^e added to a base signature. Roles: 'u' and 'o'
// for the two sides of an interpolation run, 'c' for bridge constants.
struct HenkinConstant {
  std::string name;
  std::string sort;  // a rigid sort or `nom`
  char role = 'u';
  bool operator==(const HenkinConstant&) const = default;
};

// A condition p = (Omega_p, Gamma_p) with Omega_p = base[C_p].
// Gamma_p is consistent: some pointed model satisfies it (certificate).
struct Condition {
  SigPtr base;
  SigPtr sig;
  std::vector<HenkinConstant> constants;
  std::vector<Sentence> gamma;  // deduplicated, in insertion order
  OracleVerdict certificate;

  Scope scope() const { return Scope(sig); }
  bool contains(const Sentence& s) const;
  // Members of Gamma_p of the form @k a with a an atom (Sen0 or a nominal).
  std::vector<Sentence> f() const;
  nlohmann::json to_json() const;
};

// Omega_p included in Omega_q and Gamma_p included in Gamma_q.
bool leq(const Condition& p, const Condition& q);

// Certifies consistency of gamma over base; PreconditionFailed when the oracle
// shows none, OracleInconclusive when it cannot decide.
Condition initial_condition(const SigPtr& base, const std::vector<Sentence>& gamma, const SearchBounds& bounds);

// Adds constants and sentences and re-certifies. Throws PreconditionFailed
// when the result is inconsistent in closed mode and ConsistencyLost when an
// open-mode search finds no model.
Condition extend(const Condition& p, const std::vector<HenkinConstant>& fresh, const std::vector<Sentence>& add,
                 const SearchBounds& bounds);

// Allocates unused names role0, role1, ... in allocation order.
class HenkinPool {
 public:
  explicit HenkinPool(char role) : role_(role) {}
  HenkinConstant fresh(const Condition& p, const std::string& sort);
  char role() const { return role_; }

 private:
  char role_;
  int next_ = 0;
};

// Three-valued forcing (p, k) ||- phi; Unknown when an oracle call in open mode
// is inconclusive. Negation is decided by inconsistency of Gamma_p u {@k phi};
// store is normalized to phi[z <- k]; existentials range over ground rigid
// terms of Omega_p up to bounds.term_depth.
Truth forces(const Condition& p, const std::string& k, const Sentence& phi, const SearchBounds& bounds);
// Gamma_p entails @k phi.
Truth weak_forces(const Condition& p, const std::string& k, const Sentence& phi, const SearchBounds& bounds);

enum class ExpandRule { SF1, SF2, SF3 };
std::string rule_name(ExpandRule r);

// SF1: p entails (@k) or{...}; adds the first disjunct consistent with p.
// SF2: p entails @k <l> phi; adds a nominal c with @k <l> c and @c phi.
// SF3: p entails (@k) exists x . phi; adds a constant c with (@k) phi[x <- c].
struct ExpandDirective {
  ExpandRule rule;
  std::optional<std::string> at;
  Sentence sentence;  // the disjunction, diamond or existential without the retrieve
};

struct Expansion {
  Condition q;
  std::vector<HenkinConstant> fresh;
  std::vector<Sentence> added;
};

// Throws PreconditionFailed when the trigger entailment is refuted or
// exhausted-false, OracleInconclusive when it cannot be certified.
Expansion expand(const Condition& p, const ExpandDirective& d, HenkinPool& pool, const SearchBounds& bounds);

// A condition q >= p with (q, k) ||- phi, built along the structure of phi, or
// none when Gamma_p u {@k phi} is inconsistent.
struct ForcingExtension {
  Truth consistent = Truth::Unknown;
  std::optional<Condition> q;
};
ForcingExtension force_extension(const Condition& p, const std::string& k, const Sentence& phi, HenkinPool& pool,
                                 const SearchBounds& bounds);

// Cantor pairing; pair(i, j) >= max(i, j).
std::size_t cantor_pair(std::size_t i, std::size_t j);
std::pair<std::size_t, std::size_t> cantor_unpair(std::size_t n);

struct TranscriptStep {
  std::string kind;
  std::string sentence;
  std::string decision;
  std::vector<std::string> fresh;
};

struct Transcript {
  std::vector<TranscriptStep> steps;
  std::string result;
  nlohmann::json to_json() const;
};

struct GenericOptions {
  int sentence_depth = 1;
  std::size_t max_sentences = 400;
};

struct GenericRun {
  std::vector<Condition> chain;
  Transcript transcript;
  std::string point;         // nominal naming the world where Gamma_0 holds
  std::vector<Sentence> psi;  // forced basic sentences of the last condition
  BasicModel model;
  // Sentences of the last condition not true at the point of the model.
  std::vector<std::string> unsatisfied;
};

// Decides scheduled @k gamma pairs for schedule_budget steps, adding Henkin
// witnesses for disjunctions, diamonds and existentials, then returns the
// basic model of the forced basic sentences. Throws PreconditionFailed when
// Gamma_0 is inconsistent.
GenericRun build_generic(const SigPtr& base, const std::vector<Sentence>& gamma0, std::size_t schedule_budget,
                         const SearchBounds& bounds, const GenericOptions& opts = {});

// ---------------------------------------------------------------------------
// Interpolation

struct WitnessPair {
  KripkeStructure a;
  int wa = 0;
  KripkeStructure b;
  int wb = 0;
};

// Checks (M_a, wa) |= phi_a, (M_b, wb) |= not phi_b and that the reducts along
// chi and delta are quasi-isomorphic at the points; returns the isomorphism.
std::optional<ModelMorphism> certify_pair(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b,
                                          const WitnessPair& pair);

struct CandidateOutcome {
  Sentence candidate;
  std::string verdict;  // "refuted-a", "refuted-b", "interpolant", "unknown"
  std::string source;   // "stored-witness" or "oracle"
};

struct InterpolantSearch {
  std::optional<Sentence> interpolant;
  std::vector<CandidateOutcome> candidates;
};

// Enumerates Delta-sentences up to depth and returns the least phi with
// phi_a |= chi(phi) and delta(phi) |= phi_b, both confirmed exhaustively in
// closed mode. Hint pairs refute candidates before the oracle is consulted.
InterpolantSearch interpolant_search(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b,
                                     int depth, const SearchBounds& bounds,
                                     const std::vector<WitnessPair>& hints = {});

enum class RunKind { Interpolant, Witnesses, Inconclusive };
std::string run_kind_name(RunKind k);

struct InterpolationRun {
  RunKind kind = RunKind::Inconclusive;
  std::optional<Sentence> interpolant;
  std::optional<WitnessPair> witnesses;
  std::optional<ModelMorphism> iso;
  std::string witness_source;  // "chains" or "certified-pair"
  std::string reason;          // set when inconclusive
  InterpolantSearch search;
  std::vector<Condition> chain_a, chain_b;
  Transcript transcript;
};

// Runs interpolant_search; without an interpolant, grows the dual chains for
// step_budget steps, extracts their basic models and checks the reducts for
// quasi-isomorphism, falling back to the first certified hint pair.
InterpolationRun dual_chain(const SignatureSquare& sq, const Sentence& phi_a, const Sentence& phi_b, int depth,
                            std::size_t step_budget, const SearchBounds& bounds,
                            const std::vector<WitnessPair>& hints = {});

}  // namespace hwb
