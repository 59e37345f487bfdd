#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwb/kripke.hpp"
#include "hwb/syntax.hpp"

namespace hwb {

enum class SearchMode { Open, Closed };

// Pins the enumerated class to one world count and exact carrier sizes.
// Sorts absent from `carriers` keep the bound from SearchBounds.
struct DomainSpec {
  int worlds = 1;
  std::map<std::string, int> carriers;
};

// Node budget used when none is given; HWB_BUDGET overrides it.
std::size_t default_budget();

struct SearchBounds {
  int max_worlds = 2;
  int max_carrier = 2;
  std::map<std::string, int> carrier;  // per-sort overrides of max_carrier
  int term_depth = 2;
  std::size_t budget = default_budget();
  SearchMode mode = SearchMode::Open;
  std::optional<DomainSpec> domain;

  int carrier_bound(const std::string& sort) const;
  // Throws PreconditionFailed unless worlds >= 1, carriers and depth >= 0, budget > 0 and every named sort exists.
  void validate(const HybridSignature& sig) const;
};

enum class VerdictTag { Satisfiable, Refuted, NoneWithinBounds, ExhaustedComplete };
std::string tag_name(VerdictTag t);

struct PointedWitness {
  KripkeStructure model;
  int world = 0;
};

struct OracleVerdict {
  VerdictTag tag = VerdictTag::NoneWithinBounds;
  std::optional<PointedWitness> witness;
  SearchBounds bounds;
  std::size_t nodes = 0;

  bool found() const { return witness.has_value(); }
  // No model exists in the closed class.
  bool exhausted() const { return tag == VerdictTag::ExhaustedComplete; }
  // Neither found nor exhausted.
  bool inconclusive() const { return tag == VerdictTag::NoneWithinBounds; }
};

// Least pointed model (in canonical order) satisfying every sentence of
// gamma at one world. Throws BudgetExceeded when the node budget runs out.
OracleVerdict find_model(const SigPtr& sig, const std::vector<Sentence>& gamma, const SearchBounds& bounds);
OracleVerdict consistent(const SigPtr& sig, const std::vector<Sentence>& gamma, const SearchBounds& bounds);
// Searches for a pointed countermodel of gamma u {not psi}; Refuted carries it.
OracleVerdict entails(const SigPtr& sig, const std::vector<Sentence>& gamma, const Sentence& psi,
                      const SearchBounds& bounds);
// As entails, with psi evaluated at the world named by k.
OracleVerdict entails_at(const SigPtr& sig, const std::vector<Sentence>& gamma, const std::string& k,
                         const Sentence& psi, const SearchBounds& bounds);

// Plain generate-and-test over the bounded class, in canonical order, without
// pruning. Stops early when `visit` returns false. Returns the model count visited.
std::size_t enumerate_models(const SigPtr& sig, const SearchBounds& bounds,
                             const std::function<bool(const KripkeStructure&)>& visit);

nlohmann::json to_json(const SearchBounds& b);
nlohmann::json to_json(const OracleVerdict& v);

}  // namespace hwb
