#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hwb/errors.hpp"

namespace hwb {

// Sort name reserved for nominals; never a member of S.
inline const std::string kNom = "nom";

struct FunSym {
  std::string name;
  std::vector<std::string> arity;
  std::string result;
  auto operator<=>(const FunSym&) const = default;
  std::string str() const;
};

struct RelSym {
  std::string name;
  std::vector<std::string> arity;
  auto operator<=>(const RelSym&) const = default;
  std::string str() const;
};

struct Modality {
  std::string name;
  int rank = 2;
  auto operator<=>(const Modality&) const = default;
};

struct FolSignature {
  std::set<std::string> sorts;
  std::set<FunSym> functions;
  std::set<RelSym> relations;
};

// Unvalidated description; duplicates are kept so validation can report them.
struct RawFol {
  std::vector<std::string> sorts;
  std::vector<FunSym> functions;
  std::vector<RelSym> relations;
};

struct RawSignature {
  std::vector<std::string> nominals;
  std::vector<Modality> modalities;
  RawFol rigid;
  RawFol full;

  // Adds to `full`, and to `rigid` as well when `is_rigid`.
  RawSignature& sort(const std::string& s, bool is_rigid = false);
  RawSignature& op(const std::string& name, std::vector<std::string> arity, const std::string& result,
                   bool is_rigid = false);
  RawSignature& rel(const std::string& name, std::vector<std::string> arity, bool is_rigid = false);
  RawSignature& nominal(const std::string& k);
  RawSignature& modality(const std::string& name, int rank = 2);
};

struct SortClass {
  std::set<std::string> rigid_sorts;
  std::set<std::string> flexible_sorts;
  std::set<std::string> extended_rigid_sorts;
};

// Validated, immutable. All symbol vectors are sorted; indices are stable.
struct HybridSignature {
  std::vector<std::string> nominals;
  std::vector<Modality> modalities;
  std::vector<std::string> sorts;
  std::vector<bool> sort_rigid;
  std::vector<FunSym> funs;
  std::vector<bool> fun_rigid;
  std::vector<RelSym> rels;
  std::vector<bool> rel_rigid;

  std::vector<std::vector<int>> fun_arg_sorts;
  std::vector<int> fun_result_sort;
  std::vector<std::vector<int>> rel_arg_sorts;

  std::string fingerprint;

  int sort_index(const std::string& s) const;
  int nominal_index(const std::string& k) const;
  int modality_index(const std::string& m) const;
  int fun_index(const FunSym& f) const;
  int rel_index(const RelSym& r) const;
  const std::vector<int>& funs_named(const std::string& name) const;
  const std::vector<int>& rels_named(const std::string& name) const;

  bool is_rigid_sort(const std::string& s) const;
  // S^e membership: rigid sorts and `nom`.
  bool is_extended_rigid(const std::string& s) const;

  FolSignature rigid_part() const;
  FolSignature full_part() const;
  SortClass sort_class() const;
  RawSignature raw() const;
  std::string canonical_text() const;

  // Builds lookup tables; called once by validation.
  void index();

 private:
  std::unordered_map<std::string, int> sort_ix_, nom_ix_, mod_ix_;
  std::map<FunSym, int> fun_ix_;
  std::map<RelSym, int> rel_ix_;
  std::unordered_map<std::string, std::vector<int>> funs_by_name_, rels_by_name_;
};

using SigPtr = std::shared_ptr<const HybridSignature>;

SigPtr validate_signature(const RawSignature& raw);

struct RawMorphism {
  std::map<std::string, std::string> sorts;
  std::vector<std::pair<FunSym, std::string>> functions;
  std::vector<std::pair<RelSym, std::string>> relations;
  std::map<std::string, std::string> nominals;
  std::map<std::string, std::string> modalities;
};

struct SignatureMorphism {
  std::string name;
  SigPtr source;
  SigPtr target;
  std::vector<int> sort_map;
  std::vector<int> fun_map;
  std::vector<int> rel_map;
  std::vector<int> nom_map;
  std::vector<int> mod_map;

  const std::string& map_sort(const std::string& s) const;
  FunSym map_fun(const FunSym& f) const;
  RelSym map_rel(const RelSym& r) const;
  const std::string& map_nominal(const std::string& k) const;
  const std::string& map_modality(const std::string& m) const;
  bool injective_on_sorts() const;
  RawMorphism raw() const;
  bool operator==(const SignatureMorphism& o) const;
};

SignatureMorphism validate_morphism(const SigPtr& source, const SigPtr& target, const RawMorphism& raw,
                                    const std::string& name = "");
SignatureMorphism identity_morphism(const SigPtr& sig);
// Maps every symbol to the same-named symbol of the mapped profile.
SignatureMorphism inclusion_morphism(const SigPtr& source, const SigPtr& target);
SignatureMorphism compose(const SignatureMorphism& first, const SignatureMorphism& second);

struct SignatureSquare {
  std::string name;
  SignatureMorphism chi;      // Delta -> Delta_a
  SignatureMorphism delta;    // Delta -> Delta_b
  SignatureMorphism delta_a;  // Delta_a -> Delta_d
  SignatureMorphism chi_b;    // Delta_b -> Delta_d

  // Lists every symbol on which the two composites disagree.
  std::vector<std::string> commutation_failures() const;
};

SignatureSquare make_square(SignatureMorphism chi, SignatureMorphism delta, SignatureMorphism delta_a,
                            SignatureMorphism chi_b, const std::string& name = "");
SignatureSquare pushout(const SignatureMorphism& chi, const SignatureMorphism& delta);

struct ConstantDecl {
  std::string name;
  std::string sort;  // a rigid sort or `nom`
};

struct Extension {
  SigPtr signature;
  SignatureMorphism inclusion;
};

Extension extend_with_constants(const SigPtr& sig, const std::vector<ConstantDecl>& decls);

enum class Rule { Preservation, I1, I2, J1, J2, SortInjectivity };
std::string rule_name(Rule r);

struct Finding {
  Rule rule;
  std::vector<std::string> symbols;
};

struct CriterionReport {
  std::string morphism;
  bool sort_injective = true;
  std::vector<Finding> violations;

  bool passes() const { return violations.empty(); }
  std::set<Rule> rules() const;
  std::string verdict() const;
};

struct SquareReport {
  CriterionReport chi;
  CriterionReport delta;
  bool cip_guaranteed() const { return chi.passes() || delta.passes(); }
  std::string verdict() const;
};

CriterionReport check_cip_criterion(const SignatureMorphism& m);
SquareReport check_cip_criterion(const SignatureSquare& sq);
// Protection clauses only (Preservation, I1, I2, J1, J2).
bool protects_flexible_symbols(const SignatureMorphism& m);

// Sorts s with a ground term of sort s (T_{Delta,s} nonempty).
std::set<std::string> inhabited_sorts(const HybridSignature& sig);

std::set<std::string> classify_fragment(const HybridSignature& sig);

}  // namespace hwb
