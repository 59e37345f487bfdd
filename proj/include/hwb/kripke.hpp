#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hwb/sigcat.hpp"
#include "hwb/syntax.hpp"

namespace hwb {

// Table entry with no value; legal only when the codomain carrier is empty.
inline constexpr int kUndef = -1;
// Table entry outside a bounded term universe; evaluates to Unknown.
inline constexpr int kSentinel = -2;

// Index-based finite Kripke structure. Rigid sorts, functions and relations
// store a single slot shared by every world; flexible ones store one slot per world.
struct KripkeStructure {
  SigPtr sig;
  std::vector<std::string> worlds;
  std::vector<int> nom_val;                  // per nominal: world index
  std::vector<std::vector<char>> mod_rel;    // per modality: flat over worlds^rank
  std::vector<std::vector<std::vector<std::string>>> carriers;  // [sort][slot] element labels
  std::vector<std::vector<std::vector<int>>> fun_tab;           // [fun][slot] mixed-radix table
  std::vector<std::vector<std::vector<char>>> rel_tab;          // [rel][slot]
  bool partial = false;

  int num_worlds() const { return static_cast<int>(worlds.size()); }
  int sort_slot(int s, int w) const { return sig->sort_rigid[s] ? 0 : w; }
  int fun_slot(int f, int w) const { return sig->fun_rigid[f] ? 0 : w; }
  int rel_slot(int r, int w) const { return sig->rel_rigid[r] ? 0 : w; }
  int size(int s, int w) const { return static_cast<int>(carriers[s][sort_slot(s, w)].size()); }
  std::size_t domain_size(const std::vector<int>& arg_sorts, int w) const;
  std::size_t index(const std::vector<int>& arg_sorts, int w, const int* args) const;
  int apply(int f, int w, const int* args) const;
  bool holds(int r, int w, const int* args) const;
  bool edge(int l, int from, int to) const;
  int world_index(const std::string& name) const;
  int element_index(int s, int w, const std::string& label) const;

  bool operator==(const KripkeStructure&) const = default;
};

// Allocates tables for the given world count; every carrier starts empty.
KripkeStructure blank_model(const SigPtr& sig, int worlds);
// Sets the carrier of sort `s` at `w` (all worlds for rigid sorts) to `n`
// elements labelled e0..e{n-1}; call resize_tables afterwards.
void set_carrier(KripkeStructure& m, int s, int w, int n);
// Sizes every table to its domain; new entries are 0 (or kUndef on an empty codomain).
void resize_tables(KripkeStructure& m);

// Collects every structural problem; throws InvalidModel if any.
void validate_model(const KripkeStructure& m);
// First structural difference (labels ignored unless `labels`).
std::optional<std::string> first_difference(const KripkeStructure& a, const KripkeStructure& b, bool labels = false);

enum class Truth : std::uint8_t { False, True, Unknown };

struct CompiledSentence;
struct CompiledDeleter {
  void operator()(CompiledSentence* p) const;
};
using Compiled = std::unique_ptr<CompiledSentence, CompiledDeleter>;

// Resolves symbols once; the result evaluates on any model over scope.sig().
Compiled compile(const Scope& scope, const Sentence& s);
Truth evaluate(const KripkeStructure& m, int w, const CompiledSentence& c);

struct PointedModel {
  const KripkeStructure* model;
  int world;
};

// Throws EmptyCarrier (no denotation) or PartialModel (sentinel reached).
int eval_term(const PointedModel& pm, const Term& t);
Truth truth(const PointedModel& pm, const Sentence& s);
// Throws PartialModel when the value depends on a sentinel.
bool satisfies(const PointedModel& pm, const Sentence& s);
// Satisfaction at every world; vacuously true on an empty frame.
bool satisfies_globally(const KripkeStructure& m, const Sentence& s);

KripkeStructure reduct(const SignatureMorphism& chi, const KripkeStructure& m);

// Expansion of a Delta[C]-model reduct along a substitution: interprets each
// substituted constant as the denotation of its image term.
KripkeStructure reduct_along(const Substitution& theta, const KripkeStructure& m);

KripkeStructure amalgamate(const SignatureSquare& sq, const KripkeStructure& ma, const KripkeStructure& mb);

// Element maps are indexed [sort][slot][element] over the source carriers;
// kUndef marks elements outside the domain of a partial map.
struct ModelMorphism {
  std::vector<int> frame;
  std::vector<std::vector<std::vector<int>>> elems;
  bool operator==(const ModelMorphism&) const = default;
};

// Preservation-only homomorphism check; partial maps are checked where defined.
bool is_homomorphism(const KripkeStructure& a, const KripkeStructure& b, const ModelMorphism& h);
// Exhaustive search for a homomorphism a -> b.
std::optional<ModelMorphism> find_homomorphism(const KripkeStructure& a, const KripkeStructure& b,
                                               std::size_t budget = 50'000'000);
std::size_t count_homomorphisms(const KripkeStructure& a, const KripkeStructure& b, std::size_t cap = 2);

// Kept masks over the original carriers: [sort][slot][element].
using Mask = std::vector<std::vector<std::vector<char>>>;

struct GeneratedSubmodel {
  KripkeStructure model;
  Mask kept;
  ModelMorphism inclusion;  // model -> original
};

Mask generated_mask(const KripkeStructure& m);
GeneratedSubmodel generated_submodel(const KripkeStructure& m);

// Checks that h restricted to the generated parts is an isomorphism onto the generated parts of b.
std::optional<std::string> check_generated_iso(const KripkeStructure& a, const KripkeStructure& b,
                                               const ModelMorphism& h);

// Isomorphism between generated submodels, over the original indices.
// With `point`, the frame map must send point->first to point->second.
std::optional<ModelMorphism> quasi_isomorphic(const KripkeStructure& a, const KripkeStructure& b,
                                              std::optional<std::pair<int, int>> point = std::nullopt);

struct Reachability {
  bool reachable;
  std::string witness;  // an unreached world or element when not reachable
};
Reachability is_reachable(const KripkeStructure& m);

struct TermModel {
  KripkeStructure model;
  // For each element: the term it stands for, indexed like carriers.
  std::vector<std::vector<std::vector<Term>>> terms;
};
TermModel term_model(const SigPtr& sig, int depth);

struct BasicModel {
  KripkeStructure model;
  // Term label -> element label in the quotient.
  std::vector<std::pair<std::string, std::string>> congruence;
};
// Psi members must classify as SenB, or be nominal identities @k j.
BasicModel basic_model(const SigPtr& sig, const std::vector<Sentence>& psi, int depth);

struct Lifted {
  KripkeStructure model;
  ModelMorphism iso;  // over the indices of n_prime, onto model
};
// h : G(n_prime|chi) -> G(m), given over the indices of reduct(chi, n_prime).
Lifted lift_model(const SignatureMorphism& chi, const KripkeStructure& m, const KripkeStructure& n_prime,
                  const ModelMorphism& h);

// Restriction of a morphism over the target signature to the image of chi.
ModelMorphism reduct_morphism(const SignatureMorphism& chi, const ModelMorphism& h);

struct Equivalence {
  bool equivalent;
  std::optional<Sentence> distinguishing;
  int world_a = -1, world_b = -1;
  std::size_t sentences_checked = 0;
};
// Compares truth at each given pair of points on every enumerated sentence.
Equivalence equiv_at_depth(const KripkeStructure& a, const KripkeStructure& b,
                           const std::vector<std::pair<int, int>>& points, int depth, const EnumBudget& budget = {});

}  // namespace hwb
