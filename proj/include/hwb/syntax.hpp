#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwb/sigcat.hpp"

namespace hwb {

// A variable or Henkin constant: a constant of sort in S^e owned by a signature.
// Roles: 'v' variable, 'u'/'o' side Henkin constants, 'c' bridge constants.
struct Variable {
  std::string name;
  std::string sort;   // a rigid sort or `nom`
  std::string owner;  // fingerprint of the ambient signature
  char role = 'v';

  bool operator==(const Variable&) const = default;
  bool is_nominal() const { return sort == kNom; }
  FunSym as_constant() const { return {name, {}, sort}; }
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// `at` is empty for Here. Rigid symbols always carry Here.
struct TermNode {
  FunSym fun;
  std::optional<std::string> at;
  std::vector<Term> args;
  std::string key;
};

// Element of S-bar; `at` is empty for flexible Here sorts and for every rigid sort.
struct HybridSort {
  std::string sort;
  std::optional<std::string> at;
  bool operator==(const HybridSort&) const = default;
  std::string str() const;
};

// Ambient signature plus the variables bound by enclosing binders.
class Scope {
 public:
  explicit Scope(SigPtr sig) : sig_(std::move(sig)) {}

  const SigPtr& sig() const { return sig_; }
  const std::vector<Variable>& bound() const { return bound_; }

  // Throws ClashError on a name already used with the same profile and
  // FlexibleQuantificationError on a sort outside S^e.
  Scope with(const Variable& v) const;
  // A variable of the given sort owned by this scope's signature.
  Variable variable(const std::string& name, const std::string& sort, char role = 'v') const;

  bool is_nominal(const std::string& k) const;
  bool is_binary_modality(const std::string& l) const;
  bool has_fun(const FunSym& f) const;
  bool is_rigid_fun(const FunSym& f) const;
  bool is_rigid_sort(const std::string& s) const { return sig_->is_rigid_sort(s); }
  // Signature symbols and bound constants with this name.
  std::vector<FunSym> funs_named(const std::string& name) const;
  // Least `prefix{i}` unused as a nominal, constant or bound name.
  std::string fresh_name(const std::string& prefix = "v") const;
  bool name_in_use(const std::string& name) const;

 private:
  SigPtr sig_;
  std::vector<Variable> bound_;
};

Term make_app(const Scope& scope, const FunSym& f, std::vector<Term> args, std::optional<std::string> at = {});
Term make_const(const Scope& scope, const FunSym& f, std::optional<std::string> at = {});
// Validates the whole tree and returns its hybrid sort.
HybridSort sort_of(const Term& t, const Scope& scope);
int term_depth(const Term& t);
// Compact rendering, e.g. `f@k(c@k, z)`.
std::string show(const Term& t);
// Replaces every Here tag by `k`, keeping explicit tags (and the worlds they select for subterms).
Term anchor(const Scope& scope, const Term& t, const std::string& k);

enum class SenKind { Nominal, Eq, Rel, Or, Not, At, Diamond, Store, Exists };

struct SentenceNode;
using Sentence = std::shared_ptr<const SentenceNode>;

struct SentenceNode {
  SenKind kind;
  std::string name;  // nominal, modality or retrieve target
  RelSym rel;
  std::optional<std::string> rel_at;
  std::vector<Term> terms;
  std::vector<Sentence> subs;  // Or: sorted by key, deduplicated
  Variable var;                // Store and Exists
  std::string key;
};

inline bool same(const Sentence& a, const Sentence& b) { return a->key == b->key; }

namespace sen {
Sentence nominal(const Scope& scope, const std::string& k);
Sentence eq(const Scope& scope, const Term& l, const Term& r);
Sentence rel(const Scope& scope, const RelSym& r, std::vector<Term> args, std::optional<std::string> at = {});
Sentence disj(std::vector<Sentence> subs);
Sentence neg(const Sentence& s);
Sentence at(const Scope& scope, const std::string& k, const Sentence& s);
Sentence diamond(const Scope& scope, const std::string& l, const Sentence& s);
// `body` must be well formed over scope.with(z).
Sentence store(const Scope& scope, const Variable& z, const Sentence& body);
Sentence exists(const Scope& scope, const Variable& x, const Sentence& body);

// Derived forms, expanded into primitives.
Sentence bot();
Sentence top();
Sentence conj(std::vector<Sentence> subs);
Sentence implies(const Sentence& a, const Sentence& b);
Sentence box(const Scope& scope, const std::string& l, const Sentence& s);
Sentence forall(const Scope& scope, const Variable& x, const Sentence& body);
// Requires exactly one modality, of rank 2.
Sentence until(const Scope& scope, const Sentence& phi, const Sentence& psi);
}  // namespace sen

// Revalidates every node against `scope`.
void check_sentence(const Sentence& s, const Scope& scope);
int sentence_depth(const Sentence& s);

// Translation along a signature morphism; binders are renamed on clash.
Sentence translate(const SignatureMorphism& chi, const Sentence& s);
Term translate(const SignatureMorphism& chi, const Term& t);

// Maps constants of `source` outside `target` to ground rigid terms (or
// nominals) of `target`; every other symbol is shared.
struct Substitution {
  SigPtr source;
  SigPtr target;
  std::vector<std::pair<FunSym, Term>> constants;
  std::vector<std::pair<std::string, std::string>> nominals;
};

// Checks sort preservation and that the images are ground rigid terms.
void validate_substitution(const Substitution& theta);
Sentence apply_substitution(const Substitution& theta, const Sentence& s);
Term apply_substitution(const Substitution& theta, const Term& t);

// Replaces free occurrences of the nominal `z` by `k` (for store normalization).
Sentence replace_nominal(const Scope& scope, const Sentence& s, const std::string& z, const std::string& k);
// Replaces free occurrences of constant `x` by term `t`.
Sentence replace_constant(const Scope& scope, const Sentence& s, const FunSym& x, const Term& t);

std::vector<Sentence> rigidify(const Scope& scope, const Sentence& s);
std::vector<Sentence> rigidify(const Scope& scope, const std::vector<Sentence>& ss);

enum class SenClass { Sen0, SenB, Full };
SenClass classify_sentence(const Sentence& s);
std::string sen_class_name(SenClass c);

struct Presentation {
  SigPtr sig;
  std::vector<Sentence> sentences;
};

struct EnumBudget {
  int or_fanout = 2;
  int term_depth = 1;
  std::size_t max_count = 20000;
  bool binders = true;
};

// All sentences with at most `depth` operator nodes, depth-major then by key.
std::vector<Sentence> enumerate_sentences(const Scope& scope, int depth, const EnumBudget& budget = {});
// Ground terms up to depth, Here and every nominal tag, grouped by hybrid sort.
std::vector<Term> ground_terms(const Scope& scope, int depth);

}  // namespace hwb
