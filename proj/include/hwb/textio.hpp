#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hwb/kripke.hpp"
#include "hwb/sigcat.hpp"
#include "hwb/syntax.hpp"

namespace hwb {

enum class DeclKind { Signature, Morphism, Square, Model, Presentation, Sentence };

struct MorphismDecl {
  SignatureMorphism morphism;
  std::string source, target;  // signature names
};

struct SquareDecl {
  SignatureSquare square;
  bool is_pushout = false;
  // Morphism names: chi, delta, and (unless a pushout) delta_a, chi_b.
  std::array<std::string, 4> parts;
};

struct ModelDecl {
  std::string sig;
  KripkeStructure model;
};

struct PresentationDecl {
  std::string sig;
  Presentation presentation;
};

struct SentenceDecl {
  std::string sig;
  Sentence sentence;
};

// Declarations share one namespace. The apex of `square S = pushout(...)` is
// registered as signature `S_d` without appearing in `order`.
struct Document {
  struct Entry {
    DeclKind kind;
    std::string name;
  };
  std::vector<Entry> order;
  std::map<std::string, SigPtr> signatures;
  std::map<std::string, MorphismDecl> morphisms;
  std::map<std::string, SquareDecl> squares;
  std::map<std::string, ModelDecl> models;
  std::map<std::string, PresentationDecl> presentations;
  std::map<std::string, SentenceDecl> sentences;

  // Each throws ResolveError on an unknown name.
  const SigPtr& signature(const std::string& name) const;
  const SignatureMorphism& morphism(const std::string& name) const;
  const SignatureSquare& square(const std::string& name) const;
  const KripkeStructure& model(const std::string& name) const;
  const Presentation& presentation(const std::string& name) const;
  const Sentence& sentence(const std::string& name) const;
  // Name of a registered signature with this fingerprint, or "".
  std::string signature_name(const SigPtr& sig) const;
  bool has(const std::string& name) const;
};

// Declarations are appended to `base`; names must not repeat.
Document parse_document(std::string_view text, Document base = {});
Sentence parse_sentence(const Scope& scope, std::string_view text);
Term parse_term(const Scope& scope, std::string_view text);

std::string print_document(const Document& doc);
std::string print_signature(const std::string& name, const HybridSignature& sig);
std::string print_morphism(const std::string& name, const std::string& source, const std::string& target,
                           const SignatureMorphism& m);
std::string print_model(const std::string& name, const std::string& sig_name, const KripkeStructure& m);
std::string print_presentation(const std::string& name, const std::string& sig_name, const Presentation& p);
// Primitive syntax only; every tag printed; overloaded names annotated.
std::string print_sentence(const Scope& scope, const Sentence& s);
std::string print_term(const Scope& scope, const Term& t);
// Quotes a name with backticks unless it lexes as a plain identifier.
std::string quote_name(const std::string& name);

inline const char* kSchema = "hwb/1";

nlohmann::json to_json(const HybridSignature& sig);
nlohmann::json to_json(const KripkeStructure& m);
// {frameMap, perWorldMaps}; rigid sorts appear under the key "shared".
nlohmann::json morphism_json(const KripkeStructure& a, const KripkeStructure& b, const ModelMorphism& h);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const SquareReport& r);

}  // namespace hwb
