#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hwb {

// Base of every error raised by the library; `kind()` is a stable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Carries every violation found, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error("ValidationError", join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

 private:
  std::vector<std::string> violations_;
};

struct SymbolIssue {
  std::string symbol;
  std::string reason;
};

class MorphismError : public Error {
 public:
  explicit MorphismError(std::vector<SymbolIssue> issues)
      : Error("MorphismError", render(issues)), issues_(std::move(issues)) {}
  const std::vector<SymbolIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<SymbolIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += "; ";
      out += i.symbol + ": " + i.reason;
    }
    return out;
  }
  std::vector<SymbolIssue> issues_;
};

#define HWB_SIMPLE_ERROR(Name)                                              \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name, what) {}          \
  };

HWB_SIMPLE_ERROR(CompositionError)
HWB_SIMPLE_ERROR(ClashError)
HWB_SIMPLE_ERROR(FlexibleQuantificationError)
HWB_SIMPLE_ERROR(IllFormedTerm)
HWB_SIMPLE_ERROR(IllFormedSentence)
HWB_SIMPLE_ERROR(ResolveError)
HWB_SIMPLE_ERROR(EmptyCarrier)
HWB_SIMPLE_ERROR(PartialModel)
HWB_SIMPLE_ERROR(ReductMismatch)
HWB_SIMPLE_ERROR(EmptyFrame)
HWB_SIMPLE_ERROR(BoundTooSmall)
HWB_SIMPLE_ERROR(CriterionViolation)
HWB_SIMPLE_ERROR(NoRigidTerm)
HWB_SIMPLE_ERROR(InvalidModel)
HWB_SIMPLE_ERROR(BudgetExceeded)
HWB_SIMPLE_ERROR(ConsistencyLost)
HWB_SIMPLE_ERROR(OracleInconclusive)
HWB_SIMPLE_ERROR(BudgetExhausted)
HWB_SIMPLE_ERROR(JointConsistencyLost)
HWB_SIMPLE_ERROR(PreconditionFailed)

#undef HWB_SIMPLE_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, const std::string& detail)
      : Error("ParseError", render(line, column, expected, detail)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string render(int line, int column, const std::vector<std::string>& expected,
                            const std::string& detail) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + detail;
    if (!expected.empty()) {
      out += " (expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i) out += ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

}  // namespace hwb
