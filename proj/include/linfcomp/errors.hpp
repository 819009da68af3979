#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace linfcomp {

// Coarse error families. The CLI maps these onto exit codes.
enum class ErrorCategory {
  invalid_argument,  // caller broke a precondition
  parse,             // malformed input text
  validation,        // well-formed input with invalid content
  domain,            // operation undefined at this point (e.g. zero reference)
  infeasible,        // algorithm cannot produce a result for this dataset
};

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::infeasible: return "infeasible";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, ErrorCategory category, const std::string& message)
      : std::runtime_error(message), kind_(kind), category_(category) {}

  /// Stable machine-readable name, e.g. "NoRetainedCell".
  std::string_view kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string_view kind_;
  ErrorCategory category_;
};

#define LINFCOMP_DEFINE_ERROR(Name, Category)                       \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message)                       \
        : Error(#Name, ErrorCategory::Category, message) {}         \
  };

LINFCOMP_DEFINE_ERROR(InvalidArgument, invalid_argument)
LINFCOMP_DEFINE_ERROR(InvalidComposition, validation)
LINFCOMP_DEFINE_ERROR(ValidationError, validation)
LINFCOMP_DEFINE_ERROR(DuplicateSample, validation)
LINFCOMP_DEFINE_ERROR(NoOverlap, validation)
LINFCOMP_DEFINE_ERROR(LengthMismatch, domain)
LINFCOMP_DEFINE_ERROR(ReferenceZero, domain)
LINFCOMP_DEFINE_ERROR(ZeroComponent, domain)
LINFCOMP_DEFINE_ERROR(AllZeroSubcomposition, domain)
LINFCOMP_DEFINE_ERROR(OutOfRange, domain)
LINFCOMP_DEFINE_ERROR(SameCell, domain)
LINFCOMP_DEFINE_ERROR(FlagMismatch, domain)
LINFCOMP_DEFINE_ERROR(NoRetainedCell, infeasible)
LINFCOMP_DEFINE_ERROR(Infeasible, infeasible)
LINFCOMP_DEFINE_ERROR(DegenerateDataset, infeasible)

#undef LINFCOMP_DEFINE_ERROR

// Carries the 1-based line and column of the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("ParseError", ErrorCategory::parse,
              "line " + std::to_string(line) + ", column " + std::to_string(column) +
                  ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace linfcomp
