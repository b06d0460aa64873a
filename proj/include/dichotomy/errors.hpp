#pragma once

#include <stdexcept>
#include <string>

namespace dichotomy {

enum class ErrorCategory { contract, numerical, not_hyperbolic };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define DICHOTOMY_ERROR(Name, Category)                                    \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(Category, what) {}      \
  };

DICHOTOMY_ERROR(DimensionError, ErrorCategory::contract)
DICHOTOMY_ERROR(ParseError, ErrorCategory::contract)
DICHOTOMY_ERROR(InputError, ErrorCategory::contract)
DICHOTOMY_ERROR(ConfigError, ErrorCategory::contract)
DICHOTOMY_ERROR(SpectrumHit, ErrorCategory::contract)
DICHOTOMY_ERROR(NumericalError, ErrorCategory::numerical)
DICHOTOMY_ERROR(OverflowError, ErrorCategory::numerical)
DICHOTOMY_ERROR(AccuracyError, ErrorCategory::numerical)
DICHOTOMY_ERROR(BracketingError, ErrorCategory::numerical)
DICHOTOMY_ERROR(ContourCollision, ErrorCategory::numerical)
DICHOTOMY_ERROR(NotHyperbolic, ErrorCategory::not_hyperbolic)

#undef DICHOTOMY_ERROR

}  // namespace dichotomy
