#pragma once

#include <stdexcept>
#include <string>

namespace galab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GALAB_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

GALAB_DEFINE_ERROR(InvalidArgument);
GALAB_DEFINE_ERROR(StencilError);
GALAB_DEFINE_ERROR(ShapeError);
GALAB_DEFINE_ERROR(ExactnessError);
GALAB_DEFINE_ERROR(PositivityError);
GALAB_DEFINE_ERROR(ZeroPotentialError);
GALAB_DEFINE_ERROR(SingularOmegaError);
GALAB_DEFINE_ERROR(DegenerateChartError);
GALAB_DEFINE_ERROR(BranchError);
GALAB_DEFINE_ERROR(NormalizationError);
GALAB_DEFINE_ERROR(MeromorphicViolation);
GALAB_DEFINE_ERROR(FitError);
GALAB_DEFINE_ERROR(DegreeError);
GALAB_DEFINE_ERROR(EvalError);

#undef GALAB_DEFINE_ERROR

/// Syntax or name-resolution failure in the expression mini-language.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace galab
