#pragma once

#include <stdexcept>
#include <string>

namespace kerrcat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define KERRCAT_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

KERRCAT_DEFINE_ERROR(InvalidArgument);
KERRCAT_DEFINE_ERROR(CutoffTooSmall);
KERRCAT_DEFINE_ERROR(DimensionMismatch);
KERRCAT_DEFINE_ERROR(NonPositiveInput);
KERRCAT_DEFINE_ERROR(SeriesNotConverged);
KERRCAT_DEFINE_ERROR(GridTooSmall);
KERRCAT_DEFINE_ERROR(StepSizeUnstable);
KERRCAT_DEFINE_ERROR(CutoffLeak);
KERRCAT_DEFINE_ERROR(DegenerateBranches);
KERRCAT_DEFINE_ERROR(ConfigError);

#undef KERRCAT_DEFINE_ERROR

/// Raised when a coherence trace never decays enough to be fitted.
/// Carries a lower bound on the 1/e time when one can be given.
class InsufficientDecay : public Error {
 public:
  InsufficientDecay(const std::string& what, double lower_bound)
      : Error(what), lower_bound_(lower_bound) {}
  const char* kind() const noexcept override { return "InsufficientDecay"; }
  double lower_bound() const noexcept { return lower_bound_; }

 private:
  double lower_bound_;
};

}  // namespace kerrcat
