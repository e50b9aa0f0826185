#pragma once

#include <stdexcept>
#include <string>

namespace vortex2c {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define VORTEX2C_ERROR(Name)                                              \
  class Name : public Error {                                             \
  public:                                                                 \
    using Error::Error;                                                   \
    const char* kind() const noexcept override { return #Name; }          \
  }

VORTEX2C_ERROR(HypothesisViolation);
VORTEX2C_ERROR(NonPositiveDensity);
VORTEX2C_ERROR(BadGridSpec);
VORTEX2C_ERROR(LengthMismatch);
VORTEX2C_ERROR(BadBoundarySpec);
VORTEX2C_ERROR(SingularJacobian);
VORTEX2C_ERROR(EigenFailure);
VORTEX2C_ERROR(SelectionFailed);
VORTEX2C_ERROR(IllConditionedFit);
VORTEX2C_ERROR(ConfigError);

#undef VORTEX2C_ERROR

}  // namespace vortex2c
