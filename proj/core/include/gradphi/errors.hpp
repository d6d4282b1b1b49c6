#pragma once

#include <stdexcept>
#include <string>

namespace gradphi {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag that the command-line tool prints on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GRADPHI_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

GRADPHI_DEFINE_ERROR(InvalidArgument);
GRADPHI_DEFINE_ERROR(EmptyInterior);
GRADPHI_DEFINE_ERROR(NotIntegrable);
GRADPHI_DEFINE_ERROR(SplitFailed);
GRADPHI_DEFINE_ERROR(StepTooLarge);
GRADPHI_DEFINE_ERROR(NonFinite);
GRADPHI_DEFINE_ERROR(TimeMismatch);
GRADPHI_DEFINE_ERROR(CflViolation);
GRADPHI_DEFINE_ERROR(FluxRangeExceeded);
GRADPHI_DEFINE_ERROR(ConfigError);
GRADPHI_DEFINE_ERROR(FormatError);

#undef GRADPHI_DEFINE_ERROR

}  // namespace gradphi
