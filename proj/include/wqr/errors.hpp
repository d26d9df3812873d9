#pragma once

#include <stdexcept>
#include <string>

namespace wqr {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define WQR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

WQR_DEFINE_ERROR(DimensionMismatch);
WQR_DEFINE_ERROR(InvalidArgument);
WQR_DEFINE_ERROR(InfeasibleForcedCount);
WQR_DEFINE_ERROR(BudgetExceeded);
WQR_DEFINE_ERROR(SingularPoint);
WQR_DEFINE_ERROR(OutsideDomain);
WQR_DEFINE_ERROR(OnInterface);
WQR_DEFINE_ERROR(ScheduleInfeasible);
WQR_DEFINE_ERROR(ScheduleMismatch);
WQR_DEFINE_ERROR(PathNotSpine);
WQR_DEFINE_ERROR(DegenerateImage);
WQR_DEFINE_ERROR(InconclusiveNearCritical);
WQR_DEFINE_ERROR(ConfigError);

#undef WQR_DEFINE_ERROR

}  // namespace wqr
