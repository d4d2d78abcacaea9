#pragma once

#include <stdexcept>
#include <string>

namespace hitchin {

/// Broad classes of failure. The CLI maps these onto process exit codes.
enum class ErrorClass { Config, Numerical, Geometry };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

#define HITCHIN_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what)                                  \
        : Error(ErrorClass::Class, std::string(#Name ": ") + what) {}       \
  }

HITCHIN_DEFINE_ERROR(ConfigError, Config);

HITCHIN_DEFINE_ERROR(DegenerateCurve, Geometry);
HITCHIN_DEFINE_ERROR(InconsistentGeometry, Geometry);
HITCHIN_DEFINE_ERROR(CycleSelectionFailure, Geometry);

HITCHIN_DEFINE_ERROR(NearBranchPoint, Numerical);
HITCHIN_DEFINE_ERROR(ContinuationFailure, Numerical);
HITCHIN_DEFINE_ERROR(QuadratureNonconvergence, Numerical);
HITCHIN_DEFINE_ERROR(SingularSystem, Numerical);
HITCHIN_DEFINE_ERROR(NoRealizableH, Numerical);
HITCHIN_DEFINE_ERROR(RankDeficiency, Numerical);
HITCHIN_DEFINE_ERROR(BranchCollision, Numerical);
HITCHIN_DEFINE_ERROR(StepFailure, Numerical);
HITCHIN_DEFINE_ERROR(BilinearViolation, Numerical);
HITCHIN_DEFINE_ERROR(ExpansionResidual, Numerical);
HITCHIN_DEFINE_ERROR(TruncationOverflow, Numerical);
HITCHIN_DEFINE_ERROR(NearThetaDivisor, Numerical);
HITCHIN_DEFINE_ERROR(CalibrationFailure, Numerical);
HITCHIN_DEFINE_ERROR(IllConditionedRoots, Numerical);
HITCHIN_DEFINE_ERROR(AmbiguousAssignment, Numerical);

#undef HITCHIN_DEFINE_ERROR

}  // namespace hitchin
