#pragma once

#include <stdexcept>
#include <string>

namespace impactlab {

// Base class for everything this library throws on bad input or bad state.
struct ImpactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// build_contact_frame: contact-space compliance failed its SPD check.
struct NonPositiveDefinite : ImpactError {
  using ImpactError::ImpactError;
};

// feasible-set ops require an actual impact (v_c' M_c v_c above threshold).
struct ZeroIncomingVelocity : ImpactError {
  using ImpactError::ImpactError;
};

// predict() requires a closing contact (v_n < 0).
struct NotApproaching : ImpactError {
  using ImpactError::ImpactError;
};

// Branch enumeration found no consistent resolution; indicates a logic fault.
struct NoConsistentBranch : ImpactError {
  using ImpactError::ImpactError;
};

// routh_integrate event location failed to converge.
struct StepTooCoarse : ImpactError {
  using ImpactError::ImpactError;
};

struct DegenerateJacobian : ImpactError {
  using ImpactError::ImpactError;
};

struct EmptyBatch : ImpactError {
  using ImpactError::ImpactError;
};

struct ParseError : ImpactError {
  explicit ParseError(const std::string& what, std::size_t row = 0)
      : ImpactError(what), row(row) {}
  std::size_t row = 0;
};

struct MonotonicityError : ImpactError {
  using ImpactError::ImpactError;
};

struct TooShort : ImpactError {
  using ImpactError::ImpactError;
};

struct WindowTooSmall : ImpactError {
  using ImpactError::ImpactError;
};

struct StartsPenetrating : ImpactError {
  using ImpactError::ImpactError;
};

}  // namespace impactlab
