#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "reluwalk/geometry.hpp"

namespace reluwalk {

namespace lp_tolerance {
/// Allowed constraint violation of a returned point, in original units.
inline constexpr double kFeasibility = 1e-7;
/// Smallest tableau entry accepted as a pivot.
inline constexpr double kPivot = 1e-9;
/// Reduced-cost threshold on the (rescaled) objective.
inline constexpr double kOptimality = 1e-9;
}  // namespace lp_tolerance

/// maximize objective . x  s.t. every halfspace holds and x lies in box.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Halfspace> halfspaces;
  Box box;
};

enum class LpStatus { kOptimal, kInfeasible, kSolverFailure };

std::string_view to_string(LpStatus status) noexcept;

struct LpOutcome {
  LpStatus status = LpStatus::kSolverFailure;
  std::optional<std::vector<double>> point;
  std::optional<double> value;
  std::size_t pivots = 0;
};

/// Dense bounded-variable simplex with Bland's rule and a phase-1 artificial
/// objective. Box bounds are carried as variable bounds, not rows. Problems
/// have a finite box, so they are never unbounded. Deterministic.
///
/// kSolverFailure is reported when the iteration cap is hit, when no pivot
/// above kPivot exists where one is needed, or when the final point fails the
/// kFeasibility check against the original constraints.
LpOutcome solve_lp(const LinearProgram& lp);

}  // namespace reluwalk
