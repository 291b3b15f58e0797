#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reluwalk {

/// Final incumbent of one algorithm on one problem; nullopt if it failed.
struct ProblemResult {
  std::string problem;
  std::string algorithm;
  std::optional<double> value;
};

/// Step curve rho(tau): fraction of problems with performance ratio <= tau.
struct ProfileCurve {
  std::string algorithm;
  /// (tau, rho) at tau = 1 and at every distinct finite ratio, tau ascending.
  std::vector<std::pair<double, double>> points;

  double rho(double tau) const noexcept;
};

inline constexpr double kDefaultProfileShift = 1e-6;
inline constexpr double kMinProfileShift = 1e-12;

/// Performance profiles for a maximisation benchmark. Each value becomes the
/// cost  best_p - value + eta_p  with eta_p = max(shift_rel * |best_p|, 1e-12),
/// so the per-problem winner has cost eta_p and ratio 1. A missing value has
/// ratio +inf. Every problem needs at least one finite value.
std::vector<ProfileCurve> performance_profile(const std::vector<ProblemResult>& results,
                                              double shift_rel = kDefaultProfileShift);

/// Header `algorithm,tau,rho`.
void write_profile_csv(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path);
/// Step plot with a log10 tau axis.
void write_profile_svg(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path);

}  // namespace reluwalk
