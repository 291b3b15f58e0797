#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"
#include "reluwalk/trace.hpp"

namespace reluwalk {

enum class Algorithm { kPga, kPpga, kPpgaLr, kLpWalk };

std::string_view to_string(Algorithm algo) noexcept;
/// Accepts "pga", "ppga", "ppga-lr", "lp-walk"; InputError otherwise.
Algorithm parse_algorithm(std::string_view name);
bool is_gradient_based(Algorithm algo) noexcept;

struct OptimizerConfig {
  double learning_rate = 0.1;       // gamma
  double restart_noise = 2.0;       // Xi; perturbation std-dev is Xi / sqrt(n0)
  double error_threshold = 1e-3;    // epsilon
  std::size_t tolerance_window = 100;  // k
  std::optional<double> time_limit;    // seconds
  std::optional<std::uint64_t> iteration_limit;
  std::uint64_t seed = 0;
  /// Also restart after k consecutive iterations without improvement.
  bool stall_reset = false;
  /// Replaces the uniform initial sample when set.
  std::optional<std::vector<double>> initial_point;
  std::size_t trace_cap = 100000;

  /// InputError unless the fields are usable with `box`.
  void validate(const Box& box) const;
  double perturbation_scale(std::size_t input_dim) const;
};

struct RunResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::vector<TraceRow> trace;
  std::uint64_t iterations = 0;
  std::uint64_t resets = 0;
  std::uint64_t valve_steps = 0;
  std::uint64_t lp_failures = 0;
  std::uint64_t seed = 0;
};

enum class ValveMode { kAdaptive, kFixed };

/// Adaptive mode recomputes V = 1/|grad f| and c = u at every step.
struct ValveParams {
  ValveMode mode = ValveMode::kAdaptive;
  double valve = 2.0;  // V, fixed mode only
  double scale = 1.0;  // c, fixed mode only

  static ValveParams adaptive() { return {}; }
  static ValveParams fixed(double valve, double scale) { return {ValveMode::kFixed, valve, scale}; }
};

/// x' = P(x + gamma * grad f(x)); x unchanged when the gradient vanishes.
std::vector<double> pga_step(const Network& net, const Box& box, std::span<const double> x,
                             double learning_rate);

struct ValveStepResult {
  std::vector<double> next;
  double u = 0.0;
  bool used_valve = false;
  double valve = 0.0;  // V actually used
  double scale = 0.0;  // c actually used
  /// Length of the step before projection.
  double step_length = 0.0;
};

/// Linear-region valve step. With u from the ratio test, takes
/// P(x + c * grad/|grad|) when V * u >= gamma and the plain PGA step otherwise.
/// u = 0 never triggers the valve. An infinite c (adaptive mode, no boundary
/// ahead) moves every coordinate with nonzero gradient to the bound it points
/// at, which is the limit of the projection as c grows.
ValveStepResult valve_step(const Network& net, const Box& box, std::span<const double> x,
                           double learning_rate, const ValveParams& valve);

/// Per-iteration view of the restart logic, for tests and diagnostics.
struct PpgaEvent {
  std::uint64_t iteration = 0;
  double value = 0.0;             // f at the stepped iterate
  bool improved = false;          // beat the best since reset
  bool small_improvement = false; // and the gain was below f * epsilon
  bool reset = false;
  std::size_t counter = 0;        // r after this iteration
  double best_since_reset = 0.0;  // after this iteration (post-reset if one happened)
  double best = 0.0;
};
using PpgaObserver = std::function<void(const PpgaEvent&)>;

RunResult pga(const Network& net, const Box& box, const OptimizerConfig& cfg);
RunResult ppga(const Network& net, const Box& box, const OptimizerConfig& cfg,
               const PpgaObserver& observer = {});
RunResult ppga_lr(const Network& net, const Box& box, const OptimizerConfig& cfg,
                  const ValveParams& valve = ValveParams::adaptive(),
                  const PpgaObserver& observer = {});

inline constexpr double kLpWalkImprovement = 1e-9;
inline constexpr double kLpWalkPastFraction = 1e-4;  // of the box diagonal

/// Repeatedly maximises f over the closure of the current region and steps
/// slightly past the LP optimum along the line from the previous iterate.
/// Stops at the first LP that does not improve the walk's incumbent by more
/// than kLpWalkImprovement. An LP failure restarts from a fresh uniform sample.
RunResult lp_walk(const Network& net, const Box& box, const OptimizerConfig& cfg);

RunResult run_algorithm(Algorithm algo, const Network& net, const Box& box,
                        const OptimizerConfig& cfg);

}  // namespace reluwalk
