#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"

namespace reluwalk {

/// f restricted to one linear region: slope . x + offset.
struct AffineMap {
  std::vector<double> slope;
  double offset = 0.0;

  double evaluate(std::span<const double> x) const noexcept;
};

/// Preactivation of one hidden neuron as an affine function of the input,
/// valid on the region whose pattern fixed the upstream masks.
struct NeuronAffine {
  std::vector<double> normal;
  double offset = 0.0;
};

AffineMap region_affine(const Network& net, const ActivationPattern& pattern);

/// Flat layer-major list, one entry per hidden neuron.
std::vector<NeuronAffine> neuron_affines(const Network& net, const ActivationPattern& pattern);

/// Closure of the linear region: a_i . x + b_i >= 0 where z_i = 1, <= 0 where z_i = 0.
std::vector<Halfspace> region_halfspaces(const Network& net, const ActivationPattern& pattern);

/// How the per-neuron change along the gradient step is obtained.
enum class DeltaMode {
  /// Directional derivative of g_i inside the current region (a tangent pass).
  /// Equal to g_i(x + grad) - g_i(x) whenever x + grad is still in the region.
  kRegionLinear,
  /// Literal g_i(x + grad) - g_i(x) from a second full forward pass.
  kEmpirical,
};

inline constexpr double kParallelDeltaTolerance = 1e-12;

struct RatioTestResult {
  /// Relative step along grad f to the nearest boundary ahead; +inf if none.
  double u = std::numeric_limits<double>::infinity();
  /// Flat layer-major index of the neuron attaining u.
  std::optional<std::size_t> blocking_neuron;
  std::vector<double> gradient;
  double gradient_norm = 0.0;
};

/// Ratio test along the unnormalised gradient step. Neurons whose ratio
/// -g_i / dg_i is negative, or whose |dg_i| is below kParallelDeltaTolerance,
/// never block. A binding neuron (g_i == 0) with nonzero dg_i yields u = 0.
RatioTestResult ratio_test(const Network& net, std::span<const double> x,
                           DeltaMode mode = DeltaMode::kRegionLinear);

/// Variant reusing a forward trace at x and the gradient computed from it.
RatioTestResult ratio_test(const Network& net, std::span<const double> x, const ForwardTrace& trace,
                           std::vector<double> grad, DeltaMode mode = DeltaMode::kRegionLinear);

/// Per-neuron change of the preactivations along `direction`, holding the
/// pattern of `trace` fixed. Flat layer-major.
std::vector<double> tangent_preactivations(const Network& net, const ForwardTrace& trace,
                                           std::span<const double> direction);

}  // namespace reluwalk
