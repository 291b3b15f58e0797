#include "reluwalk/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "reluwalk/error.hpp"
#include "reluwalk/lp.hpp"
#include "reluwalk/region.hpp"

namespace reluwalk {

GlobalOptimum enumerate_optimum(const Network& net, const Box& box, std::size_t max_neurons) {
  const std::size_t neurons = net.hidden_neuron_count();
  if (neurons > max_neurons) {
    throw InputError("enumerate_optimum: " + std::to_string(neurons) +
                     " hidden neurons exceeds the limit of " + std::to_string(max_neurons));
  }
  if (neurons >= 63) throw InputError("enumerate_optimum: too many neurons to enumerate");
  if (box.dim() != net.input_dim()) throw InputError("box dimension != network input_dim");

  GlobalOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << neurons;
  for (std::uint64_t index = 0; index < count; ++index) {
    const ActivationPattern z = ActivationPattern::from_index(net, index);
    const AffineMap affine = region_affine(net, z);
    const LpOutcome out = solve_lp({affine.slope, region_halfspaces(net, z), box});
    ++best.patterns_enumerated;
    if (out.status == LpStatus::kSolverFailure) ++best.lp_failures;
    if (out.status != LpStatus::kOptimal) continue;
    ++best.feasible_regions;
    const double value = *out.value + affine.offset;
    if (value > best.value) {
      best.value = value;
      best.point = *out.point;
    }
  }
  if (best.feasible_regions == 0) {
    throw std::runtime_error("enumerate_optimum: no feasible region found");
  }
  return best;
}

GridOptimum grid_optimum(const Network& net, const Box& box, std::size_t resolution) {
  const std::size_t n0 = net.input_dim();
  if (n0 > 2) throw InputError("grid_optimum: only available for n0 <= 2");
  if (box.dim() != n0) throw InputError("box dimension != network input_dim");
  if (resolution < 2) throw InputError("grid_optimum: resolution must be >= 2");

  auto coord = [&](std::size_t j, std::size_t i) {
    if (i + 1 == resolution) return box.upper()[j];
    const double t = static_cast<double>(i) / static_cast<double>(resolution - 1);
    return box.lower()[j] + t * (box.upper()[j] - box.lower()[j]);
  };
  GridOptimum best{-std::numeric_limits<double>::infinity(), {}};
  std::vector<double> x(n0);
  ForwardTrace trace;
  const std::size_t outer = n0 == 2 ? resolution : 1;
  for (std::size_t a = 0; a < resolution; ++a) {
    x[0] = coord(0, a);
    for (std::size_t b = 0; b < outer; ++b) {
      if (n0 == 2) x[1] = coord(1, b);
      forward(net, x, trace);
      if (trace.output > best.value) {
        best.value = trace.output;
        best.point = x;
      }
    }
  }
  return best;
}

std::vector<double> finite_diff_gradient(const Network& net, std::span<const double> x, double h) {
  if (x.size() != net.input_dim()) throw InputError("finite_diff_gradient: dimension mismatch");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = evaluate(net, probe);
    probe[j] = x[j] - h;
    const double down = evaluate(net, probe);
    probe[j] = x[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

double lipschitz_bound(const Network& net) {
  auto frobenius = [](const DenseLayer& layer) {
    double s = 0.0;
    for (double w : layer.weights) s += w * w;
    return std::sqrt(s);
  };
  double bound = frobenius(net.output_layer());
  for (const auto& layer : net.hidden_layers()) bound *= frobenius(layer);
  return bound;
}

}  // namespace reluwalk
