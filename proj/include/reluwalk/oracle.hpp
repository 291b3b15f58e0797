#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"

namespace reluwalk {

struct GlobalOptimum {
  double value = 0.0;
  std::vector<double> point;
  std::size_t feasible_regions = 0;
  std::size_t patterns_enumerated = 0;
  std::size_t lp_failures = 0;
};

inline constexpr std::size_t kDefaultMaxNeurons = 20;

/// Exact max of f over the box: one LP per activation pattern over the closed
/// region, keeping the best. Refuses (InputError) when the network has more
/// than `max_neurons` hidden neurons.
GlobalOptimum enumerate_optimum(const Network& net, const Box& box,
                                std::size_t max_neurons = kDefaultMaxNeurons);

struct GridOptimum {
  double value = 0.0;
  std::vector<double> point;
};

/// Best f over `resolution` evenly spaced points per axis, corners included.
/// Only for n0 <= 2.
GridOptimum grid_optimum(const Network& net, const Box& box, std::size_t resolution);

/// Central differences with step h on each coordinate.
std::vector<double> finite_diff_gradient(const Network& net, std::span<const double> x,
                                          double h = 1e-5);

/// Product of the layers' Frobenius norms: a Lipschitz constant of f (w.r.t. the
/// Euclidean norm) valid over all of R^n0.
double lipschitz_bound(const Network& net);

}  // namespace reluwalk
