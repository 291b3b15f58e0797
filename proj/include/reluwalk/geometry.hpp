#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reluwalk/rng.hpp"

namespace reluwalk {

/// Axis-aligned box with finite bounds, lower <= upper coordinatewise.
class Box {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);

  /// [0, 1]^dim
  static Box unit(std::size_t dim);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }

  bool contains(std::span<const double> x, double tol = 0.0) const noexcept;
  double diagonal() const noexcept;
  std::vector<double> center() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Euclidean projection onto the box, i.e. a coordinatewise clamp.
std::vector<double> project_box(const Box& box, std::span<const double> x);
void project_box_in_place(const Box& box, std::span<double> x);

/// One independent Uniform[lower_j, upper_j] draw per coordinate.
std::vector<double> sample_uniform(const Box& box, Rng& rng);

enum class Sense { kGreaterEqual, kLessEqual };

/// normal . x + offset (>= | <=) 0
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
  Sense sense = Sense::kGreaterEqual;

  double evaluate(std::span<const double> x) const noexcept;
  /// Amount by which x violates the halfspace (0 when satisfied).
  double violation(std::span<const double> x) const noexcept;
};

}  // namespace reluwalk
