#include "reluwalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reluwalk/error.hpp"
#include "reluwalk/kernels.hpp"

namespace reluwalk {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw InputError("box: lower and upper differ in length");
  if (lower_.empty()) throw InputError("box: zero dimensions");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j])) {
      throw InputError("box: non-finite bound at coordinate " + std::to_string(j));
    }
    if (lower_[j] > upper_[j]) {
      throw InputError("box: lower > upper at coordinate " + std::to_string(j));
    }
  }
}

Box Box::unit(std::size_t dim) {
  return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

bool Box::contains(std::span<const double> x, double tol) const noexcept {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower_[j] - tol && x[j] <= upper_[j] + tol)) return false;
  }
  return true;
}

double Box::diagonal() const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    const double w = upper_[j] - lower_[j];
    sum += w * w;
  }
  return std::sqrt(sum);
}

std::vector<double> Box::center() const {
  std::vector<double> c(dim());
  for (std::size_t j = 0; j < dim(); ++j) c[j] = 0.5 * (lower_[j] + upper_[j]);
  return c;
}

std::vector<double> project_box(const Box& box, std::span<const double> x) {
  if (x.size() != box.dim()) throw InputError("project_box: dimension mismatch");
  std::vector<double> out(x.begin(), x.end());
  project_box_in_place(box, out);
  return out;
}

void project_box_in_place(const Box& box, std::span<double> x) {
  if (x.size() != box.dim()) throw InputError("project_box: dimension mismatch");
  kernels::active().clamp(box.lower().data(), box.upper().data(), x.data(), x.size());
}

std::vector<double> sample_uniform(const Box& box, Rng& rng) {
  std::vector<double> x(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
  return x;
}

double Halfspace::evaluate(std::span<const double> x) const noexcept {
  double s = offset;
  for (std::size_t j = 0; j < normal.size(); ++j) s += normal[j] * x[j];
  return s;
}

double Halfspace::violation(std::span<const double> x) const noexcept {
  const double v = evaluate(x);
  return sense == Sense::kGreaterEqual ? std::max(0.0, -v) : std::max(0.0, v);
}

}  // namespace reluwalk
