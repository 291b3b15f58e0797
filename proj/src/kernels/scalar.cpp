#include "reluwalk/kernels.hpp"

#include <algorithm>

namespace reluwalk::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void clamp_scalar(const double* lo, const double* hi, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

double squared_norm_scalar(const double* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::kScalar, dot_scalar, axpy_scalar, clamp_scalar,
                               squared_norm_scalar};
}

}  // namespace reluwalk::kernels
