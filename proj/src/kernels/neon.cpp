// AArch64 only; NEON is part of the baseline there so no runtime probe is needed.
#include "reluwalk/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>

namespace reluwalk::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void clamp_neon(const double* lo, const double* hi, double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vmaxq_f64(vld1q_f64(x + i), vld1q_f64(lo + i));
    vst1q_f64(x + i, vminq_f64(v, vld1q_f64(hi + i)));
  }
  for (; i < n; ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

double squared_norm_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

}  // namespace

namespace detail {
const KernelTable kNeonTable{Isa::kNeon, dot_neon, axpy_neon, clamp_neon, squared_norm_neon};
}

}  // namespace reluwalk::kernels
