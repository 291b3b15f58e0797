#pragma once

// Dense double-precision kernels behind the forward/backward passes.
//
// Every kernel has a portable scalar reference. Vectorised variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled into separate translation units and
// picked once at startup from what the CPU reports. RELUWALK_SIMD=scalar|avx2|
// neon|auto overrides the choice, e.g. to replay a run bit-for-bit on another
// machine.

#include <cstddef>
#include <span>
#include <string_view>

namespace reluwalk::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] = min(max(x[i], lo[i]), hi[i])
  void (*clamp)(const double* lo, const double* hi, double* x, std::size_t n);
  // sum_i a[i] * a[i]
  double (*squared_norm)(const double* a, std::size_t n);
};

/// Returns the table for `isa`, or nullptr when that ISA was not compiled in
/// or the running CPU lacks it.
const KernelTable* table(Isa isa) noexcept;

/// The process-wide table used by the library.
const KernelTable& active() noexcept;

/// Overrides the active table. Returns false (and changes nothing) if `isa`
/// is unavailable.
bool select(Isa isa) noexcept;

// Convenience wrappers over active().

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double squared_norm(std::span<const double> a) noexcept {
  return active().squared_norm(a.data(), a.size());
}

/// y = W x + bias for a row-major rows x cols matrix W.
void gemv(const KernelTable& k, std::span<const double> weights, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y) noexcept;

/// y = W^T v for a row-major rows x cols matrix W (y has length cols).
void gemv_transposed(const KernelTable& k, std::span<const double> weights, std::size_t rows,
                     std::size_t cols, std::span<const double> v, std::span<double> y) noexcept;

namespace detail {
extern const KernelTable kScalarTable;
#if defined(RELUWALK_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(RELUWALK_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace reluwalk::kernels
