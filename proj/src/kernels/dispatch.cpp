#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string_view>

#include "reluwalk/kernels.hpp"

namespace reluwalk::kernels {
namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(RELUWALK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() noexcept {
  if (const KernelTable* t = table(Isa::kAvx2)) return t;
  if (const KernelTable* t = table(Isa::kNeon)) return t;
  return &detail::kScalarTable;
}

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("RELUWALK_SIMD");
  if (env != nullptr) {
    const std::string_view request{env};
    const KernelTable* chosen = nullptr;
    if (request == "scalar") chosen = table(Isa::kScalar);
    if (request == "avx2") chosen = table(Isa::kAvx2);
    if (request == "neon") chosen = table(Isa::kNeon);
    if (chosen != nullptr) return chosen;
  }
  return best_available();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable* table(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return &detail::kScalarTable;
    case Isa::kAvx2:
#if defined(RELUWALK_HAVE_AVX2)
      if (cpu_has_avx2_fma()) return &detail::kAvx2Table;
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(RELUWALK_HAVE_NEON)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
  const KernelTable* t = table(isa);
  if (t == nullptr) return false;
  active_slot().store(t, std::memory_order_relaxed);
  return true;
}

void gemv(const KernelTable& k, std::span<const double> weights, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y) noexcept {
  const double* w = weights.data();
  for (std::size_t i = 0; i < rows; ++i) y[i] = k.dot(w + i * cols, x.data(), cols) + bias[i];
}

void gemv_transposed(const KernelTable& k, std::span<const double> weights, std::size_t rows,
                     std::size_t cols, std::span<const double> v, std::span<double> y) noexcept {
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(cols), 0.0);
  const double* w = weights.data();
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i] != 0.0) k.axpy(v[i], w + i * cols, y.data(), cols);
  }
}

}  // namespace reluwalk::kernels
