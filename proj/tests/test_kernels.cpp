#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "reluwalk/kernels.hpp"
#include "reluwalk/network.hpp"
#include "reluwalk/rng.hpp"
#include "test_support.hpp"

using namespace reluwalk;

namespace {

std::vector<const kernels::KernelTable*> vector_tables() {
  std::vector<const kernels::KernelTable*> out;
  for (auto isa : {kernels::Isa::kAvx2, kernels::Isa::kNeon}) {
    if (const auto* t = kernels::table(isa)) out.push_back(t);
  }
  return out;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.uniform(-1.0, 1.0);
  return v;
}

// RAII guard so a test can pin the active table.
struct ActiveIsa {
  explicit ActiveIsa(kernels::Isa isa) : saved(kernels::active().isa) { ok = kernels::select(isa); }
  ~ActiveIsa() { kernels::select(saved); }
  kernels::Isa saved;
  bool ok;
};

}  // namespace

TEST_CASE("scalar table is always available and selectable") {
  const auto* scalar = kernels::table(kernels::Isa::kScalar);
  REQUIRE(scalar != nullptr);
  CHECK(scalar->isa == kernels::Isa::kScalar);
  ActiveIsa pin(kernels::Isa::kScalar);
  CHECK(pin.ok);
  CHECK(kernels::active().isa == kernels::Isa::kScalar);
}

TEST_CASE("scalar dot and axpy on small fixed inputs") {
  const auto& k = *kernels::table(kernels::Isa::kScalar);
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, -5, 6};
  CHECK(k.dot(a.data(), b.data(), 3) == 12.0);
  CHECK(k.squared_norm(a.data(), 3) == 14.0);
  std::vector<double> y{1, 1, 1};
  k.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3, 5, 7});
  std::vector<double> x{-2, 0.5, 9};
  const std::vector<double> lo{0, 0, 0}, hi{1, 1, 1};
  k.clamp(lo.data(), hi.data(), x.data(), 3);
  CHECK(x == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("vector kernels agree with the scalar reference on every length") {
  const auto& ref = *kernels::table(kernels::Isa::kScalar);
  const auto tables = vector_tables();
  if (tables.empty()) MESSAGE("no vector ISA on this machine; equivalence vacuous");
  Rng rng(2024);
  for (const auto* t : tables) {
    CAPTURE(kernels::isa_name(t->isa));
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vector(rng, n, 3.0);
      const auto b = random_vector(rng, n, 3.0);
      double magnitude = 0.0;
      for (std::size_t i = 0; i < n; ++i) magnitude += std::abs(a[i] * b[i]);
      const double tol = 1e-14 * (magnitude + 1.0);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tol);
      CHECK(std::abs(t->squared_norm(a.data(), n) - ref.squared_norm(a.data(), n)) <=
            1e-14 * (ref.squared_norm(a.data(), n) + 1.0));

      auto y_ref = random_vector(rng, n);
      auto y_vec = y_ref;
      ref.axpy(-0.7, a.data(), y_ref.data(), n);
      t->axpy(-0.7, a.data(), y_vec.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y_ref[i] - y_vec[i]) <= 1e-15 * 4.0);

      // Clamping is exact in every implementation.
      auto x_ref = random_vector(rng, n, 2.0);
      auto x_vec = x_ref;
      std::vector<double> lo(n, -0.5), hi(n, 0.75);
      ref.clamp(lo.data(), hi.data(), x_ref.data(), n);
      t->clamp(lo.data(), hi.data(), x_vec.data(), n);
      CHECK(x_ref == x_vec);
    }
  }
}

TEST_CASE("forward pass and gradient are ISA-independent up to rounding") {
  const auto tables = vector_tables();
  if (tables.empty()) return;
  const Network net = random_network(10, 4, 60, 5);
  Rng rng(7);
  for (int s = 0; s < 20; ++s) {
    const auto x = random_vector(rng, 10);
    double f_scalar = 0.0;
    std::vector<double> g_scalar;
    {
      ActiveIsa pin(kernels::Isa::kScalar);
      f_scalar = evaluate(net, x);
      g_scalar = gradient(net, x);
    }
    for (const auto* t : tables) {
      ActiveIsa pin(t->isa);
      REQUIRE(pin.ok);
      const double f_vec = evaluate(net, x);
      CHECK(std::abs(f_vec - f_scalar) <= 1e-12 * std::max(1.0, std::abs(f_scalar)));
      const auto g_vec = gradient(net, x);
      double diff = 0.0;
      for (std::size_t j = 0; j < g_vec.size(); ++j) diff = std::max(diff, std::abs(g_vec[j] - g_scalar[j]));
      CHECK(diff <= 1e-12 * std::max(1.0, testing::norm2(g_scalar)));
    }
  }
}

TEST_CASE("gemv and its transpose on a 2x3 matrix") {
  const auto& k = kernels::active();
  const std::vector<double> w{1, 2, 3, 4, 5, 6};
  const std::vector<double> x{1, 0, -1};
  const std::vector<double> b{0.5, -0.5};
  std::vector<double> y(2);
  kernels::gemv(k, w, 2, 3, x, b, y);
  CHECK(y == std::vector<double>{-1.5, -2.5});
  const std::vector<double> v{1, -1};
  std::vector<double> z(3);
  kernels::gemv_transposed(k, w, 2, 3, v, z);
  CHECK(z == std::vector<double>{-3, -3, -3});
}
