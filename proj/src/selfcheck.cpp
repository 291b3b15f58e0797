#include "reluwalk/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reluwalk/error.hpp"
#include "reluwalk/oracle.hpp"
#include "reluwalk/region.hpp"

namespace reluwalk {
namespace {

constexpr double kBoundaryMargin = 1e-4;
constexpr double kGradientRelTol = 1e-6;
constexpr double kAffineTol = 1e-9;
constexpr double kLinearityTol = 1e-9;
constexpr double kBoundaryTol = 1e-7;
constexpr double kLinearityStepCap = 1.0;

double min_abs_preactivation(const ForwardTrace& t) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : t.preactivations) {
    for (double v : g) m = std::min(m, std::abs(v));
  }
  return m;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void note(CheckResult& c, double err, double tol) {
  ++c.checked;
  c.worst = std::max(c.worst, err);
  if (!(err <= tol)) ++c.failures;
}

}  // namespace

bool SelfCheckReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

SelfCheckReport run_self_check(const Network& net, const Box& box, std::size_t samples,
                               std::uint64_t seed) {
  if (box.dim() != net.input_dim()) throw InputError("box dimension != network input_dim");
  SelfCheckReport report;
  report.samples = samples;
  CheckResult grad_check{"gradient_vs_finite_differences"};
  CheckResult affine_check{"region_affine_identity"};
  CheckResult linear_check{"region_linearity"};
  CheckResult boundary_check{"ratio_test_boundary"};
  CheckResult projection_check{"projection_idempotence"};

  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<double> x = sample_uniform(box, rng);
    const ForwardTrace trace = forward(net, x);
    const std::vector<double> grad = gradient(net, trace);
    const ActivationPattern z = pattern_of(trace);

    if (min_abs_preactivation(trace) > kBoundaryMargin) {
      const auto fd = finite_diff_gradient(net, x);
      std::vector<double> diff(grad.size());
      for (std::size_t j = 0; j < grad.size(); ++j) diff[j] = grad[j] - fd[j];
      note(grad_check, norm2(diff) / std::max(norm2(grad), 1.0), kGradientRelTol);
    } else {
      ++grad_check.skipped;
    }

    const AffineMap affine = region_affine(net, z);
    note(affine_check, std::abs(affine.evaluate(x) - trace.output) / std::max(1.0, std::abs(trace.output)),
         kAffineTol);

    const RatioTestResult rt = ratio_test(net, x, trace, grad);
    if (rt.gradient_norm > 0.0) {
      const double alpha = 0.99 * std::min(rt.u, kLinearityStepCap);
      std::vector<double> y = x;
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += alpha * grad[j];
      const double predicted = alpha * rt.gradient_norm * rt.gradient_norm;
      const double err = std::abs(evaluate(net, y) - trace.output - predicted);
      note(linear_check, err / std::max(1.0, std::abs(trace.output)), kLinearityTol);
    } else {
      ++linear_check.skipped;
    }

    if (rt.blocking_neuron && std::isfinite(rt.u)) {
      const auto affines = neuron_affines(net, z);
      const NeuronAffine& a = affines[*rt.blocking_neuron];
      double g = a.offset;
      for (std::size_t j = 0; j < x.size(); ++j) g += a.normal[j] * (x[j] + rt.u * grad[j]);
      note(boundary_check, std::abs(g), kBoundaryTol);
    } else {
      ++boundary_check.skipped;
    }

    std::vector<double> wild = x;
    for (std::size_t j = 0; j < wild.size(); ++j) {
      wild[j] += 2.0 * (box.upper()[j] - box.lower()[j] + 1.0) * rng.normal();
    }
    const auto once = project_box(box, wild);
    const auto twice = project_box(box, once);
    double err = once == twice && box.contains(once) ? 0.0 : 1.0;
    note(projection_check, err, 0.0);
  }
  report.checks = {grad_check, affine_check, linear_check, boundary_check, projection_check};
  return report;
}

}  // namespace reluwalk
