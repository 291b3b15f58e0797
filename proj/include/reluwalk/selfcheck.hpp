#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"

namespace reluwalk {

struct CheckResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed error for this check

  bool passed() const noexcept { return failures == 0; }
};

struct SelfCheckReport {
  std::vector<CheckResult> checks;
  std::size_t samples = 0;

  bool passed() const noexcept;
};

/// Invariant suite at `samples` uniform points of the box: gradient against
/// central differences, the region affine identity, linearity along grad f up
/// to the ratio-test step, the blocking neuron reaching zero at u, and
/// projection idempotence.
SelfCheckReport run_self_check(const Network& net, const Box& box, std::size_t samples,
                               std::uint64_t seed);

}  // namespace reluwalk
