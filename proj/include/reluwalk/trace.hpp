#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace reluwalk {

struct TraceRow {
  double elapsed_s = 0.0;
  std::uint64_t iteration = 0;
  double best_value = 0.0;
  double step_size = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Decides which iterations become trace rows.
///
/// With a time limit: a row whenever the incumbent improves (until `cap` rows
/// exist) and a row at every whole wall-clock second. Without one: a row per
/// iteration until `cap` rows exist. The final row is always written, so the
/// last row carries the final incumbent.
class TraceRecorder {
 public:
  TraceRecorder(bool timed, std::size_t cap);

  double elapsed() const noexcept;
  void start(double initial_value);
  void record(std::uint64_t iteration, double best_value, double step_size, bool improved);
  std::vector<TraceRow> finish(std::uint64_t iteration, double best_value, double step_size);

 private:
  using Clock = std::chrono::steady_clock;
  bool timed_;
  std::size_t cap_;
  Clock::time_point t0_;
  double next_tick_ = 1.0;
  std::vector<TraceRow> rows_;
};

/// Header `elapsed_s,iteration,best_value,step_size`; values at full precision.
void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

}  // namespace reluwalk
