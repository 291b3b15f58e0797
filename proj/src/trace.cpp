#include "reluwalk/trace.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace reluwalk {

TraceRecorder::TraceRecorder(bool timed, std::size_t cap) : timed_(timed), cap_(cap) {}

double TraceRecorder::elapsed() const noexcept {
  return std::chrono::duration<double>(Clock::now() - t0_).count();
}

void TraceRecorder::start(double initial_value) {
  t0_ = Clock::now();
  next_tick_ = 1.0;
  rows_.clear();
  rows_.push_back({0.0, 0, initial_value, 0.0});
}

void TraceRecorder::record(std::uint64_t iteration, double best_value, double step_size,
                           bool improved) {
  const bool room = rows_.size() < cap_;
  if (!timed_) {
    if (room) rows_.push_back({elapsed(), iteration, best_value, step_size});
    return;
  }
  const double t = elapsed();
  bool tick = false;
  if (t >= next_tick_) {
    tick = true;
    while (next_tick_ <= t) next_tick_ += 1.0;
  }
  if ((improved && room) || tick) rows_.push_back({t, iteration, best_value, step_size});
}

std::vector<TraceRow> TraceRecorder::finish(std::uint64_t iteration, double best_value,
                                            double step_size) {
  rows_.push_back({elapsed(), iteration, best_value, step_size});
  return std::move(rows_);
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  out << "elapsed_s,iteration,best_value,step_size\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& row : trace) {
    out << row.elapsed_s << ',' << row.iteration << ',' << row.best_value << ',' << row.step_size
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace reluwalk
