#include "reluwalk/optimizers.hpp"

#include <cmath>
#include <limits>

#include "reluwalk/error.hpp"
#include "reluwalk/kernels.hpp"
#include "reluwalk/lp.hpp"
#include "reluwalk/region.hpp"

namespace reluwalk {
namespace {

struct StepOutcome {
  std::vector<double> next;
  double step_length = 0.0;
  bool used_valve = false;
};

StepOutcome plain_step(const Box& box, std::span<const double> x, const std::vector<double>& grad,
                       double grad_norm, double learning_rate) {
  StepOutcome out{std::vector<double>(x.begin(), x.end()), 0.0, false};
  if (grad_norm == 0.0) return out;
  kernels::axpy(learning_rate, grad, out.next);
  project_box_in_place(box, out.next);
  out.step_length = learning_rate * grad_norm;
  return out;
}

ValveStepResult valve_step_from_trace(const Network& net, const Box& box, std::span<const double> x,
                                      const ForwardTrace& trace, double learning_rate,
                                      const ValveParams& valve) {
  ValveStepResult res;
  std::vector<double> grad = gradient(net, trace);
  const double norm = std::sqrt(kernels::squared_norm(grad));
  if (norm == 0.0) {
    res.next.assign(x.begin(), x.end());
    res.u = std::numeric_limits<double>::infinity();
    return res;
  }
  const RatioTestResult rt = ratio_test(net, x, trace, std::move(grad));
  res.u = rt.u;
  if (valve.mode == ValveMode::kAdaptive) {
    res.valve = 1.0 / norm;
    res.scale = rt.u;
  } else {
    res.valve = valve.valve;
    res.scale = valve.scale;
  }
  res.used_valve = rt.u > 0.0 && res.valve * rt.u >= learning_rate;
  if (!res.used_valve) {
    StepOutcome plain = plain_step(box, x, rt.gradient, norm, learning_rate);
    res.next = std::move(plain.next);
    res.step_length = plain.step_length;
    return res;
  }
  res.next.assign(x.begin(), x.end());
  if (std::isfinite(res.scale)) {
    kernels::axpy(res.scale / norm, rt.gradient, res.next);
    project_box_in_place(box, res.next);
    res.step_length = res.scale;
  } else {
    double moved = 0.0;
    for (std::size_t j = 0; j < res.next.size(); ++j) {
      const double before = res.next[j];
      if (rt.gradient[j] > 0.0) res.next[j] = box.upper()[j];
      if (rt.gradient[j] < 0.0) res.next[j] = box.lower()[j];
      moved += (res.next[j] - before) * (res.next[j] - before);
    }
    res.step_length = std::sqrt(moved);
  }
  return res;
}

std::vector<double> starting_point(const Box& box, const OptimizerConfig& cfg, Rng& rng) {
  if (cfg.initial_point) return project_box(box, *cfg.initial_point);
  return sample_uniform(box, rng);
}

class Budget {
 public:
  Budget(const OptimizerConfig& cfg, const TraceRecorder& rec) : cfg_(cfg), rec_(rec) {}
  bool exhausted(std::uint64_t iterations) const {
    if (cfg_.iteration_limit && iterations >= *cfg_.iteration_limit) return true;
    if (cfg_.time_limit && rec_.elapsed() >= *cfg_.time_limit) return true;
    return false;
  }

 private:
  const OptimizerConfig& cfg_;
  const TraceRecorder& rec_;
};

using StepFn = std::function<StepOutcome(std::span<const double>, const ForwardTrace&)>;

// Perturbed-restart ascent with a pluggable gradient step; `restarts` false gives plain PGA.
RunResult perturbed_ascent(const Network& net, const Box& box, const OptimizerConfig& cfg,
                           const StepFn& step, bool restarts, const PpgaObserver& observer) {
  cfg.validate(box);
  if (box.dim() != net.input_dim()) throw InputError("box dimension != network input_dim");
  Rng rng(cfg.seed);
  const double delta = cfg.perturbation_scale(net.input_dim());

  RunResult result;
  result.seed = cfg.seed;
  std::vector<double> x = starting_point(box, cfg, rng);
  ForwardTrace current = forward(net, x);
  double fx = current.output;

  std::vector<double> best = x;
  double f_best = fx;
  double f_since_reset = fx;
  std::size_t counter = 0;
  std::size_t stall = 0;

  TraceRecorder recorder(cfg.time_limit.has_value(), cfg.trace_cap);
  recorder.start(f_best);
  const Budget budget(cfg, recorder);
  std::uint64_t iter = 0;
  double last_step = 0.0;

  auto reset_from_best = [&] {
    x = best;
    for (double& xj : x) xj += delta * rng.normal();
    project_box_in_place(box, x);
    forward(net, x, current);
    fx = current.output;
    f_since_reset = fx;
    counter = 0;
    stall = 0;
    ++result.resets;
  };

  while (!budget.exhausted(iter)) {
    StepOutcome s = step(x, current);
    ++iter;
    last_step = s.step_length;
    if (s.used_valve) ++result.valve_steps;
    x = std::move(s.next);
    forward(net, x, current);
    fx = current.output;

    PpgaEvent ev;
    ev.iteration = iter;
    ev.value = fx;
    bool new_best = false;
    if (fx > f_since_reset) {
      ev.improved = true;
      const double gain = fx - f_since_reset;
      f_since_reset = fx;
      stall = 0;
      if (fx > f_best) {
        best = x;
        f_best = fx;
        new_best = true;
      }
      if (restarts) {
        if (gain < fx * cfg.error_threshold) {
          ev.small_improvement = true;
          ++counter;
          if (counter == cfg.tolerance_window) {
            reset_from_best();
            ev.reset = true;
          }
        } else if (fx == f_best) {
          counter = 0;
        }
      }
    } else if (restarts && cfg.stall_reset) {
      if (++stall >= cfg.tolerance_window) {
        reset_from_best();
        ev.reset = true;
      }
    }
    ev.counter = counter;
    ev.best_since_reset = f_since_reset;
    ev.best = f_best;
    if (observer) observer(ev);
    recorder.record(iter, f_best, last_step, new_best);
  }

  result.best_point = std::move(best);
  result.best_value = f_best;
  result.iterations = iter;
  result.trace = recorder.finish(iter, f_best, last_step);
  return result;
}

}  // namespace

std::string_view to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::kPga: return "pga";
    case Algorithm::kPpga: return "ppga";
    case Algorithm::kPpgaLr: return "ppga-lr";
    case Algorithm::kLpWalk: return "lp-walk";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "pga") return Algorithm::kPga;
  if (name == "ppga") return Algorithm::kPpga;
  if (name == "ppga-lr") return Algorithm::kPpgaLr;
  if (name == "lp-walk") return Algorithm::kLpWalk;
  throw InputError("unknown algorithm '" + std::string(name) +
                   "' (expected pga, ppga, ppga-lr or lp-walk)");
}

bool is_gradient_based(Algorithm algo) noexcept { return algo != Algorithm::kLpWalk; }

void OptimizerConfig::validate(const Box& box) const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InputError("learning rate must be positive and finite");
  }
  if (!(restart_noise >= 0.0) || !std::isfinite(restart_noise)) {
    throw InputError("restart noise must be nonnegative and finite");
  }
  if (!(error_threshold >= 0.0)) throw InputError("error threshold must be nonnegative");
  if (tolerance_window == 0) throw InputError("tolerance window k must be positive");
  if (!time_limit && !iteration_limit) throw InputError("set a time limit or an iteration limit");
  if (time_limit && !(*time_limit > 0.0)) throw InputError("time limit must be positive");
  if (iteration_limit && *iteration_limit == 0) throw InputError("iteration limit must be positive");
  if (initial_point && initial_point->size() != box.dim()) {
    throw InputError("initial point dimension != box dimension");
  }
}

double OptimizerConfig::perturbation_scale(std::size_t input_dim) const {
  return restart_noise / std::sqrt(static_cast<double>(input_dim));
}

std::vector<double> pga_step(const Network& net, const Box& box, std::span<const double> x,
                             double learning_rate) {
  std::vector<double> grad = gradient(net, x);
  const double norm = std::sqrt(kernels::squared_norm(grad));
  return plain_step(box, x, grad, norm, learning_rate).next;
}

ValveStepResult valve_step(const Network& net, const Box& box, std::span<const double> x,
                           double learning_rate, const ValveParams& valve) {
  return valve_step_from_trace(net, box, x, forward(net, x), learning_rate, valve);
}

RunResult pga(const Network& net, const Box& box, const OptimizerConfig& cfg) {
  const double lr = cfg.learning_rate;
  return perturbed_ascent(
      net, box, cfg,
      [&](std::span<const double> x, const ForwardTrace& t) {
        std::vector<double> grad = gradient(net, t);
        return plain_step(box, x, grad, std::sqrt(kernels::squared_norm(grad)), lr);
      },
      /*restarts=*/false, {});
}

RunResult ppga(const Network& net, const Box& box, const OptimizerConfig& cfg,
               const PpgaObserver& observer) {
  const double lr = cfg.learning_rate;
  return perturbed_ascent(
      net, box, cfg,
      [&](std::span<const double> x, const ForwardTrace& t) {
        std::vector<double> grad = gradient(net, t);
        return plain_step(box, x, grad, std::sqrt(kernels::squared_norm(grad)), lr);
      },
      /*restarts=*/true, observer);
}

RunResult ppga_lr(const Network& net, const Box& box, const OptimizerConfig& cfg,
                  const ValveParams& valve, const PpgaObserver& observer) {
  if (valve.mode == ValveMode::kFixed && !(valve.valve > 0.0 && valve.scale > 0.0)) {
    throw InputError("fixed valve needs positive V and c");
  }
  const double lr = cfg.learning_rate;
  return perturbed_ascent(
      net, box, cfg,
      [&](std::span<const double> x, const ForwardTrace& t) {
        ValveStepResult v = valve_step_from_trace(net, box, x, t, lr, valve);
        return StepOutcome{std::move(v.next), v.step_length, v.used_valve};
      },
      /*restarts=*/true, observer);
}

RunResult lp_walk(const Network& net, const Box& box, const OptimizerConfig& cfg) {
  cfg.validate(box);
  if (box.dim() != net.input_dim()) throw InputError("box dimension != network input_dim");
  Rng rng(cfg.seed);
  RunResult result;
  result.seed = cfg.seed;

  std::vector<double> x = starting_point(box, cfg, rng);
  double f_walk = evaluate(net, x);
  std::vector<double> best = x;
  double f_best = f_walk;
  const double past = kLpWalkPastFraction * box.diagonal();

  TraceRecorder recorder(cfg.time_limit.has_value(), cfg.trace_cap);
  recorder.start(f_best);
  const Budget budget(cfg, recorder);
  std::uint64_t iter = 0;
  double last_step = 0.0;

  auto consider = [&](const std::vector<double>& p, double fp) {
    if (fp > f_best) {
      best = p;
      f_best = fp;
      return true;
    }
    return false;
  };

  while (!budget.exhausted(iter)) {
    const ActivationPattern z = activation_pattern(net, x);
    const AffineMap affine = region_affine(net, z);
    LinearProgram lp{affine.slope, region_halfspaces(net, z), box};
    const LpOutcome out = solve_lp(lp);
    ++iter;
    if (out.status != LpStatus::kOptimal) {
      ++result.lp_failures;
      x = sample_uniform(box, rng);
      f_walk = evaluate(net, x);
      recorder.record(iter, f_best, 0.0, consider(x, f_walk));
      continue;
    }
    const std::vector<double>& x_new = *out.point;
    const double f_new = evaluate(net, x_new);
    if (!(f_new > f_walk + kLpWalkImprovement)) break;

    bool improved = consider(x_new, f_new);
    std::vector<double> dir(x_new.size());
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < dir.size(); ++j) {
      dir[j] = x_new[j] - x[j];
      norm_sq += dir[j] * dir[j];
    }
    last_step = std::sqrt(norm_sq);
    x = x_new;
    if (last_step > 0.0) {
      kernels::axpy(past / last_step, dir, x);
      project_box_in_place(box, x);
      improved = consider(x, evaluate(net, x)) || improved;
    }
    f_walk = f_new;
    recorder.record(iter, f_best, last_step, improved);
  }

  result.best_point = std::move(best);
  result.best_value = f_best;
  result.iterations = iter;
  result.trace = recorder.finish(iter, f_best, last_step);
  return result;
}

RunResult run_algorithm(Algorithm algo, const Network& net, const Box& box,
                        const OptimizerConfig& cfg) {
  switch (algo) {
    case Algorithm::kPga: return pga(net, box, cfg);
    case Algorithm::kPpga: return ppga(net, box, cfg);
    case Algorithm::kPpgaLr: return ppga_lr(net, box, cfg);
    case Algorithm::kLpWalk: return lp_walk(net, box, cfg);
  }
  throw InputError("unknown algorithm");
}

}  // namespace reluwalk
