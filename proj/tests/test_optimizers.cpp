#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reluwalk/error.hpp"
#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"
#include "reluwalk/optimizers.hpp"
#include "reluwalk/oracle.hpp"
#include "reluwalk/region.hpp"
#include "reluwalk/trace.hpp"
#include "test_support.hpp"

using namespace reluwalk;

namespace {

OptimizerConfig iterations(std::uint64_t n, std::uint64_t seed = 1) {
  OptimizerConfig cfg;
  cfg.iteration_limit = n;
  cfg.seed = seed;
  return cfg;
}

void check_run_invariants(const Network& net, const Box& box, const RunResult& r, double f_start) {
  REQUIRE_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_value >= r.trace[i - 1].best_value);
    CHECK(r.trace[i].iteration >= r.trace[i - 1].iteration);
  }
  CHECK(r.trace.back().best_value == r.best_value);
  CHECK(box.contains(r.best_point));
  CHECK(std::abs(evaluate(net, r.best_point) - r.best_value) <= 1e-12);
  CHECK(r.best_value >= f_start - 1e-12);
}

}  // namespace

TEST_CASE("pga_step examples") {
  const Network net = testing::one_neuron_net();
  const Box box = Box::unit(1);
  CHECK(pga_step(net, box, std::vector<double>{0.75}, 0.1)[0] == doctest::Approx(0.85));
  CHECK(pga_step(net, box, std::vector<double>{0.95}, 0.1)[0] == 1.0);
  const Network zero = constant_network(3, 2, 4, 0.0);
  const std::vector<double> x{0.1, 0.2, 0.3};
  CHECK(pga_step(zero, Box::unit(3), x, 7.0) == x);
}

TEST_CASE("ppga climbs the one-neuron net from a forced start") {
  const Network net = testing::one_neuron_net();
  auto cfg = iterations(5);
  cfg.initial_point = std::vector<double>{0.75};
  const auto r = ppga(net, Box::unit(1), cfg);
  CHECK(r.best_point[0] == 1.0);
  CHECK(r.best_value == 0.5);
  CHECK(r.iterations == 5);
  check_run_invariants(net, Box::unit(1), r, 0.25);
}

TEST_CASE("flat network returns the initial sample") {
  const Network zero = constant_network(2, 2, 3, 0.7);
  const Box box = Box::unit(2);
  auto cfg = iterations(200, 9);
  Rng rng(cfg.seed);
  const auto start = sample_uniform(box, rng);
  for (auto algo : {Algorithm::kPga, Algorithm::kPpga, Algorithm::kPpgaLr, Algorithm::kLpWalk}) {
    const auto r = run_algorithm(algo, zero, box, cfg);
    CAPTURE(to_string(algo));
    CHECK(r.best_point == start);
    CHECK(r.best_value == 0.7);
    CHECK(r.resets == 0);
  }
}

TEST_CASE("config validation") {
  const Network net = testing::one_neuron_net();
  const Box box = Box::unit(1);
  OptimizerConfig cfg;
  CHECK_THROWS_AS(ppga(net, box, cfg), InputError);  // no limit
  cfg.iteration_limit = 5;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(ppga(net, box, cfg), InputError);
  cfg.learning_rate = 0.1;
  cfg.tolerance_window = 0;
  CHECK_THROWS_AS(ppga(net, box, cfg), InputError);
  cfg.tolerance_window = 10;
  cfg.restart_noise = -1;
  CHECK_THROWS_AS(ppga(net, box, cfg), InputError);
  cfg.restart_noise = 1;
  CHECK_THROWS_AS(ppga(net, Box::unit(2), cfg), InputError);
  CHECK_THROWS_AS(parse_algorithm("sgd"), InputError);
  CHECK(parse_algorithm("ppga-lr") == Algorithm::kPpgaLr);
}

TEST_CASE("perturbation scale is Xi / sqrt(n0)") {
  OptimizerConfig cfg;
  cfg.restart_noise = 2.0;
  CHECK(cfg.perturbation_scale(4) == 1.0);
  CHECK(cfg.perturbation_scale(1) == 2.0);
}

TEST_CASE("valve step examples on the two-neuron net") {
  const Network net = testing::two_neuron_net();
  const Box box = Box::unit(1);
  const std::vector<double> x{0.75};
  auto v = valve_step(net, box, x, 0.5, ValveParams::fixed(2.0, 0.3));
  CHECK(v.u == doctest::Approx(0.3));
  CHECK(v.used_valve);
  CHECK(v.next[0] == 1.0);
  CHECK(v.step_length == doctest::Approx(0.3));

  v = valve_step(net, box, x, 5.0, ValveParams::fixed(2.0, 0.3));
  CHECK_FALSE(v.used_valve);
  CHECK(v.next[0] == 1.0);
  CHECK(v.step_length == doctest::Approx(2.5));

  // Adaptive: V = 1/0.5 = 2, c = u = 0.3.
  v = valve_step(net, box, x, 0.5, ValveParams::adaptive());
  CHECK(v.valve == doctest::Approx(2.0));
  CHECK(v.scale == doctest::Approx(0.3));
  CHECK(v.used_valve);
  CHECK(v.next[0] == doctest::Approx(1.0));

  const Network flat = testing::one_neuron_net();
  v = valve_step(flat, box, std::vector<double>{0.25}, 0.1, ValveParams::adaptive());
  CHECK(v.next[0] == 0.25);
  CHECK_FALSE(v.used_valve);
}

TEST_CASE("adaptive valve with no boundary ahead jumps to the bound") {
  const Network net = testing::one_neuron_net();
  const auto v = valve_step(net, Box::unit(1), std::vector<double>{0.75}, 0.1, ValveParams::adaptive());
  CHECK(std::isinf(v.u));
  CHECK(v.used_valve);
  CHECK(v.next[0] == 1.0);
  CHECK(v.step_length == doctest::Approx(0.25));
}

TEST_CASE("valve trigger matches V * u >= gamma on random states") {
  Rng rng(404);
  int used = 0, plain = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Network net = random_network(3, 3, 8, seed);
    const Box box = Box::unit(3);
    for (int s = 0; s < 25; ++s) {
      const auto x = sample_uniform(box, rng);
      const double gamma = std::pow(10.0, rng.uniform(-3, 1));
      const auto v = valve_step(net, box, x, gamma, ValveParams::adaptive());
      const auto rt = ratio_test(net, x);
      if (rt.gradient_norm == 0.0) {
        CHECK_FALSE(v.used_valve);
        continue;
      }
      const bool expect = rt.u > 0.0 && (1.0 / rt.gradient_norm) * rt.u >= gamma;
      CHECK(v.used_valve == expect);
      CHECK(box.contains(v.next));
      expect ? ++used : ++plain;
    }
  }
  CHECK(used > 0);
  CHECK(plain > 0);
}

TEST_CASE("iteration-mode runs are deterministic") {
  const Network net = random_network(4, 2, 10, 3);
  const Box box = Box::unit(4);
  auto cfg = iterations(3000, 21);
  cfg.tolerance_window = 20;
  for (auto algo : {Algorithm::kPga, Algorithm::kPpga, Algorithm::kPpgaLr, Algorithm::kLpWalk}) {
    CAPTURE(to_string(algo));
    const auto a = run_algorithm(algo, net, box, cfg);
    const auto b = run_algorithm(algo, net, box, cfg);
    CHECK(a.best_point == b.best_point);
    CHECK(a.best_value == b.best_value);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].iteration == b.trace[i].iteration);
      CHECK(a.trace[i].best_value == b.trace[i].best_value);
      CHECK(a.trace[i].step_size == b.trace[i].step_size);
    }
  }
}

TEST_CASE("runs respect incumbent monotonicity, feasibility and the oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Network net = random_network(2, 2, 5, 100 + seed);
    const Box box = Box::unit(2);
    const double opt = enumerate_optimum(net, box).value;
    auto cfg = iterations(4000, seed);
    Rng rng(cfg.seed);
    const double f_start = evaluate(net, sample_uniform(box, rng));
    for (auto algo : {Algorithm::kPga, Algorithm::kPpga, Algorithm::kPpgaLr, Algorithm::kLpWalk}) {
      CAPTURE(to_string(algo));
      const auto r = run_algorithm(algo, net, box, cfg);
      check_run_invariants(net, box, r, f_start);
      CHECK(r.best_value <= opt + 1e-7);
    }
  }
}

TEST_CASE("iteration mode records every iteration up to the cap") {
  const Network net = random_network(3, 2, 6, 2);
  auto cfg = iterations(50);
  auto r = pga(net, Box::unit(3), cfg);
  CHECK(r.trace.size() >= 50);
  CHECK(r.trace.back().iteration == 50);
  cfg.trace_cap = 10;
  r = pga(net, Box::unit(3), cfg);
  CHECK(r.trace.size() <= 12);
  CHECK(r.trace.back().iteration == 50);
}

TEST_CASE("timed runs stop near the budget") {
  const Network net = random_network(5, 2, 20, 4);
  OptimizerConfig cfg;
  cfg.time_limit = 0.3;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = ppga(net, Box::unit(5), cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(wall < 0.3 + 0.2);
  CHECK(r.iterations > 0);
  CHECK(r.trace.back().elapsed_s >= 0.3);
}

TEST_CASE("ppga reset semantics via the observer") {
  // f = x + 10 on [0, 1000]; every gradient step gains gamma = 1e-3 while
  // f * eps is about 10 * 0.01, so every improvement is small.
  const Network net(1, {DenseLayer{1, 1, {1.0}, {0.0}}}, DenseLayer{1, 1, {1.0}, {10.0}});
  const Box box({0.0}, {1000.0});
  auto cfg = iterations(1000, 5);
  cfg.learning_rate = 1e-3;
  cfg.error_threshold = 1e-2;
  cfg.tolerance_window = 7;
  cfg.restart_noise = 0.0;  // resets go exactly to x*
  std::uint64_t small = 0, resets_seen = 0;
  bool ok = true;
  double prev_best = -1e300;
  double prev_since = -1e300;
  const auto r = ppga(net, box, cfg, [&](const PpgaEvent& ev) {
    if (ev.small_improvement) ++small;
    if (ev.reset) {
      ++resets_seen;
      ok = ok && ev.counter == 0 && small % 7 == 0;
      // With zero noise the reset point is x*, so best-since-reset equals f(x*).
      ok = ok && ev.best_since_reset == ev.best;
    } else if (ev.improved) {
      ok = ok && ev.best_since_reset == ev.value;
      ok = ok && ev.best_since_reset > prev_since;
    }
    ok = ok && ev.best >= prev_best;
    prev_best = ev.best;
    prev_since = ev.best_since_reset;
  });
  CHECK(ok);
  CHECK(small == 1000);
  CHECK(resets_seen == small / 7);
  CHECK(r.resets == small / 7);
}

TEST_CASE("large improvements at the incumbent clear the counter") {
  // f = x on [0, 1] with a big step: first improvement is large.
  const Network net(1, {DenseLayer{1, 1, {1.0}, {0.0}}}, DenseLayer{1, 1, {1.0}, {0.0}});
  auto cfg = iterations(3, 0);
  cfg.initial_point = std::vector<double>{0.1};
  cfg.learning_rate = 0.3;
  std::vector<PpgaEvent> events;
  ppga(net, Box::unit(1), cfg, [&](const PpgaEvent& ev) { events.push_back(ev); });
  REQUIRE(events.size() == 3);
  CHECK(events[0].improved);
  CHECK_FALSE(events[0].small_improvement);
  CHECK(events[0].counter == 0);
  CHECK(events[2].value == 1.0);
}

TEST_CASE("stall_reset is off by default and restarts stuck runs when on") {
  const Network zero = constant_network(2, 1, 2, 1.0);
  auto cfg = iterations(100, 3);
  cfg.tolerance_window = 10;
  CHECK(ppga(zero, Box::unit(2), cfg).resets == 0);
  cfg.stall_reset = true;
  CHECK(ppga(zero, Box::unit(2), cfg).resets == 10);
}

TEST_CASE("lp_walk examples on the one-neuron net") {
  const Network net = testing::one_neuron_net();
  auto cfg = iterations(100);
  cfg.initial_point = std::vector<double>{0.75};
  auto r = lp_walk(net, Box::unit(1), cfg);
  CHECK(r.best_point[0] == doctest::Approx(1.0));
  CHECK(r.best_value == doctest::Approx(0.5));
  CHECK(r.iterations == 2);

  cfg.initial_point = std::vector<double>{0.25};
  r = lp_walk(net, Box::unit(1), cfg);
  CHECK(r.best_point[0] == 0.25);
  CHECK(r.best_value == 0.0);
  CHECK(r.iterations == 1);
}

TEST_CASE("lp_walk accepted moves strictly improve") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Network net = random_network(2, 2, 5, 11 + seed);
    const auto r = lp_walk(net, Box::unit(2), iterations(1000, seed));
    // The last row restates the final incumbent.
    for (std::size_t i = 1; i + 1 < r.trace.size(); ++i) {
      if (r.trace[i].step_size > 0.0) CHECK(r.trace[i].best_value > r.trace[i - 1].best_value);
    }
    CHECK(r.lp_failures == 0);
  }
}

TEST_CASE("pga keeps the pattern for steps shorter than the ratio bound") {
  Rng rng(12);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Network net = random_network(3, 2, 6, seed);
    const Box box({-10, -10, -10}, {10, 10, 10});
    const auto x = sample_uniform(Box::unit(3), rng);
    const auto rt = ratio_test(net, x);
    if (!std::isfinite(rt.u) || rt.u == 0.0) continue;
    const double gamma = 0.5 * rt.u;
    const auto y = pga_step(net, box, x, gamma);
    CHECK(activation_pattern(net, y) == activation_pattern(net, x));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("trace csv") {
  const auto path = std::filesystem::temp_directory_path() / "reluwalk_trace_test.csv";
  write_trace_csv({{0.0, 0, -1.0, 0.0}, {0.5, 10, 0.25, 0.1}}, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "elapsed_s,iteration,best_value,step_size");
  std::getline(in, line);
  CHECK(line.rfind("0,0,-1,0", 0) == 0);
}
