#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "reluwalk/error.hpp"
#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"
#include "reluwalk/network_io.hpp"
#include "reluwalk/oracle.hpp"
#include "reluwalk/rng.hpp"
#include "test_support.hpp"

using namespace reluwalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "reluwalk_test_network";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("forward on the one-neuron net") {
  const Network net = testing::one_neuron_net();
  auto tr = forward(net, std::vector<double>{0.75});
  CHECK(tr.preactivations[0][0] == 0.25);
  CHECK(tr.activations[0][0] == 0.25);
  CHECK(tr.output == 0.25);

  tr = forward(net, std::vector<double>{0.25});
  CHECK(tr.preactivations[0][0] == -0.25);
  CHECK(tr.activations[0][0] == 0.0);
  CHECK(tr.output == 0.0);
}

TEST_CASE("forward rejects a wrong input length") {
  const Network net = testing::one_neuron_net();
  CHECK_THROWS_AS(forward(net, std::vector<double>{0.1, 0.2}), InputError);
  CHECK_THROWS_AS(activation_pattern(net, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(gradient(net, std::vector<double>{1, 2}), InputError);
}

TEST_CASE("trace invariants: h = max(0, g) and output = w . h + b") {
  const Network net = random_network(4, 3, 7, 3);
  Rng rng(1);
  const Box box = Box::unit(4);
  for (int s = 0; s < 10; ++s) {
    const auto x = sample_uniform(box, rng);
    const auto tr = forward(net, x);
    for (std::size_t l = 0; l < tr.preactivations.size(); ++l) {
      for (std::size_t i = 0; i < tr.preactivations[l].size(); ++i) {
        CHECK(tr.activations[l][i] == std::max(0.0, tr.preactivations[l][i]));
      }
    }
    CHECK(std::abs(tr.output - testing::reference_forward(net, x)) < 1e-12);
  }
}

TEST_CASE("seed-42 net at the box centre matches the reference forward pass") {
  const Network net = random_network(10, 2, 20, 42);
  const auto x = Box::unit(10).center();
  CHECK(std::abs(evaluate(net, x) - testing::reference_forward(net, x)) <= 1e-12);
  const auto flat = testing::reference_preactivations(net, x);
  const auto tr = forward(net, x);
  std::size_t idx = 0;
  for (const auto& layer : tr.preactivations)
    for (double g : layer) CHECK(std::abs(g - flat[idx++]) <= 1e-12);
}

TEST_CASE("activation pattern uses z = 1 at binding neurons") {
  const Network net = testing::one_neuron_net();
  CHECK(activation_pattern(net, std::vector<double>{0.75}).to_string() == "1");
  CHECK(activation_pattern(net, std::vector<double>{0.5}).to_string() == "1");
  CHECK(activation_pattern(net, std::vector<double>{0.25}).to_string() == "0");
  const Network big = random_network(3, 2, 4, 9);
  CHECK(activation_pattern(big, std::vector<double>{0.1, 0.2, 0.3}).bit_count() == 8);
}

TEST_CASE("pattern from_index is layer-major") {
  const Network net = random_network(2, 2, 3, 0);
  const auto p = ActivationPattern::from_index(net, 0b100101);
  CHECK(p.to_string() == "101001");
  CHECK(p.bit(0, 0));
  CHECK_FALSE(p.bit(0, 1));
  CHECK(p.bit(1, 2));
  CHECK_THROWS_AS(ActivationPattern(std::vector<std::vector<std::uint8_t>>{{1, 0}}).check_shape(net), InputError);
}

TEST_CASE("gradient on the one-neuron net") {
  const Network net = testing::one_neuron_net();
  CHECK(gradient(net, std::vector<double>{0.75}) == std::vector<double>{1.0});
  CHECK(gradient(net, std::vector<double>{0.25}) == std::vector<double>{0.0});
}

TEST_CASE("gradient matches central finite differences away from boundaries") {
  const Network net = random_network(10, 2, 20, 42);
  Rng rng(77);
  const Box box = Box::unit(10);
  int checked = 0;
  for (int attempt = 0; attempt < 2000 && checked < 10; ++attempt) {
    const auto x = sample_uniform(box, rng);
    if (testing::min_abs(testing::reference_preactivations(net, x)) <= 1e-4) continue;
    ++checked;
    const auto g = gradient(net, x);
    // Independent central differences on the reference pass.
    std::vector<double> fd(10);
    for (std::size_t j = 0; j < 10; ++j) {
      auto xp = x, xm = x;
      xp[j] += 1e-5;
      xm[j] -= 1e-5;
      fd[j] = (testing::reference_forward(net, xp) - testing::reference_forward(net, xm)) / 2e-5;
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < 10; ++j) diff += (g[j] - fd[j]) * (g[j] - fd[j]);
    CHECK(std::sqrt(diff) / std::max(testing::norm2(g), 1e-12) < 1e-6);
  }
  CHECK(checked == 10);
}

TEST_CASE("piecewise linearity inside a region") {
  const Network net = random_network(5, 2, 10, 8);
  Rng rng(3);
  const Box box = Box::unit(5);
  for (int s = 0; s < 20; ++s) {
    const auto x = sample_uniform(box, rng);
    std::vector<double> dir(5);
    for (double& d : dir) d = rng.normal();
    const auto z = activation_pattern(net, x);
    double alpha = 1e-2;
    std::vector<double> y(5);
    for (; alpha > 1e-12; alpha *= 0.5) {
      for (std::size_t j = 0; j < 5; ++j) y[j] = x[j] + alpha * dir[j];
      if (activation_pattern(net, y) == z) break;
    }
    const auto g = gradient(net, x);
    double gd = 0.0;
    for (std::size_t j = 0; j < 5; ++j) gd += g[j] * dir[j];
    CHECK(std::abs(evaluate(net, y) - (evaluate(net, x) + alpha * gd)) <= 1e-9);
  }
}

TEST_CASE("random_network shape, bounds and determinism") {
  const Network net = random_network(10, 2, 100, 10);
  CHECK(net.input_dim() == 10);
  CHECK(net.depth() == 2);
  CHECK(net.hidden_layers()[0].outputs == 100);
  CHECK(net.hidden_layers()[1].inputs == 100);
  CHECK(net.output_layer().outputs == 1);
  CHECK(net.entries_within_unit_bound());
  CHECK(net == random_network(10, 2, 100, 10));
  CHECK_FALSE(net == random_network(10, 2, 100, 11));
  CHECK(random_network(1, 1, 1, 0).parameter_count() == 4);
  CHECK(net.hidden_neuron_count() == 200);
}

TEST_CASE("network constructor validates") {
  CHECK_THROWS_AS(Network(2, {DenseLayer{1, 1, {1.0}, {0.0}}}, DenseLayer{1, 1, {1.0}, {0.0}}),
                  InputError);
  CHECK_THROWS_AS(Network(1, {DenseLayer{1, 1, {1.0}, {0.0}}}, DenseLayer{1, 2, {1.0, 1.0}, {0.0, 0.0}}),
                  InputError);
  CHECK_THROWS_AS(
      Network(1, {DenseLayer{1, 1, {std::nan("")}, {0.0}}}, DenseLayer{1, 1, {1.0}, {0.0}}),
      InputError);
  CHECK_THROWS_AS(Network(1, {DenseLayer{1, 1, {2.0}, {0.0}}}, DenseLayer{1, 1, {1.0}, {0.0}}, true),
                  InputError);
  CHECK_NOTHROW(Network(1, {DenseLayer{1, 1, {2.0}, {0.0}}}, DenseLayer{1, 1, {1.0}, {0.0}}, false));
}

TEST_CASE("project_box examples and idempotence") {
  const Box unit2 = Box::unit(2);
  CHECK(project_box(unit2, std::vector<double>{1.5, -0.2}) == std::vector<double>{1.0, 0.0});
  CHECK(project_box(unit2, std::vector<double>{0.3, 0.7}) == std::vector<double>{0.3, 0.7});
  const Box neg({-2.0}, {-1.0});
  CHECK(project_box(neg, std::vector<double>{0.0}) == std::vector<double>{-1.0});

  Rng rng(5);
  const Box box({-1, 0, 2}, {1, 0.5, 3});
  for (int s = 0; s < 100; ++s) {
    std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto p = project_box(box, x);
    CHECK(box.contains(p));
    CHECK(project_box(box, p) == p);
    // Clamp is the nearest point: no box corner or sample is closer.
    for (int t = 0; t < 5; ++t) {
      const auto q = sample_uniform(box, rng);
      double dp = 0, dq = 0;
      for (int j = 0; j < 3; ++j) {
        dp += (x[j] - p[j]) * (x[j] - p[j]);
        dq += (x[j] - q[j]) * (x[j] - q[j]);
      }
      CHECK(dp <= dq + 1e-15);
    }
  }
}

TEST_CASE("box validation") {
  CHECK_THROWS_AS(Box({1.0}, {0.0}), InputError);
  CHECK_THROWS_AS(Box({0.0}, {std::numeric_limits<double>::infinity()}), InputError);
  CHECK_THROWS_AS(Box({0.0, 1.0}, {1.0}), InputError);
}

TEST_CASE("sample_uniform") {
  Rng rng(0);
  CHECK(sample_uniform(Box({0.0}, {0.0}), rng) == std::vector<double>{0.0});

  const Box box = Box::unit(10);
  Rng a(123), b(123);
  const auto va = sample_uniform(box, a);
  CHECK(va == sample_uniform(box, b));
  CHECK(box.contains(va));

  Rng stat(99);
  const Box one = Box::unit(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_uniform(one, stat)[0];
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("rng normal has roughly unit moments") {
  Rng rng(4);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

TEST_CASE("json round trip is bit-exact") {
  const Network net = random_network(10, 2, 20, 42);
  const auto path = scratch("seed42.json");
  save_network(net, path);
  const Network back = load_network(path, true);
  CHECK(back == net);

  const Box box({-1.25, 0.0}, {0.1, 3.0});
  save_box(box, scratch("box.json"));
  CHECK(load_box(scratch("box.json")) == box);
}

TEST_CASE("hand-written one-neuron json") {
  const auto j = nlohmann::json::parse(R"({
    "input_dim": 1,
    "hidden_layers": [{"weights": [[1]], "bias": [-0.5]}],
    "output_layer": {"weights": [[1]], "bias": [0]}
  })");
  CHECK(network_from_json(j) == testing::one_neuron_net());
}

TEST_CASE("loader rejects malformed documents") {
  auto bad_dims = nlohmann::json::parse(R"({
    "input_dim": 2,
    "hidden_layers": [{"weights": [[1]], "bias": [-0.5]}],
    "output_layer": {"weights": [[1]], "bias": [0]}
  })");
  CHECK_THROWS_AS(network_from_json(bad_dims), InputError);

  auto bad_bias = nlohmann::json::parse(R"({
    "input_dim": 1,
    "hidden_layers": [{"weights": [[1], [2]], "bias": [-0.5]}],
    "output_layer": {"weights": [[1, 1]], "bias": [0]}
  })");
  CHECK_THROWS_AS(network_from_json(bad_bias), InputError);

  auto big = nlohmann::json::parse(R"({
    "input_dim": 1,
    "hidden_layers": [{"weights": [[1.5]], "bias": [0]}],
    "output_layer": {"weights": [[1]], "bias": [0]}
  })");
  CHECK_NOTHROW(network_from_json(big));
  CHECK_THROWS_AS(network_from_json(big, true), InputError);

  CHECK_THROWS_AS(network_from_json(nlohmann::json::parse("[1,2]")), InputError);

  const auto path = scratch("garbage.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_network(path), InputError);
  CHECK_THROWS_AS(load_network(scratch("does_not_exist.json")), InputError);
}
