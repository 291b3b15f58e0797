#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reluwalk/optimizers.hpp"

namespace reluwalk {

struct Hyperparameters {
  double gamma = 0.1;
  double xi = 2.0;
  std::size_t k = 100;
  double epsilon = 1e-3;

  /// Lexicographic on (gamma, xi, k, epsilon).
  friend auto operator<=>(const Hyperparameters&, const Hyperparameters&) = default;
};

nlohmann::json hyperparameters_to_json(const Hyperparameters& h);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j, const Hyperparameters& defaults = {});

/// One network (n0, depth, width, seed) optimised by one algorithm.
struct ExperimentSpec {
  std::size_t n0 = 10;
  std::size_t depth = 2;
  std::size_t width = 100;
  std::uint64_t seed = 10;
  Algorithm algorithm = Algorithm::kPpga;
  Hyperparameters hyper;
  std::optional<double> budget_s;
  std::optional<std::uint64_t> iterations;
  /// Optimiser seed; defaults to the network seed.
  std::optional<std::uint64_t> run_seed;
  std::optional<std::filesystem::path> trace_path;

  void validate() const;
  OptimizerConfig optimizer_config() const;
};

/// Generates the network, runs the algorithm over [0,1]^n0 and writes the
/// trace CSV when a path is set.
RunResult run_experiment(const ExperimentSpec& spec);

struct GridSearchPlan {
  std::vector<double> gammas;
  std::vector<double> xis;
  std::vector<std::size_t> ks;
  std::vector<std::uint64_t> seeds;
  std::optional<double> budget_s;
  std::optional<std::uint64_t> iterations;
  std::size_t top_count = 5;
  double epsilon = 1e-3;
  std::size_t workers = 1;

  /// gamma {0.001, 0.01, 0.1, 1, 5}, xi {0.2, 2, 20}, k {100, 500, 1000},
  /// seeds {5..9}, 300 s per point, top 5.
  static GridSearchPlan standard();

  std::size_t size() const noexcept { return gammas.size() * xis.size() * ks.size(); }
  /// All combinations in lexicographic (gamma, xi, k) order.
  std::vector<Hyperparameters> combinations() const;
  void validate() const;
};

GridSearchPlan grid_plan_from_json(const nlohmann::json& j);

/// Final best value of one grid point; the default runs run_experiment.
using GridEvaluator = std::function<double(const ExperimentSpec&)>;

struct GridSearchOutcome {
  Hyperparameters chosen;
  std::vector<std::vector<Hyperparameters>> top_lists;  // one per grid seed
  std::vector<std::size_t> evaluations_per_seed;
  std::map<Hyperparameters, std::size_t> votes;
  std::map<Hyperparameters, double> mean_values;
};

/// Voting across per-seed top lists: most appearances wins, then the higher
/// mean final value, then the lexicographically smallest (gamma, xi, k).
Hyperparameters vote(const std::vector<std::vector<Hyperparameters>>& top_lists,
                     const std::map<Hyperparameters, double>& mean_values);

GridSearchOutcome grid_search(const GridSearchPlan& plan, std::size_t n0, std::size_t depth,
                              std::size_t width, Algorithm algorithm,
                              const GridEvaluator& evaluator = {});

/// One line of the results CSV.
struct ResultRow {
  std::size_t n0 = 0;
  std::size_t depth = 0;
  std::size_t width = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  Hyperparameters hyper;
  std::optional<double> budget_s;
  std::optional<double> best_value;
  std::uint64_t iterations = 0;
};

/// Header `n0,depth,width,seed,algorithm,gamma,xi,epsilon,k,budget_s,best_value,iterations`.
void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

struct CampaignConfig {
  std::vector<std::size_t> n0s{2, 10};
  std::vector<std::size_t> depths{2, 4};
  std::vector<std::size_t> widths{20, 100};
  std::vector<std::uint64_t> seeds{10, 11, 12, 13, 14};
  std::vector<Algorithm> algorithms{Algorithm::kPga, Algorithm::kPpga, Algorithm::kPpgaLr,
                                    Algorithm::kLpWalk};
  std::optional<double> budget_s = 60.0;
  std::optional<std::uint64_t> iterations;
  std::optional<GridSearchPlan> grid;
  std::map<Algorithm, Hyperparameters> hyperparameters;
  double epsilon = 1e-3;
  std::filesystem::path output_dir = "bench_out";
  std::size_t workers = 1;
  bool write_traces = true;
};

CampaignConfig campaign_from_json(const nlohmann::json& j);

using ProgressFn = std::function<void(const std::string&)>;

/// Calibrates (when a grid is configured), runs every experiment and writes
/// results.csv and hyperparameters.json into output_dir.
std::vector<ResultRow> run_campaign(const CampaignConfig& config, const ProgressFn& progress = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace reluwalk
