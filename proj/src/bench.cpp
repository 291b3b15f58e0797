#include "reluwalk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "reluwalk/error.hpp"
#include "reluwalk/network.hpp"
#include "reluwalk/network_io.hpp"

namespace reluwalk {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> read_list(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("config \"") + key + "\": " + e.what());
  }
}

template <typename T>
std::optional<T> read_optional(const json& j, const char* key, std::optional<T> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config \"") + key + "\": " + e.what());
  }
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string experiment_tag(std::size_t n0, std::size_t d, std::size_t m, std::uint64_t seed,
                           Algorithm algo) {
  std::ostringstream s;
  s << n0 << '_' << d << '_' << m << '_' << seed << '_' << to_string(algo);
  return s.str();
}

}  // namespace

json hyperparameters_to_json(const Hyperparameters& h) {
  return {{"gamma", h.gamma}, {"xi", h.xi}, {"k", h.k}, {"epsilon", h.epsilon}};
}

Hyperparameters hyperparameters_from_json(const json& j, const Hyperparameters& defaults) {
  if (!j.is_object()) throw InputError("hyperparameters must be an object");
  Hyperparameters h = defaults;
  try {
    if (j.contains("gamma")) h.gamma = j.at("gamma").get<double>();
    if (j.contains("xi")) h.xi = j.at("xi").get<double>();
    if (j.contains("sigma")) h.xi = j.at("sigma").get<double>();
    if (j.contains("k")) h.k = j.at("k").get<std::size_t>();
    if (j.contains("epsilon")) h.epsilon = j.at("epsilon").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("hyperparameters: ") + e.what());
  }
  return h;
}

void ExperimentSpec::validate() const {
  if (n0 == 0 || depth == 0 || width == 0) throw InputError("experiment dimensions must be positive");
  if (!budget_s && !iterations) throw InputError("experiment needs a time or iteration budget");
  optimizer_config().validate(Box::unit(n0));
}

OptimizerConfig ExperimentSpec::optimizer_config() const {
  OptimizerConfig cfg;
  cfg.learning_rate = hyper.gamma;
  cfg.restart_noise = hyper.xi;
  cfg.tolerance_window = hyper.k;
  cfg.error_threshold = hyper.epsilon;
  cfg.time_limit = budget_s;
  cfg.iteration_limit = iterations;
  cfg.seed = run_seed.value_or(seed);
  return cfg;
}

RunResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Network net = random_network(spec.n0, spec.depth, spec.width, spec.seed);
  const Box box = Box::unit(spec.n0);
  RunResult result = run_algorithm(spec.algorithm, net, box, spec.optimizer_config());
  if (spec.trace_path) write_trace_csv(result.trace, *spec.trace_path);
  return result;
}

GridSearchPlan GridSearchPlan::standard() {
  GridSearchPlan plan;
  plan.gammas = {0.001, 0.01, 0.1, 1.0, 5.0};
  plan.xis = {0.2, 2.0, 20.0};
  plan.ks = {100, 500, 1000};
  plan.seeds = {5, 6, 7, 8, 9};
  plan.budget_s = 300.0;
  plan.top_count = 5;
  return plan;
}

std::vector<Hyperparameters> GridSearchPlan::combinations() const {
  std::vector<Hyperparameters> combos;
  combos.reserve(size());
  for (double g : gammas) {
    for (double x : xis) {
      for (std::size_t k : ks) combos.push_back({g, x, k, epsilon});
    }
  }
  return combos;
}

void GridSearchPlan::validate() const {
  if (size() == 0) throw InputError("grid search: empty grid");
  if (seeds.empty()) throw InputError("grid search: no grid seeds");
  if (top_count == 0) throw InputError("grid search: top_count must be positive");
  if (!budget_s && !iterations) throw InputError("grid search: needs a per-point budget");
}

GridSearchPlan grid_plan_from_json(const json& j) {
  if (!j.is_object()) throw InputError("grid plan must be an object");
  const GridSearchPlan d = GridSearchPlan::standard();
  GridSearchPlan plan;
  plan.gammas = read_list<double>(j, "gamma", d.gammas);
  plan.xis = read_list<double>(j, j.contains("sigma") ? "sigma" : "xi", d.xis);
  plan.ks = read_list<std::size_t>(j, "k", d.ks);
  plan.seeds = read_list<std::uint64_t>(j, "seeds", d.seeds);
  plan.iterations = read_optional<std::uint64_t>(j, "iterations", std::nullopt);
  plan.budget_s = read_optional<double>(j, "budget_s", plan.iterations ? std::nullopt : d.budget_s);
  plan.top_count = read_optional<std::size_t>(j, "top_count", d.top_count).value_or(d.top_count);
  plan.epsilon = read_optional<double>(j, "epsilon", d.epsilon).value_or(d.epsilon);
  plan.workers = read_optional<std::size_t>(j, "workers", std::size_t{1}).value_or(1);
  plan.validate();
  return plan;
}

Hyperparameters vote(const std::vector<std::vector<Hyperparameters>>& top_lists,
                     const std::map<Hyperparameters, double>& mean_values) {
  std::map<Hyperparameters, std::size_t> votes;
  for (const auto& list : top_lists) {
    for (const auto& h : list) ++votes[h];
  }
  if (votes.empty()) throw InputError("vote: no top lists");
  auto mean_of = [&](const Hyperparameters& h) {
    auto it = mean_values.find(h);
    return it == mean_values.end() ? -std::numeric_limits<double>::infinity() : it->second;
  };
  // std::map iterates in lexicographic order, so strict comparisons keep the
  // smallest combination on a full tie.
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    if (it->second > best->second ||
        (it->second == best->second && mean_of(it->first) > mean_of(best->first))) {
      best = it;
    }
  }
  return best->first;
}

GridSearchOutcome grid_search(const GridSearchPlan& plan, std::size_t n0, std::size_t depth,
                              std::size_t width, Algorithm algorithm, const GridEvaluator& evaluator) {
  plan.validate();
  if (!is_gradient_based(algorithm)) {
    throw InputError("grid search applies to gradient-based algorithms only");
  }
  const GridEvaluator eval =
      evaluator ? evaluator : GridEvaluator([](const ExperimentSpec& s) { return run_experiment(s).best_value; });
  const auto combos = plan.combinations();

  GridSearchOutcome outcome;
  std::map<Hyperparameters, double> sums;
  const std::size_t per_seed = combos.size();
  std::vector<double> values(plan.seeds.size() * per_seed);
  parallel_for(values.size(), plan.workers, [&](std::size_t idx) {
    ExperimentSpec spec;
    spec.n0 = n0;
    spec.depth = depth;
    spec.width = width;
    spec.seed = plan.seeds[idx / per_seed];
    spec.algorithm = algorithm;
    spec.hyper = combos[idx % per_seed];
    spec.budget_s = plan.budget_s;
    spec.iterations = plan.iterations;
    values[idx] = eval(spec);
  });

  for (std::size_t s = 0; s < plan.seeds.size(); ++s) {
    std::vector<std::size_t> order(per_seed);
    for (std::size_t i = 0; i < per_seed; ++i) {
      order[i] = i;
      sums[combos[i]] += values[s * per_seed + i];
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[s * per_seed + a] > values[s * per_seed + b];
    });
    std::vector<Hyperparameters> top;
    for (std::size_t i = 0; i < std::min(plan.top_count, per_seed); ++i) top.push_back(combos[order[i]]);
    outcome.top_lists.push_back(std::move(top));
    outcome.evaluations_per_seed.push_back(per_seed);
  }
  for (const auto& [h, sum] : sums) outcome.mean_values[h] = sum / static_cast<double>(plan.seeds.size());
  for (const auto& list : outcome.top_lists) {
    for (const auto& h : list) ++outcome.votes[h];
  }
  outcome.chosen = vote(outcome.top_lists, outcome.mean_values);
  return outcome;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "n0,depth,width,seed,algorithm,gamma,xi,epsilon,k,budget_s,best_value,iterations\n";
  for (const auto& r : rows) {
    out << r.n0 << ',' << r.depth << ',' << r.width << ',' << r.seed << ',' << r.algorithm << ','
        << format_double(r.hyper.gamma) << ',' << format_double(r.hyper.xi) << ','
        << format_double(r.hyper.epsilon) << ',' << r.hyper.k << ','
        << (r.budget_s ? format_double(*r.budget_s) : "") << ','
        << (r.best_value ? format_double(*r.best_value) : "") << ',' << r.iterations << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "n0,depth,width,seed,algorithm,gamma,xi,epsilon,k,budget_s,best_value,iterations") {
    throw InputError(path.string() + ": unexpected results header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 12 fields");
    }
    try {
      ResultRow r;
      r.n0 = std::stoul(f[0]);
      r.depth = std::stoul(f[1]);
      r.width = std::stoul(f[2]);
      r.seed = std::stoull(f[3]);
      r.algorithm = f[4];
      r.hyper.gamma = std::stod(f[5]);
      r.hyper.xi = std::stod(f[6]);
      r.hyper.epsilon = std::stod(f[7]);
      r.hyper.k = std::stoul(f[8]);
      if (!f[9].empty()) r.budget_s = std::stod(f[9]);
      if (!f[10].empty()) r.best_value = std::stod(f[10]);
      r.iterations = std::stoull(f[11]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

CampaignConfig campaign_from_json(const json& j) {
  if (!j.is_object()) throw InputError("campaign config must be a JSON object");
  CampaignConfig c;
  c.n0s = read_list<std::size_t>(j, "n0", c.n0s);
  c.depths = read_list<std::size_t>(j, "depth", c.depths);
  c.widths = read_list<std::size_t>(j, "width", c.widths);
  c.seeds = read_list<std::uint64_t>(j, "seeds", c.seeds);
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& name : read_list<std::string>(j, "algorithms", {})) {
      c.algorithms.push_back(parse_algorithm(name));
    }
  }
  c.iterations = read_optional<std::uint64_t>(j, "iterations", std::nullopt);
  c.budget_s = read_optional<double>(j, "budget_s", c.iterations ? std::nullopt : c.budget_s);
  c.epsilon = read_optional<double>(j, "epsilon", c.epsilon).value_or(c.epsilon);
  if (j.contains("grid") && !j.at("grid").is_null()) c.grid = grid_plan_from_json(j.at("grid"));
  if (j.contains("hyperparameters")) {
    const json& hp = j.at("hyperparameters");
    if (!hp.is_object()) throw InputError("\"hyperparameters\" must map algorithm names to objects");
    for (const auto& [name, value] : hp.items()) {
      Hyperparameters defaults;
      defaults.epsilon = c.epsilon;
      c.hyperparameters[parse_algorithm(name)] = hyperparameters_from_json(value, defaults);
    }
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  c.workers = read_optional<std::size_t>(j, "workers", std::size_t{1}).value_or(1);
  c.write_traces = read_optional<bool>(j, "write_traces", true).value_or(true);
  if (c.algorithms.empty()) throw InputError("campaign: no algorithms");
  if (c.n0s.empty() || c.depths.empty() || c.widths.empty() || c.seeds.empty()) {
    throw InputError("campaign: empty dimension or seed list");
  }
  for (auto v : c.n0s) if (v == 0) throw InputError("campaign: n0 must be positive");
  for (auto v : c.depths) if (v == 0) throw InputError("campaign: depth must be positive");
  for (auto v : c.widths) if (v == 0) throw InputError("campaign: width must be positive");
  if (!c.budget_s && !c.iterations) throw InputError("campaign: needs budget_s or iterations");
  return c;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ResultRow> run_campaign(const CampaignConfig& config, const ProgressFn& progress) {
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  std::filesystem::create_directories(config.output_dir);
  if (config.write_traces) std::filesystem::create_directories(config.output_dir / "traces");

  json chosen = json::array();
  std::vector<ExperimentSpec> specs;
  for (std::size_t n0 : config.n0s) {
    for (std::size_t d : config.depths) {
      for (std::size_t m : config.widths) {
        for (Algorithm algo : config.algorithms) {
          Hyperparameters h;
          h.epsilon = config.epsilon;
          if (auto it = config.hyperparameters.find(algo); it != config.hyperparameters.end()) {
            h = it->second;
          }
          if (is_gradient_based(algo) && config.grid) {
            GridSearchPlan plan = *config.grid;
            plan.workers = config.workers;
            say("grid search " + std::string(to_string(algo)) + " on (" + std::to_string(n0) + "," +
                std::to_string(d) + "," + std::to_string(m) + ")");
            h = grid_search(plan, n0, d, m, algo).chosen;
          }
          chosen.push_back({{"n0", n0}, {"depth", d}, {"width", m}, {"algorithm", to_string(algo)},
                            {"hyperparameters", hyperparameters_to_json(h)}});
          for (std::uint64_t seed : config.seeds) {
            ExperimentSpec s;
            s.n0 = n0;
            s.depth = d;
            s.width = m;
            s.seed = seed;
            s.algorithm = algo;
            s.hyper = h;
            s.budget_s = config.budget_s;
            s.iterations = config.iterations;
            if (config.write_traces) {
              s.trace_path = config.output_dir / "traces" / (experiment_tag(n0, d, m, seed, algo) + ".csv");
            }
            specs.push_back(std::move(s));
          }
        }
      }
    }
  }
  write_json_file(chosen, config.output_dir / "hyperparameters.json");

  std::vector<ResultRow> rows(specs.size());
  std::mutex log_mutex;
  parallel_for(specs.size(), config.workers, [&](std::size_t i) {
    const ExperimentSpec& s = specs[i];
    ResultRow& r = rows[i];
    r.n0 = s.n0;
    r.depth = s.depth;
    r.width = s.width;
    r.seed = s.seed;
    r.algorithm = std::string(to_string(s.algorithm));
    r.hyper = s.hyper;
    r.budget_s = s.budget_s;
    try {
      const RunResult res = run_experiment(s);
      r.best_value = res.best_value;
      r.iterations = res.iterations;
    } catch (const std::exception& e) {
      std::lock_guard lock(log_mutex);
      say("run " + experiment_tag(s.n0, s.depth, s.width, s.seed, s.algorithm) + " failed: " + e.what());
      return;
    }
    std::lock_guard lock(log_mutex);
    say("done " + experiment_tag(s.n0, s.depth, s.width, s.seed, s.algorithm) + " best=" +
        format_double(*r.best_value));
  });
  write_results_csv(rows, config.output_dir / "results.csv");
  return rows;
}

}  // namespace reluwalk
