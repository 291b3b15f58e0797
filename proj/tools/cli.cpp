#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "reluwalk/bench.hpp"
#include "reluwalk/error.hpp"
#include "reluwalk/kernels.hpp"
#include "reluwalk/network_io.hpp"
#include "reluwalk/optimizers.hpp"
#include "reluwalk/oracle.hpp"
#include "reluwalk/profile.hpp"
#include "reluwalk/region.hpp"
#include "reluwalk/selfcheck.hpp"

namespace reluwalk::cli {
namespace {

using nlohmann::json;

// Thrown for bad flag combinations detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("reluwalk", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("RELUWALK_LOG")) logger->set_level(spdlog::level::from_str(env));
  return logger;
}

std::vector<double> parse_point(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.front() == '[') {
    try {
      return json::parse(s).get<std::vector<double>>();
    } catch (const json::exception&) {
      throw UsageError("cannot parse point '" + text + "'");
    }
  }
  std::vector<double> v;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse point '" + text + "'");
    }
  }
  if (v.empty()) throw UsageError("empty point");
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, spdlog::logger& log) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  log.info("generated seed {}", s);
  return s;
}

Box box_for(const std::string& box_path, const Network& net) {
  if (box_path.empty()) return Box::unit(net.input_dim());
  Box box = load_box(box_path);
  if (box.dim() != net.input_dim()) throw InputError("box dimension does not match the network");
  return box;
}

json point_json(const std::vector<double>& x) { return x; }

struct Context {
  std::ostream& out;
  std::ostream& err;
  spdlog::logger& log;
};

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::size_t n0 = 0, depth = 0, width = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto* sub = app.add_subcommand("gen", "Write a random network as JSON");
  sub->add_option("--n0", a.n0, "Input dimension")->required()->check(CLI::PositiveNumber);
  sub->add_option("--depth", a.depth, "Hidden layers")->required()->check(CLI::PositiveNumber);
  sub->add_option("--width", a.width, "Neurons per hidden layer")->required()->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "Generator seed");
  sub->add_option("--out", a.out, "Output network JSON")->required();
}

int run_gen(const GenArgs& a, Context& ctx) {
  const std::uint64_t seed = resolve_seed(a.seed, ctx.log);
  const Network net = random_network(a.n0, a.depth, a.width, seed);
  save_network(net, a.out);
  ctx.out << json{{"out", a.out}, {"seed", seed}, {"parameters", net.parameter_count()}}.dump() << '\n';
  return kExitOk;
}

// ---- opt -------------------------------------------------------------------

struct OptArgs {
  std::string net, box, algo = "ppga", trace_out, x0;
  double gamma = 0.1, xi = 2.0, epsilon = 1e-3;
  std::size_t k = 100;
  std::optional<double> time;
  std::optional<std::uint64_t> iters;
  std::optional<std::uint64_t> seed;
  std::optional<double> valve_v, valve_c;
  bool stall_reset = false;
};

void add_opt(CLI::App& app, OptArgs& a) {
  auto* sub = app.add_subcommand("opt", "Maximise a network over a box with one algorithm");
  sub->add_option("--net", a.net, "Network JSON")->required();
  sub->add_option("--box", a.box, "Box JSON (default [0,1]^n0)");
  sub->add_option("--algo", a.algo, "pga | ppga | ppga-lr | lp-walk")
      ->check(CLI::IsMember({"pga", "ppga", "ppga-lr", "lp-walk"}));
  sub->add_option("--gamma", a.gamma, "Learning rate");
  sub->add_option("--xi", a.xi, "Restart noise coefficient");
  sub->add_option("--epsilon", a.epsilon, "Error threshold");
  sub->add_option("--k", a.k, "Tolerance window");
  sub->add_option("--time", a.time, "Time limit in seconds");
  sub->add_option("--iters", a.iters, "Iteration limit");
  sub->add_option("--seed", a.seed, "Optimiser seed");
  sub->add_option("--trace-out", a.trace_out, "Trace CSV path");
  sub->add_option("--x0", a.x0, "Initial point, e.g. 0.1,0.2");
  sub->add_option("--valve-v", a.valve_v, "Fixed valve value V (ppga-lr)");
  sub->add_option("--valve-c", a.valve_c, "Fixed scale factor c (ppga-lr)");
  sub->add_flag("--stall-reset", a.stall_reset, "Restart after k non-improving iterations");
}

int run_opt(const OptArgs& a, Context& ctx) {
  Algorithm algo;
  try {
    algo = parse_algorithm(a.algo);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  if (!a.time && !a.iters) throw UsageError("opt: give --time or --iters");
  if (a.valve_v.has_value() != a.valve_c.has_value()) {
    throw UsageError("opt: --valve-v and --valve-c go together");
  }
  OptimizerConfig cfg;
  cfg.learning_rate = a.gamma;
  cfg.restart_noise = a.xi;
  cfg.error_threshold = a.epsilon;
  cfg.tolerance_window = a.k;
  cfg.time_limit = a.time;
  cfg.iteration_limit = a.iters;
  cfg.stall_reset = a.stall_reset;
  try {
    cfg.validate(Box::unit(1));
  } catch (const InputError& e) {
    throw UsageError(std::string("opt: ") + e.what());
  }
  std::optional<std::vector<double>> x0;
  if (!a.x0.empty()) x0 = parse_point(a.x0);
  cfg.seed = resolve_seed(a.seed, ctx.log);

  const Network net = load_network(a.net);
  const Box box = box_for(a.box, net);
  cfg.initial_point = x0;
  RunResult res;
  if (algo == Algorithm::kPpgaLr && a.valve_v) {
    res = ppga_lr(net, box, cfg, ValveParams::fixed(*a.valve_v, *a.valve_c));
  } else {
    res = run_algorithm(algo, net, box, cfg);
  }
  if (!a.trace_out.empty()) write_trace_csv(res.trace, a.trace_out);
  ctx.out << json{{"algorithm", a.algo},
                  {"best_value", res.best_value},
                  {"best_point", point_json(res.best_point)},
                  {"iterations", res.iterations},
                  {"resets", res.resets},
                  {"valve_steps", res.valve_steps},
                  {"lp_failures", res.lp_failures},
                  {"seed", res.seed}}
                 .dump()
          << '\n';
  return kExitOk;
}

// ---- gridsearch ------------------------------------------------------------

struct GridArgs {
  std::string config;
  std::optional<std::size_t> workers;
};

void add_grid(CLI::App& app, GridArgs& a) {
  auto* sub = app.add_subcommand("gridsearch", "Calibrate hyperparameters by grid search and voting");
  sub->add_option("--config", a.config, "Grid search config JSON")->required();
  sub->add_option("--workers", a.workers, "Parallel runs")->check(CLI::PositiveNumber);
}

int run_grid(const GridArgs& a, Context& ctx) {
  const json cfg = read_json_file(a.config);
  if (!cfg.is_object()) throw InputError("gridsearch config must be an object");
  for (const char* key : {"n0", "depth", "width", "algorithm"}) {
    if (!cfg.contains(key)) throw InputError(std::string("gridsearch config: missing \"") + key + "\"");
  }
  std::size_t n0 = 0, depth = 0, width = 0;
  std::string algo_name;
  try {
    n0 = cfg.at("n0").get<std::size_t>();
    depth = cfg.at("depth").get<std::size_t>();
    width = cfg.at("width").get<std::size_t>();
    algo_name = cfg.at("algorithm").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError(std::string("gridsearch config: ") + e.what());
  }
  if (n0 == 0 || depth == 0 || width == 0) throw InputError("gridsearch config: dimensions must be positive");
  GridSearchPlan plan = cfg.contains("grid") ? grid_plan_from_json(cfg.at("grid")) : GridSearchPlan::standard();
  if (a.workers) plan.workers = *a.workers;
  const Algorithm algo = parse_algorithm(algo_name);
  ctx.log.info("grid search over {} combinations x {} seeds", plan.size(), plan.seeds.size());
  const GridSearchOutcome g = grid_search(plan, n0, depth, width, algo);

  json tops = json::array();
  for (const auto& list : g.top_lists) {
    json l = json::array();
    for (const auto& h : list) l.push_back(hyperparameters_to_json(h));
    tops.push_back(l);
  }
  ctx.out << json{{"algorithm", algo_name},
                  {"chosen", hyperparameters_to_json(g.chosen)},
                  {"votes", g.votes.at(g.chosen)},
                  {"grid_size", plan.size()},
                  {"evaluations_per_seed", g.evaluations_per_seed},
                  {"top_lists", tops}}
                 .dump()
          << '\n';
  return kExitOk;
}

// ---- bench / profile -------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> workers;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* sub = app.add_subcommand("bench", "Run a benchmark campaign");
  sub->add_option("--config", a.config, "Campaign config JSON")->required();
  sub->add_option("--out", a.out, "Override output_dir");
  sub->add_option("--workers", a.workers, "Parallel runs")->check(CLI::PositiveNumber);
}

void emit_profiles(const std::vector<ResultRow>& rows, const std::filesystem::path& prefix) {
  std::vector<ProblemResult> results;
  for (const auto& r : rows) {
    std::ostringstream problem;
    problem << r.n0 << '_' << r.depth << '_' << r.width << '_' << r.seed;
    results.push_back({problem.str(), r.algorithm, r.best_value});
  }
  const auto curves = performance_profile(results);
  write_profile_csv(curves, prefix.string() + ".csv");
  write_profile_svg(curves, prefix.string() + ".svg");
}

int run_bench(const BenchArgs& a, Context& ctx) {
  CampaignConfig c = campaign_from_json(read_json_file(a.config));
  if (!a.out.empty()) c.output_dir = a.out;
  if (a.workers) c.workers = *a.workers;
  const auto rows = run_campaign(c, [&](const std::string& msg) { ctx.log.info("{}", msg); });
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.best_value ? 1 : 0;
  json report{{"results", (c.output_dir / "results.csv").string()}, {"runs", rows.size()}, {"succeeded", ok}};
  if (ok > 0) {
    emit_profiles(rows, c.output_dir / "profile");
    report["profile"] = (c.output_dir / "profile.csv").string();
  }
  ctx.out << report.dump() << '\n';
  return ok == rows.size() ? kExitOk : kExitRuntime;
}

struct ProfileArgs {
  std::string results;
  std::string out;
};

void add_profile(CLI::App& app, ProfileArgs& a) {
  auto* sub = app.add_subcommand("profile", "Performance profiles from a results CSV");
  sub->add_option("--results", a.results, "results.csv from bench")->required();
  sub->add_option("--out", a.out, "Output prefix; writes <out>.csv and <out>.svg")->required();
}

int run_profile(const ProfileArgs& a, Context& ctx) {
  emit_profiles(read_results_csv(a.results), a.out);
  ctx.out << json{{"csv", a.out + ".csv"}, {"svg", a.out + ".svg"}}.dump() << '\n';
  return kExitOk;
}

// ---- oracle / regions ------------------------------------------------------

struct OracleArgs {
  std::string net, box;
  std::size_t max_neurons = kDefaultMaxNeurons;
};

void add_oracle(CLI::App& app, OracleArgs& a) {
  auto* sub = app.add_subcommand("oracle", "Exact global maximum by enumerating activation patterns");
  sub->add_option("--net", a.net, "Network JSON")->required();
  sub->add_option("--box", a.box, "Box JSON (default [0,1]^n0)");
  sub->add_option("--max-neurons", a.max_neurons, "Refuse networks with more hidden neurons");
}

int run_oracle(const OracleArgs& a, Context& ctx) {
  const Network net = load_network(a.net);
  const Box box = box_for(a.box, net);
  const GlobalOptimum opt = enumerate_optimum(net, box, a.max_neurons);
  ctx.out << json{{"value", opt.value},
                  {"point", point_json(opt.point)},
                  {"feasible_regions", opt.feasible_regions},
                  {"patterns_enumerated", opt.patterns_enumerated}}
                 .dump()
          << '\n';
  return kExitOk;
}

struct RegionsArgs {
  std::string net, x;
};

void add_regions(CLI::App& app, RegionsArgs& a) {
  auto* sub = app.add_subcommand("regions", "Region of a point: pattern, affine map, halfspaces, ratio test");
  sub->add_option("--net", a.net, "Network JSON")->required();
  sub->add_option("--x", a.x, "Point, e.g. 0.1,0.2 or [0.1,0.2]")->required();
}

int run_regions(const RegionsArgs& a, Context& ctx) {
  const std::vector<double> x = parse_point(a.x);
  const Network net = load_network(a.net);
  if (x.size() != net.input_dim()) throw InputError("point dimension does not match the network");
  const ActivationPattern z = activation_pattern(net, x);
  const AffineMap affine = region_affine(net, z);
  json halfspaces = json::array();
  for (const auto& h : region_halfspaces(net, z)) {
    halfspaces.push_back({{"normal", h.normal},
                          {"offset", h.offset},
                          {"sense", h.sense == Sense::kGreaterEqual ? ">=" : "<="}});
  }
  const RatioTestResult rt = ratio_test(net, x);
  json ratio{{"u", std::isfinite(rt.u) ? json(rt.u) : json(nullptr)},
             {"blocking_neuron", rt.blocking_neuron ? json(*rt.blocking_neuron) : json(nullptr)},
             {"gradient", rt.gradient},
             {"gradient_norm", rt.gradient_norm}};
  ctx.out << json{{"x", x},
                  {"value", evaluate(net, x)},
                  {"pattern", z.to_string()},
                  {"affine", {{"T", affine.slope}, {"t", affine.offset}}},
                  {"halfspaces", halfspaces},
                  {"ratio_test", ratio}}
                 .dump()
          << '\n';
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string net, box;
  std::size_t samples = 100;
  std::optional<std::uint64_t> seed;
};

void add_verify(CLI::App& app, VerifyArgs& a) {
  auto* sub = app.add_subcommand("verify", "Self-check suite on a network");
  sub->add_option("--net", a.net, "Network JSON")->required();
  sub->add_option("--box", a.box, "Box JSON (default [0,1]^n0)");
  sub->add_option("--samples", a.samples, "Sample points");
  sub->add_option("--seed", a.seed, "Sampling seed");
}

int run_verify(const VerifyArgs& a, Context& ctx) {
  const std::uint64_t seed = resolve_seed(a.seed, ctx.log);
  const Network net = load_network(a.net);
  const Box box = box_for(a.box, net);
  if (a.samples == 0) ctx.log.warn("verify: 0 samples, nothing checked");
  const SelfCheckReport report = run_self_check(net, box, a.samples, seed);
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed()},
                      {"checked", c.checked},
                      {"skipped", c.skipped},
                      {"failures", c.failures},
                      {"worst_error", c.worst}});
  }
  ctx.out << json{{"passed", report.passed()}, {"samples", a.samples}, {"seed", seed},
                  {"kernels", std::string(kernels::isa_name(kernels::active().isa))}, {"checks", checks}}
                 .dump()
          << '\n';
  return report.passed() ? kExitOk : kExitRuntime;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto logger = make_logger(err);
  Context ctx{out, err, *logger};

  CLI::App app{"Local search over the input space of ReLU networks"};
  app.name("reluwalk");
  app.require_subcommand(1);
  GenArgs gen;
  OptArgs opt;
  GridArgs grid;
  BenchArgs bench;
  ProfileArgs profile;
  OracleArgs oracle;
  RegionsArgs regions;
  VerifyArgs verify;
  add_gen(app, gen);
  add_opt(app, opt);
  add_grid(app, grid);
  add_bench(app, bench);
  add_profile(app, profile);
  add_oracle(app, oracle);
  add_regions(app, regions);
  add_verify(app, verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen") return run_gen(gen, ctx);
    if (name == "opt") return run_opt(opt, ctx);
    if (name == "gridsearch") return run_grid(grid, ctx);
    if (name == "bench") return run_bench(bench, ctx);
    if (name == "profile") return run_profile(profile, ctx);
    if (name == "oracle") return run_oracle(oracle, ctx);
    if (name == "regions") return run_regions(regions, ctx);
    if (name == "verify") return run_verify(verify, ctx);
    err << "error: unknown subcommand " << name << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace reluwalk::cli
