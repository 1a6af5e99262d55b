// qcd: solve, inspect, simulate and evaluate joint detection/identification
// instances from the command line.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcd/config.hpp"
#include "qcd/evaluation.hpp"
#include "qcd/export.hpp"
#include "qcd/policy_store.hpp"
#include "qcd/presets.hpp"
#include "qcd/regions.hpp"
#include "qcd/solver.hpp"
#include "qcd/strategy.hpp"

namespace {

// Exit codes. Each failure class has its own code so scripts can branch.
enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kConfig = 4,
  kValidation = 5,
  kSolver = 6,
  kPolicyFormat = 7,
  kHorizonGuard = 8,
  kCheckFailed = 9,
  kUnsupported = 10,
};

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int code, std::string kind, std::string message) {
  throw Failure{code, std::move(kind), std::move(message)};
}

int report(const Failure& f) {
  nlohmann::json line{{"error", f.kind}, {"exit", f.code}, {"message", f.message}};
  std::cerr << line.dump() << '\n';
  return f.code;
}

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
  if (path == "-") return read_all(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kIo, "io", fmt::format("cannot open {}", path));
  return read_all(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kIo, "io", fmt::format("cannot open {} for writing", path));
  out << text;
  if (!out) fail(kIo, "io", fmt::format("failed writing {}", path));
}

qcd::Instance load_config(const std::string& path) {
  const std::string text = read_text(path);
  qcd::Instance instance;
  try {
    instance = qcd::parse_instance(text);
  } catch (const qcd::ConfigError& e) {
    fail(kConfig, "config", e.what());
  }
  const auto issues = qcd::validate(instance.model, instance.costs);
  if (!issues.ok()) fail(kValidation, "validation", issues.summary());
  if (issues.has_warnings()) std::cerr << "warning: " << issues.summary() << '\n';
  return instance;
}

qcd::SolvedInstance load_solved(const std::string& path) {
  const std::string bytes = read_text(path);
  std::istringstream in(bytes);
  try {
    return qcd::read_policy(in);
  } catch (const qcd::PolicyFormatError& e) {
    fail(kPolicyFormat, "policy_format", e.what());
  } catch (const qcd::ConfigError& e) {
    fail(kPolicyFormat, "policy_format", std::string("embedded instance: ") + e.what());
  }
}

std::optional<qcd::kernels::Isa> parse_isa(const std::string& name) {
  if (name == "auto") return std::nullopt;
  if (name == "scalar") return qcd::kernels::Isa::Scalar;
  if (name == "avx2") {
    if (!qcd::kernels::available(qcd::kernels::Isa::Avx2)) {
      fail(kUnsupported, "unsupported", "AVX2 kernels are not available on this machine");
    }
    return qcd::kernels::Isa::Avx2;
  }
  fail(kUsage, "usage", fmt::format("unknown --isa {}", name));
}

// Strategy specs: optimal, stop0, threshold:<pi0>, fixed:<n>[:<d>], truncated:<N>.
std::unique_ptr<qcd::Strategy> make_strategy(const std::string& spec, const qcd::SolvedInstance& s) {
  const auto& model = s.instance.model;
  const auto& costs = s.instance.costs;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "optimal") {
      return std::make_unique<qcd::OptimalStrategy>(model, costs, s.value_function,
                                                    s.policy.stop_tolerance);
    }
    if (kind == "stop0") return std::make_unique<qcd::FixedSampleStrategy>(model, costs, 0);
    if (kind == "threshold") {
      return std::make_unique<qcd::ThresholdStrategy>(model, costs, std::stod(arg));
    }
    if (kind == "fixed") {
      const auto second = arg.find(':');
      const std::size_t n = std::stoul(arg.substr(0, second));
      std::optional<std::size_t> d;
      if (second != std::string::npos) d = std::stoul(arg.substr(second + 1));
      return std::make_unique<qcd::FixedSampleStrategy>(model, costs, n, d);
    }
    if (kind == "truncated") {
      if (s.policy.snapshots.empty()) {
        fail(kUsage, "usage", "truncated strategies need a policy solved with --snapshots");
      }
      return std::make_unique<qcd::TruncatedStrategy>(model, costs, *s.value_function.grid,
                                                      s.policy.snapshots, std::stoul(arg));
    }
  } catch (const std::logic_error& e) {
    fail(kUsage, "usage", fmt::format("bad strategy '{}': {}", spec, e.what()));
  }
  fail(kUsage, "usage", fmt::format("unknown strategy '{}'", spec));
}

// ---- subcommands ----------------------------------------------------------

struct PresetArgs {
  std::string name;
  bool list = false;
};

void run_preset(const PresetArgs& args) {
  if (args.list || args.name.empty()) {
    for (const auto& p : qcd::preset_catalog()) {
      std::cout << fmt::format("{:<12} {}\n", p.name, p.description);
    }
    return;
  }
  try {
    std::cout << qcd::to_json(qcd::preset(args.name)) << '\n';
  } catch (const std::invalid_argument& e) {
    fail(kUsage, "usage", e.what());
  }
}

struct SolveArgs {
  std::string config = "-";
  std::string out = "-";
  std::size_t grid = 200;
  double tol = 1e-6;
  std::optional<std::size_t> max_iters;
  std::optional<std::size_t> iterations;
  bool snapshots = false;
  std::size_t threads = 1;
  std::string isa = "auto";
  std::string values_csv;
};

void run_solve(const SolveArgs& args) {
  const auto instance = load_config(args.config);
  qcd::SolverOptions options;
  options.tolerance = args.tol;
  options.max_iterations = args.max_iters;
  options.fixed_iterations = args.iterations;
  options.record_snapshots = args.snapshots;
  options.threads = args.threads;
  options.isa = parse_isa(args.isa);

  std::shared_ptr<const qcd::SimplexGrid> grid;
  try {
    grid = std::make_shared<const qcd::SimplexGrid>(instance.model.M, args.grid);
  } catch (const std::exception& e) {
    fail(kUsage, "grid", e.what());
  }

  qcd::SolvedInstance solved;
  solved.instance = instance;
  try {
    solved.value_function = qcd::value_iterate(instance.model, instance.costs, grid, options);
  } catch (const qcd::SolverError& e) {
    fail(kSolver, "solver", e.what());
  } catch (const std::invalid_argument& e) {
    fail(kValidation, "validation", e.what());
  }
  solved.policy = qcd::extract_policy(solved.value_function, instance.model, instance.costs);

  std::ostringstream bytes;
  qcd::write_policy(bytes, solved);
  write_text(args.out, bytes.str());
  if (!args.values_csv.empty()) {
    write_text(args.values_csv, qcd::policy_csv(solved.value_function, solved.policy));
  }

  const auto& vf = solved.value_function;
  const double v0 = qcd::interpolate(vf, qcd::initial_belief(instance.model));
  std::cerr << fmt::format(
      "solved {} on G={} ({} points): iterations={} final_delta={:.3g} certified_gap={:.6g} "
      "V0={:.9g} isa={}\n",
      instance.name, args.grid, grid->size(), vf.iteration_count, vf.final_delta,
      vf.certified_gap, v0,
      qcd::kernels::to_string(options.isa.value_or(qcd::kernels::detect())));
}

struct RegionsArgs {
  std::string policy = "-";
  std::string raster;
  std::string svg;
  std::string values_csv;
  std::optional<std::uint64_t> path_seed;
};

void run_regions(const RegionsArgs& args) {
  const auto solved = load_solved(args.policy);
  const auto report = qcd::region_analysis(solved.policy);
  std::cout << fmt::format("instance {} M={} G={} points={}\n", solved.instance.name,
                           solved.instance.model.M, solved.policy.grid->resolution(),
                           solved.policy.grid->size());
  std::cout << qcd::describe(report);

  if (!args.raster.empty()) write_text(args.raster, qcd::raster_csv(solved.policy));
  if (!args.values_csv.empty()) {
    write_text(args.values_csv, qcd::policy_csv(solved.value_function, solved.policy));
  }
  if (!args.svg.empty()) {
    std::vector<qcd::TrajectoryPoint> path;
    if (args.path_seed) {
      qcd::OptimalStrategy optimal(solved.instance.model, solved.instance.costs,
                                   solved.value_function, solved.policy.stop_tolerance);
      qcd::ObservationStream stream(solved.instance.model, *args.path_seed);
      path = optimal.run(stream, true).trajectory;
    }
    try {
      write_text(args.svg, qcd::region_svg(solved.policy, solved.instance.costs, path));
    } catch (const qcd::UnsupportedDimension& e) {
      fail(kUnsupported, "unsupported", e.what());
    }
  }
}

struct SimulateArgs {
  std::string policy;
  std::string strategy = "optimal";
  std::size_t episodes = 10;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string outcomes;
};

void run_simulate(const SimulateArgs& args) {
  const auto solved = load_solved(args.policy);
  const auto strategy = make_strategy(args.strategy, solved);
  const auto& model = solved.instance.model;
  const auto& costs = solved.instance.costs;
  std::string traj = qcd::trajectory_csv_header(model.M);
  std::vector<qcd::EpisodeOutcome> outcomes;
  for (std::size_t e = 0; e < args.episodes; ++e) {
    qcd::ObservationStream stream(model, qcd::episode_seed(args.seed, e));
    qcd::RunResult run;
    try {
      run = strategy->run(stream, true);
    } catch (const qcd::StreamExhausted& ex) {
      fail(kHorizonGuard, "horizon_guard", ex.what());
    }
    qcd::score(run, stream.theta(), stream.mu(), costs);
    traj += qcd::trajectory_csv_rows(e, run.trajectory);
    outcomes.push_back({stream.theta(), stream.mu(), run.tau, run.decision, *run.loss});
  }
  write_text(args.out, traj);
  if (!args.outcomes.empty()) write_text(args.outcomes, qcd::outcomes_csv(outcomes));
}

struct EvaluateArgs {
  std::string policy;
  std::size_t episodes = 10'000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::vector<std::string> alternatives{"stop0", "threshold:0.5", "threshold:0.1", "fixed:10"};
  double grid_delta = 0.0;
  std::string csv;
};

void run_evaluate(const EvaluateArgs& args) {
  const auto solved = load_solved(args.policy);
  const auto& model = solved.instance.model;
  const auto& costs = solved.instance.costs;
  qcd::EvaluationOptions options;
  options.episodes = args.episodes;
  options.seed = args.seed;
  options.threads = args.threads;
  if (args.episodes < 1) fail(kUsage, "usage", "--episodes must be at least 1");

  const auto optimal = make_strategy("optimal", solved);
  std::vector<std::unique_ptr<qcd::Strategy>> owned;
  std::vector<const qcd::Strategy*> alternatives;
  for (const auto& spec : args.alternatives) {
    owned.push_back(make_strategy(spec, solved));
    alternatives.push_back(owned.back().get());
  }
  qcd::DominanceReport report;
  try {
    report = qcd::dominance_check(model, costs, *optimal, alternatives, options,
                                  solved.value_function.certified_gap, args.grid_delta);
  } catch (const qcd::HorizonGuardTripped& e) {
    fail(kHorizonGuard, "horizon_guard", e.what());
  }
  const double v0 = qcd::interpolate(solved.value_function, qcd::initial_belief(model));
  std::vector<qcd::RiskEstimate> risks{report.optimal};
  for (const auto& e : report.entries) risks.push_back(e.risk);

  std::string text = fmt::format("instance {}  V0(initial belief) = {:.9g}\n", solved.instance.name, v0);
  const double diff = report.optimal.mean - v0;
  const double slack = 3.0 * report.optimal.standard_error + report.certified_gap + report.grid_delta;
  text += fmt::format("optimal risk - V0 = {:+.6f}, slack {:.6f}: {}\n", diff, slack,
                      std::abs(diff) <= slack ? "consistent" : "INCONSISTENT");
  text += qcd::dominance_text(report);
  text += '\n';
  text += qcd::risk_csv(risks);
  std::cout << text;
  if (!args.csv.empty()) write_text(args.csv, qcd::dominance_csv(report));
}

struct CheckArgs {
  std::string config = "-";
  std::size_t episodes = 100'000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> stages{1, 5, 10, 20};
  std::size_t threads = 1;
  std::string csv;
};

void run_check(const CheckArgs& args) {
  const auto instance = load_config(args.config);
  const auto& model = instance.model;
  const auto diag =
      qcd::posterior_diagnostics(model, args.episodes, args.seed, args.stages, args.threads);
  std::cout << qcd::diagnostics_text(diag);

  // Expectation identity for h_1 at the initial belief.
  std::vector<double> coeff(model.M + 1);
  for (std::size_t i = 0; i <= model.M; ++i) coeff[i] = instance.costs.terminal(i, 1);
  const auto identity = qcd::expectation_identity(model, qcd::initial_belief(model), coeff,
                                                  args.episodes, args.seed);
  std::cout << fmt::format("  T-expectation identity: exact {:.9f}, monte carlo {:.9f} +- {:.3g}  {}\n",
                           identity.exact, identity.monte_carlo.mean,
                           identity.monte_carlo.standard_error, identity.pass ? "PASS" : "FAIL");
  if (!args.csv.empty()) write_text(args.csv, qcd::diagnostics_csv(diag));
  if (!diag.all_pass() || !identity.pass) fail(kCheckFailed, "check_failed", "posterior diagnostics failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian quickest change detection and identification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qcd 1.0");

  PresetArgs preset_args;
  auto* preset_cmd = app.add_subcommand("preset", "Print a named instance as JSON");
  preset_cmd->add_option("name", preset_args.name, "Preset name");
  preset_cmd->add_flag("--list", preset_args.list, "List the available presets");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Value iteration on the simplex grid");
  solve_cmd->add_option("config", solve_args.config, "Instance JSON ('-' for stdin)");
  solve_cmd->add_option("--grid,-g", solve_args.grid, "Grid resolution G")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", solve_args.tol, "Sup-norm change that ends the iteration")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "Iteration cap");
  solve_cmd->add_option("--iterations", solve_args.iterations,
                        "Run exactly this many iterations (truncated problem)");
  solve_cmd->add_flag("--snapshots", solve_args.snapshots,
                      "Store the stopping regions of every truncated problem");
  solve_cmd->add_option("--threads", solve_args.threads)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--isa", solve_args.isa, "auto, scalar or avx2");
  solve_cmd->add_option("--out,-o", solve_args.out, "Policy file ('-' for stdout)");
  solve_cmd->add_option("--values-csv", solve_args.values_csv, "Also write the value function CSV");

  RegionsArgs regions_args;
  auto* regions_cmd = app.add_subcommand("regions", "Region report and figure data");
  regions_cmd->add_option("policy", regions_args.policy, "Policy file ('-' for stdin)");
  regions_cmd->add_option("--raster", regions_args.raster, "Raster CSV output");
  regions_cmd->add_option("--svg", regions_args.svg, "SVG output (M = 2)");
  regions_cmd->add_option("--values-csv", regions_args.values_csv, "Value function CSV output");
  regions_cmd->add_option("--path-seed", regions_args.path_seed,
                          "Overlay one optimal sample path drawn with this seed");

  SimulateArgs simulate_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Sample trajectories of a strategy");
  simulate_cmd->add_option("policy", simulate_args.policy, "Policy file ('-' for stdin)")->required();
  simulate_cmd->add_option("--strategy", simulate_args.strategy,
                           "optimal, stop0, threshold:<pi0>, fixed:<n>[:<d>], truncated:<N>");
  simulate_cmd->add_option("--episodes,-n", simulate_args.episodes);
  simulate_cmd->add_option("--seed", simulate_args.seed);
  simulate_cmd->add_option("--out,-o", simulate_args.out, "Trajectory CSV ('-' for stdout)");
  simulate_cmd->add_option("--outcomes", simulate_args.outcomes, "Per-episode outcome CSV");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Monte Carlo risk and dominance report");
  evaluate_cmd->add_option("policy", evaluate_args.policy, "Policy file ('-' for stdin)")->required();
  evaluate_cmd->add_option("--episodes,-n", evaluate_args.episodes);
  evaluate_cmd->add_option("--seed", evaluate_args.seed);
  evaluate_cmd->add_option("--threads", evaluate_args.threads)->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--alternatives", evaluate_args.alternatives,
                           "Strategies compared against the optimal one")
      ->delimiter(',');
  evaluate_cmd->add_option("--grid-delta", evaluate_args.grid_delta,
                           "Grid refinement delta |V_G - V_2G| added to the slack");
  evaluate_cmd->add_option("--csv", evaluate_args.csv, "Dominance CSV output");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Posterior process diagnostics");
  check_cmd->add_option("config", check_args.config, "Instance JSON ('-' for stdin)");
  check_cmd->add_option("--episodes,-n", check_args.episodes);
  check_cmd->add_option("--seed", check_args.seed);
  check_cmd->add_option("--stages", check_args.stages)->delimiter(',');
  check_cmd->add_option("--threads", check_args.threads)->check(CLI::PositiveNumber);
  check_cmd->add_option("--csv", check_args.csv, "Diagnostics CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report({kUsage, "usage", e.what()});
  }

  try {
    if (*preset_cmd) run_preset(preset_args);
    if (*solve_cmd) run_solve(solve_args);
    if (*regions_cmd) run_regions(regions_args);
    if (*simulate_cmd) run_simulate(simulate_args);
    if (*evaluate_cmd) run_evaluate(evaluate_args);
    if (*check_cmd) run_check(check_args);
  } catch (const Failure& f) {
    return report(f);
  } catch (const std::exception& e) {
    return report({kInternal, "internal", e.what()});
  }
  return kOk;
}
