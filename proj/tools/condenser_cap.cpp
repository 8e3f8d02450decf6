// condenser-cap: scenario-driven front end for the condenser capacity solver.
//
// Exit codes: 0 converged / all criteria pass, 1 invalid input,
//             2 not converged / a criterion failed, 3 internal error.
#include <condcap/acceptance.hpp>
#include <condcap/capacity.hpp>
#include <condcap/errors.hpp>
#include <condcap/report_io.hpp>
#include <condcap/scenario.hpp>

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace condcap;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInternal = 3;

struct RunOptions {
  std::string scenario;
  std::string out_dir = ".";
  bool deterministic = false;
  int jobs = 1;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", o.out_dir, "Directory for reports and tables")->capture_default_str();
  cmd->add_flag("--deterministic", o.deterministic, "Single thread and no timestamps: byte-identical reports");
  cmd->add_option("--jobs", o.jobs, "Worker threads for assembly and matrix-vector products")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("condenser-cap");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CONDENSER_CAP_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("CONDENSER_CAP_LOG={} not recognised (error|warn|info|debug); keeping warn", env);
    else
      spdlog::set_level(level);
  }
}

int threads_for(const RunOptions& o) { return o.deterministic ? 1 : o.jobs; }

RunInfo run_info(const std::string& command, const Scenario& sc, const RunOptions& o) {
  RunInfo info;
  info.command = command;
  info.scenario_name = sc.name;
  info.epsilon_source = sc.auto_epsilon ? "auto" : "scenario";
  info.deterministic = o.deterministic;
  info.threads = threads_for(o);
  return info;
}

std::string out_path(const RunOptions& o, const std::string& name) {
  return (std::filesystem::path(o.out_dir) / name).string();
}

void write_if(const RunOptions& o, const std::string& name, const std::string& content) {
  if (name.empty()) return;
  const auto path = out_path(o, name);
  write_text_file(path, content);
  spdlog::info("wrote {}", path);
}

CapacityTolerances tolerances(const Scenario& sc) {
  CapacityTolerances t;
  t.kkt_tolerance = sc.verification.kkt_tolerance;
  t.primal_tests = sc.verification.primal_tests;
  t.primal_seed = sc.verification.primal_seed;
  return t;
}

// Binds the kernel and validates; prints the report and returns false on failure.
bool prepare(DiscreteCondenser& c, const KernelSpec& spec, const Scenario& sc, ValidationReport* out = nullptr) {
  check_points(spec, c.global_points());
  bind_kernel(c, spec);
  auto report = validate(c, sc.verification.require_signed_assumptions);
  if (!report.ok()) {
    std::cerr << "error: condenser validation failed\n" << report.summary() << '\n';
    return false;
  }
  if (out) *out = std::move(report);
  return true;
}

int cmd_solve(const RunOptions& o) {
  const Scenario sc = load_scenario(o.scenario);
  if (sc.plates.empty()) throw InputError(o.scenario + ": the solve command needs \"plates\"");
  auto c = discretize(sc.plates, sc.weight, sc.seed,
                      sc.auto_epsilon ? std::nullopt : std::optional<KernelSpec>(sc.kernel));
  const KernelSpec spec = sc.auto_epsilon ? sc.kernel.with_epsilon(default_epsilon(c)) : sc.kernel;
  ValidationReport validation;
  if (!prepare(c, spec, sc, &validation)) return kExitInput;

  const auto K = assemble_matrix(spec, c.global_points());
  if (!K.pd_certificate().positive_definite)
    throw InputError("kernel matrix failed the positive-definiteness certificate at row " +
                     std::to_string(K.pd_certificate().failed_row) + "; try a larger epsilon");
  const auto result = solve_min_energy(c, K, sc.solver);
  const auto report = build_report(c, K, spec, result, tolerances(sc));

  const auto info = run_info("solve", sc, o);
  write_if(o, sc.outputs.report, capacity_report_json(c, spec, validation, result, report, info));
  write_if(o, sc.outputs.weights_csv, weights_csv(c, report.gamma));
  write_if(o, sc.outputs.residuals_csv, residuals_csv(c, report));
  write_if(o, sc.outputs.trace_csv, trace_csv(result));
  write_if(o, sc.outputs.measure_json, measure_json(c, report.gamma));

  std::printf("cap = %.17g\n", report.cap);
  for (std::size_t i = 0; i < report.constants.size(); ++i)
    std::printf("C[%d] = %.17g\n", c.plates[i].id, report.constants[i]);
  std::printf("relative gap = %.3e after %zu iterations (%s)\n", result.relative_gap, result.iterations_used,
              result.converged ? "converged" : "NOT converged");
  std::printf("frostman %s, duality %s\n", report.frostman.passed ? "pass" : "fail",
              report.duality.passed ? "pass" : "fail");
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_exhaust(const RunOptions& o) {
  const Scenario sc = load_scenario(o.scenario);
  if (sc.plates.empty()) throw InputError(o.scenario + ": the exhaust command needs \"plates\"");
  if (!sc.levels) throw InputError(o.scenario + ": the exhaust command needs a \"levels\" block");
  auto seq = exhaustion_sequence(sc.plates, sc.weight, *sc.levels, sc.seed);
  // One kernel for the whole sequence; the automatic epsilon follows the finest level.
  const KernelSpec spec = sc.auto_epsilon ? sc.kernel.with_epsilon(default_epsilon(seq.back())) : sc.kernel;
  for (auto& level : seq)
    if (!prepare(level, spec, sc)) return kExitInput;

  const auto study = exhaustion_study(seq, spec, sc.solver);
  const auto info = run_info("exhaust", sc, o);
  write_if(o, sc.outputs.exhaustion_csv, exhaustion_csv(study));
  write_if(o, sc.outputs.report, exhaustion_summary_json(study, spec, info));
  std::fputs(exhaustion_csv(study).c_str(), stdout);
  std::printf("cap nondecreasing: %s, distance decreasing: %s\n", study.cap_nondecreasing ? "yes" : "no",
              study.distance_decreasing ? "yes" : "no");
  return study.all_converged ? kExitOk : kExitNotConverged;
}

int cmd_family(const RunOptions& o) {
  const Scenario sc = load_scenario(o.scenario);
  if (!sc.family) throw InputError(o.scenario + ": the family command needs a \"family\" block");
  const auto& f = *sc.family;
  const auto generator = f.generator();
  auto largest = truncate_family(generator, f.n_list.back(), sc.weight, sc.seed);
  const KernelSpec check_spec = sc.auto_epsilon ? sc.kernel.with_epsilon(default_epsilon(largest)) : sc.kernel;
  if (!prepare(largest, check_spec, sc)) return kExitInput;

  const auto study =
      family_positivity_study(generator, sc.weight, f.n_list, sc.kernel, sc.auto_epsilon, sc.solver, sc.seed);
  const auto info = run_info("family", sc, o);
  write_if(o, sc.outputs.family_csv, family_csv(study));
  write_if(o, sc.outputs.report, family_summary_json(study, check_spec, info));
  std::fputs(family_csv(study).c_str(), stdout);
  std::printf("trend: %s (last relative change %.3e)\n", study.trend.c_str(), study.last_relative_change);
  for (const auto& [id, C] : study.large_capacity_constants)
    std::printf("plate %d has effectively infinite capacity; C = %.6g (expected <= 0)\n", id, C);
  bool converged = true;
  for (const auto& r : study.rows) converged = converged && r.converged;
  return converged ? kExitOk : kExitNotConverged;
}

struct BenchmarkOptions {
  bool list = false;
  double gap = AcceptanceOptions{}.gap_tolerance;
  std::size_t max_iterations = AcceptanceOptions{}.max_iterations;
  std::vector<int> criteria;
  int jobs = 1;
};

int cmd_benchmark(const BenchmarkOptions& b) {
  if (b.list) {
    for (const auto& c : acceptance_criteria()) std::printf("%d  %-20s %s\n", c.id, c.title.c_str(), c.target.c_str());
    return kExitOk;
  }
  AcceptanceSuite suite({b.gap, b.max_iterations});
  std::vector<int> ids = b.criteria;
  if (ids.empty())
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);
  int failed = 0;
  for (int id : ids) {
    const auto outcome = suite.run(id);
    std::printf("%s\n", format_outcome(outcome).c_str());
    std::fflush(stdout);
    if (!outcome.passed) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed == 0 ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Capacities, capacitary constants and distributions of discretized condensers"};
  app.require_subcommand(1);

  RunOptions solve_opts, exhaust_opts, family_opts;
  auto* solve = app.add_subcommand("solve", "Solve the minimum-energy problem and write a capacity report");
  add_run_options(solve, solve_opts);
  auto* exhaust = app.add_subcommand("exhaust", "Capacity along a nested exhaustion sequence");
  add_run_options(exhaust, exhaust_opts);
  auto* family = app.add_subcommand("family", "Capacity trend of truncations of a countable plate family");
  add_run_options(family, family_opts);

  BenchmarkOptions bench_opts;
  auto* bench = app.add_subcommand("benchmark", "Run the built-in analytic acceptance suite");
  bench->add_flag("--list", bench_opts.list, "List the criteria without running them");
  bench->add_option("--gap", bench_opts.gap, "Relative duality-gap tolerance for the suite's solves")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--max-iterations", bench_opts.max_iterations, "Iteration cap for the suite's solves")
      ->capture_default_str();
  bench->add_option("--criterion", bench_opts.criteria, "Run only these criteria (repeatable)")
      ->check(CLI::Range(1, 9));
  bench->add_option("--jobs", bench_opts.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) {
      omp_set_num_threads(threads_for(solve_opts));
      return cmd_solve(solve_opts);
    }
    if (*exhaust) {
      omp_set_num_threads(threads_for(exhaust_opts));
      return cmd_exhaust(exhaust_opts);
    }
    if (*family) {
      omp_set_num_threads(threads_for(family_opts));
      return cmd_family(family_opts);
    }
    omp_set_num_threads(bench_opts.jobs);
    return cmd_benchmark(bench_opts);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "internal numerical error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
