#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "splitsys/harness.hpp"
#include "splitsys/io.hpp"
#include "splitsys/operators.hpp"
#include "splitsys/solver.hpp"
#include "splitsys/verify.hpp"

namespace {

using namespace splitsys;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMaxIterations = 3;
constexpr int kExitLinesearchFailure = 4;
constexpr int kExitIo = 5;

int status_exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved:
      return kExitOk;
    case SolveStatus::max_iterations:
      return kExitMaxIterations;
    case SolveStatus::linesearch_failure:
      return kExitLinesearchFailure;
  }
  return kExitCheckFailed;
}

struct SeedFlag {
  std::uint64_t value = 0;
  bool given = false;
};

// SPLITSYS_SEED beats the flag; the flag beats the instance's own seed.
std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SPLITSYS_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0')
    throw ConfigError(std::string("SPLITSYS_SEED is not an unsigned integer: ") + raw);
  return static_cast<std::uint64_t>(v);
}

std::uint64_t resolve_seed(const SeedFlag& flag, std::uint64_t fallback) {
  if (auto env = env_seed()) return *env;
  if (flag.given) return flag.value;
  return fallback;
}

struct ParamFlags {
  AlgoParams params;
  double beta_const = 0.0;
  int sweep_period = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta-lo", params.beta_lo, "lower step bound");
    cmd->add_option("--beta-hi", params.beta_hi, "upper step bound");
    cmd->add_option("--beta", beta_const, "constant step inside [beta-lo, beta-hi]");
    cmd->add_option("--beta-sweep", sweep_period,
                    "cycle the step geometrically between the bounds with this period");
    cmd->add_option("--theta", params.theta, "backtracking ratio in (0,1)");
    cmd->add_option("--delta", params.delta, "linesearch acceptance factor in (0,1)");
    cmd->add_option("--radius", params.radius, "selection bound R (0 = take the instance's)");
    cmd->add_option("--tol", params.tol_outer, "outer residual tolerance");
    cmd->add_option("--tol-inner", params.tol_component, "per-component solve tolerance");
    cmd->add_option("--max-outer", params.max_outer, "outer iteration cap");
    cmd->add_option("--max-ls", params.max_linesearch, "backtracking step cap");
  }

  AlgoParams resolve() const {
    AlgoParams p = params;
    if (beta_const > 0.0) {
      p.beta_schedule.rule = BetaSchedule::Rule::constant;
      p.beta_schedule.value = beta_const;
    } else if (sweep_period > 0) {
      p.beta_schedule.rule = BetaSchedule::Rule::geometric_sweep;
      p.beta_schedule.period = sweep_period;
    }
    p.validate();
    return p;
  }
};

struct InstanceFlags {
  std::string path;
  Index n = 0;
  Index m = 1;
  std::string structure = "affine_vi";
  SeedFlag seed;
  bool allow_unchecked = false;

  void attach(CLI::App* cmd, bool with_unchecked) {
    auto* inst = cmd->add_option("--instance", path, "instance JSON file");
    auto* dim = cmd->add_option("--n", n, "dimension for a generated instance");
    cmd->add_option("--m", m, "component count for a generated instance");
    cmd->add_option("--structure", structure, "generated structure: affine_vi | mixed_l1");
    auto* seed_opt = cmd->add_option("--seed", seed.value, "seed (generator and start point)");
    seed_opt->each([this](const std::string&) { seed.given = true; });
    inst->excludes(dim);
    if (with_unchecked)
      cmd->add_flag("--allow-unchecked", allow_unchecked,
                    "load operators without construction-time validation");
  }

  ProblemInstance build() const {
    if (!path.empty()) return load_instance(path, allow_unchecked);
    if (n >= 1) {
      GeneratorConfig cfg;
      cfg.n = n;
      cfg.m = m;
      cfg.seed = resolve_seed(seed, 1);
      cfg.structure = structure_from_string(structure);
      return generate_planted_system(cfg);
    }
    throw ConfigError("give either --instance or the generator flags (--n, --m, --structure)");
  }
};

int run_generate(Index n, Index m, const std::string& structure, const SeedFlag& seed,
                 std::string out) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.seed = resolve_seed(seed, 1);
  cfg.structure = structure_from_string(structure);
  const ProblemInstance inst = generate_planted_system(cfg);
  if (out.empty()) out = inst.name + ".json";
  save_instance(inst, out);
  const double planted = residual(inst, 0.55, *inst.known_solution);
  std::cout << "wrote " << out << "\n";
  std::cout << "planted residual: " << format_double(planted) << "\n";
  return kExitOk;
}

int run_solve(const InstanceFlags& source, const ParamFlags& param_flags,
              const std::vector<double>& x0_values, const std::string& out_dir, bool verify) {
  const AlgoParams params = param_flags.resolve();
  const ProblemInstance inst = source.build();

  Vector x0;
  if (!x0_values.empty()) {
    x0 = Vector(static_cast<Index>(x0_values.size()));
    for (std::size_t j = 0; j < x0_values.size(); ++j) x0[static_cast<Index>(j)] = x0_values[j];
    require_dim(x0, inst.n, "--x0");
  } else {
    x0 = default_start(inst, resolve_seed(source.seed, inst.seed));
  }

  SolveResult result = solve(inst, params, x0, {.verify = verify});
  if (result.trace.x0_projected) std::cerr << "note: x0 was projected onto X\n";

  const Metrics metrics = evaluate_run(result.trace, inst);
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  const auto trace_path = dir / "trace.csv";
  const auto metrics_path = dir / "metrics.json";
  save_trace_csv(result.trace, trace_path);
  save_metrics(metrics, inst.name, params, metrics_path);

  std::cout << "status: " << to_string(result.status) << "\n";
  std::cout << "stop_reason: " << to_string(result.trace.stop_reason) << "\n";
  std::cout << "iterations: " << metrics.iterations << "\n";
  std::cout << "final_residual: " << format_double(metrics.final_residual) << "\n";
  std::cout << "trace: " << trace_path.string() << "\n";
  std::cout << "metrics: " << metrics_path.string() << "\n";
  if (result.status == SolveStatus::linesearch_failure)
    std::cerr << "linesearch failure: " << result.trace.failure_detail << "\n";
  return status_exit_code(result.status);
}

int run_verify(const InstanceFlags& source, long samples, const SeedFlag& seed) {
  const ProblemInstance inst = source.build();
  VerifyConfig config;
  config.pairs = samples;
  config.seed = resolve_seed(seed, 20240901ull);
  const CheckReport report = verify_instance(inst, config);
  for (const CheckResult& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " samples=" << c.samples
              << " failures=" << c.failures;
    if (!c.passed) std::cout << " worst=" << format_double(c.worst) << " witness=" << c.witness;
    std::cout << "\n";
  }
  const auto* failure = report.first_failure();
  if (failure) {
    std::cout << "verification failed at " << failure->name << "\n";
    return kExitCheckFailed;
  }
  std::cout << "all checks passed\n";
  return kExitOk;
}

struct BenchRow {
  std::string instance;
  std::string solver;
  std::string params_hash;
  std::string status;
  long iterations = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double time_ms = 0.0;
};

int run_bench(const std::vector<std::uint64_t>& seeds, const ParamFlags& param_flags,
              const std::string& out, int jobs, bool with_baseline, double baseline_step) {
  if (seeds.empty()) throw ConfigError("bench: the suite is empty");
  const AlgoParams params = param_flags.resolve();
  const std::string hash = params_fingerprint(params);

  std::vector<GeneratorConfig> cells;
  for (const GeneratorConfig& cfg : acceptance_suite())
    for (std::uint64_t s : seeds)
      if (cfg.seed == s) cells.push_back(cfg);
  if (cells.empty()) throw ConfigError("bench: no suite cells match the requested seeds");

  std::vector<std::vector<BenchRow>> results(cells.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (std::size_t i = cursor.fetch_add(1); i < cells.size(); i = cursor.fetch_add(1)) {
      const GeneratorConfig& cfg = cells[i];
      std::vector<BenchRow>& rows = results[i];
      BenchRow row;
      row.solver = "hybrid";
      row.params_hash = hash;
      try {
        const ProblemInstance inst = generate_planted_system(cfg);
        row.instance = inst.name;
        try {
          oracle_solve(inst);
        } catch (const OracleError&) {
          row.status = "excluded";
          rows.push_back(row);
          continue;
        }
        const Vector x0 = default_start(inst, cfg.seed);
        const SolveResult res = solve(inst, params, x0);
        const Metrics metrics = evaluate_run(res.trace, inst);
        row.status = to_string(res.status);
        row.iterations = metrics.iterations;
        row.residual = metrics.final_residual;
        row.time_ms = metrics.wall_time_ms;
        rows.push_back(row);
        if (with_baseline && inst.m() == 1) {
          BenchRow base = row;
          base.solver = "baseline_fb";
          const SolveResult b =
              solve_baseline_fb(inst, baseline_step, x0, params.max_outer, params.tol_outer);
          const Metrics bm = evaluate_run(b.trace, inst);
          base.status = to_string(b.status);
          base.iterations = bm.iterations;
          base.residual = bm.final_residual;
          base.time_ms = bm.wall_time_ms;
          rows.push_back(base);
        }
      } catch (const std::exception& e) {
        if (row.instance.empty()) row.instance = "seed_" + std::to_string(cfg.seed);
        row.status = "error";
        rows.push_back(row);
        std::cerr << row.instance << ": " << e.what() << "\n";
      }
    }
  };

  const int workers = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<BenchRow> rows;
  for (auto& cell_rows : results)
    for (auto& r : cell_rows) rows.push_back(std::move(r));
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.instance != b.instance) return a.instance < b.instance;
    return a.solver < b.solver;
  });

  std::ostringstream csv;
  csv << "instance,solver,params_hash,status,iterations,residual,time_ms\n";
  long solved = 0;
  for (const BenchRow& r : rows) {
    csv << r.instance << ',' << r.solver << ',' << r.params_hash << ',' << r.status << ','
        << r.iterations << ',' << format_double(r.residual) << ',' << format_double(r.time_ms)
        << '\n';
    if (r.status == "solved") ++solved;
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    const std::filesystem::path path = out;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file << csv.str();
    if (!file) throw IoError("write failed for " + path.string());
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << " (" << solved
              << " solved)\n";
  }
  return solved > 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitting solver for systems of monotone inclusions"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a random planted instance as JSON");
  Index gen_n = 2, gen_m = 1;
  std::string gen_structure = "affine_vi";
  SeedFlag gen_seed;
  std::string gen_out;
  gen->add_option("--n", gen_n, "dimension")->required();
  gen->add_option("--m", gen_m, "component count");
  gen->add_option("--structure", gen_structure, "affine_vi | mixed_l1");
  gen->add_option("--seed", gen_seed.value, "generator seed")
      ->each([&gen_seed](const std::string&) { gen_seed.given = true; });
  gen->add_option("--out", gen_out, "output path (default <name>.json)");

  auto* slv = app.add_subcommand("solve", "run the solver and write trace plus metrics");
  InstanceFlags slv_source;
  ParamFlags slv_params;
  std::vector<double> slv_x0;
  std::string slv_out;
  bool slv_verify = false;
  slv_source.attach(slv, true);
  slv_params.attach(slv);
  slv->add_option("--x0", slv_x0, "start point, comma separated")->delimiter(',');
  slv->add_option("--out", slv_out, "output directory (default .)");
  slv->add_flag("--verify", slv_verify, "assert the per-iteration guarantees, fail fast");

  auto* ver = app.add_subcommand("verify", "run the sampled property checks on an instance");
  InstanceFlags ver_source;
  long ver_samples = 1000;
  ver_source.attach(ver, true);
  ver->add_option("--samples", ver_samples, "sample pairs per check");

  auto* ben = app.add_subcommand("bench", "run the fixed suite and emit a metrics table");
  ParamFlags ben_params;
  std::vector<std::uint64_t> ben_seeds;
  std::string ben_out;
  int ben_jobs = 1;
  bool ben_baseline = false;
  double ben_baseline_step = 0.5;
  ben_params.attach(ben);
  ben->add_option("--seeds", ben_seeds, "subset of suite seeds (default all 20)")->delimiter(',');
  ben->add_option("--out", ben_out, "CSV path (default stdout)");
  ben->add_option("--jobs", ben_jobs, "parallel workers");
  ben->add_flag("--with-baseline", ben_baseline,
                "also run the fixed-step forward-backward method on single-component cells");
  ben->add_option("--baseline-step", ben_baseline_step, "step for the baseline rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return run_generate(gen_n, gen_m, gen_structure, gen_seed, gen_out);
    if (*slv) return run_solve(slv_source, slv_params, slv_x0, slv_out, slv_verify);
    if (*ver) return run_verify(ver_source, ver_samples, ver_source.seed);
    if (*ben) {
      std::vector<std::uint64_t> seeds = ben_seeds;
      if (seeds.empty() && !ben->count("--seeds"))
        for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
      return run_bench(seeds, ben_params, ben_out, ben_jobs, ben_baseline, ben_baseline_step);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const VerifyError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const LinesearchError& e) {
    std::cerr << "linesearch failure: " << e.what() << "\n";
    return kExitLinesearchFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
