// riskalloc command-line front end. Talks to the library only through the C
// API in riskalloc.h.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskalloc/riskalloc.h"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) {
  throw CliError{kExitUsage, msg};
}

[[noreturn]] void runtime_error(const std::string& msg) {
  throw CliError{kExitRuntime, msg};
}

// Parse errors and bad arguments are the caller's fault; everything else is a
// runtime failure.
void check(ra_status status, const std::string& context) {
  if (status == RA_OK) return;
  const std::string msg = context + ": " + ra_last_error();
  if (status == RA_ERR_PARSE || status == RA_ERR_INVALID_ARGUMENT ||
      status == RA_ERR_DIMENSION) {
    usage_error(msg);
  }
  runtime_error(msg);
}

struct ProblemDeleter {
  void operator()(ra_problem* p) const { ra_problem_free(p); }
};
struct SolutionDeleter {
  void operator()(ra_solution* s) const { ra_solution_free(s); }
};
struct BenchDeleter {
  void operator()(ra_benchmark* b) const { ra_benchmark_free(b); }
};
struct StringDeleter {
  void operator()(char* s) const { ra_string_free(s); }
};

using ProblemPtr = std::unique_ptr<ra_problem, ProblemDeleter>;
using SolutionPtr = std::unique_ptr<ra_solution, SolutionDeleter>;
using BenchPtr = std::unique_ptr<ra_benchmark, BenchDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

std::string take(char* s) { return std::string(CString(s).get()); }

struct Dims {
  size_t species = 0;
  size_t traits = 0;
  size_t tasks = 0;
};

ProblemPtr load_problem(const std::string& path, Dims& dims) {
  ra_problem* raw = nullptr;
  check(ra_problem_load(path.c_str(), &raw), "loading problem");
  ProblemPtr p(raw);
  check(ra_problem_dims(p.get(), &dims.species, &dims.traits, &dims.tasks),
        "reading problem");
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) runtime_error("failed writing '" + path + "'");
}

std::string format_prob(double p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << p;
  return os.str();
}

double round12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

void print_allocation(const std::vector<int64_t>& x, const Dims& d) {
  std::cout << "allocation (tasks x species):\n";
  for (size_t m = 0; m < d.tasks; ++m) {
    std::cout << "  task " << (m + 1) << ":";
    for (size_t s = 0; s < d.species; ++s) {
      std::cout << ' ' << std::setw(4) << x[m * d.species + s];
    }
    std::cout << '\n';
  }
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string problem;
  std::string method = "adaptive";
  uint64_t seed = 0;
  int starts = 16;
  double lambda = 0.1;
  std::string out;
  bool timing = false;
};

int cmd_solve(const SolveArgs& a) {
  Dims d;
  auto problem = load_problem(a.problem, d);
  ra_method method;
  check(ra_method_parse(a.method.c_str(), &method), "--method");

  ra_solver_config cfg;
  ra_solver_config_default(&cfg);
  cfg.seed = a.seed;
  cfg.num_starts = a.starts;
  cfg.lambda = a.lambda;

  ra_solution* raw = nullptr;
  check(ra_solve(problem.get(), method, &cfg, &raw), "solving");
  SolutionPtr sol(raw);

  std::vector<int64_t> x(d.tasks * d.species);
  check(ra_solution_allocation(sol.get(), x.data(), x.size()), "solution");
  std::vector<double> lp(d.tasks);
  check(ra_solution_task_log_probs(sol.get(), lp.data(), lp.size()),
        "solution");

  char* json = nullptr;
  check(ra_solution_to_json(sol.get(), a.timing ? 1 : 0, &json), "solution");
  const std::string doc = take(json);
  if (!a.out.empty()) write_file(a.out, doc);

  std::cout << "method: " << a.method << "\n";
  print_allocation(x, d);
  for (size_t m = 0; m < d.tasks; ++m) {
    std::cout << "  P(task " << (m + 1) << " succeeds) = "
              << format_prob(std::exp(lp[m])) << '\n';
  }
  std::cout << "min task probability: "
            << format_prob(std::exp(ra_solution_min_log_prob(sol.get())))
            << "\nsolve time: " << std::setprecision(3)
            << ra_solution_seconds(sol.get()) << " s\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string problem;
  std::string allocation;
  std::string pick;
  uint64_t trials = 10000;
  uint64_t seed = 0;
  bool clamp = false;
  bool per_robot = false;
  std::string out;
};

// "6,1;0,8" -> rows separated by ';', entries by ','.
std::vector<int64_t> parse_inline(const std::string& text, const Dims& d) {
  std::vector<int64_t> out;
  std::stringstream rows(text);
  std::string row;
  size_t nrows = 0;
  while (std::getline(rows, row, ';')) {
    ++nrows;
    std::stringstream cells(row);
    std::string cell;
    size_t ncols = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        size_t used = 0;
        const long long v = std::stoll(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
        out.push_back(v);
      } catch (const std::exception&) {
        usage_error("--allocation: '" + cell + "' is not an integer");
      }
      ++ncols;
    }
    if (ncols != d.species) {
      usage_error("--allocation: row " + std::to_string(nrows) + " has " +
                  std::to_string(ncols) + " entries, expected " +
                  std::to_string(d.species));
    }
  }
  if (nrows != d.tasks) {
    usage_error("--allocation: expected " + std::to_string(d.tasks) +
                " rows, got " + std::to_string(nrows));
  }
  return out;
}

std::vector<int64_t> matrix_from_json(const Json& m, const Dims& d,
                                      const std::string& where) {
  if (!m.is_array() || m.size() != d.tasks) {
    usage_error(where + ": expected " + std::to_string(d.tasks) + " rows");
  }
  std::vector<int64_t> out;
  for (size_t r = 0; r < m.size(); ++r) {
    if (!m[r].is_array() || m[r].size() != d.species) {
      usage_error(where + "[" + std::to_string(r) + "]: expected " +
                  std::to_string(d.species) + " integers");
    }
    for (const auto& v : m[r]) {
      if (!v.is_number_integer()) usage_error(where + ": non-integer entry");
      out.push_back(v.get<int64_t>());
    }
  }
  return out;
}

// Accepts a result file ("allocation"), a preset reference file
// ("allocations" + --pick), or an inline matrix.
std::vector<int64_t> load_allocation(const EvalArgs& a, const Dims& d) {
  if (!fs::exists(a.allocation)) return parse_inline(a.allocation, d);
  std::ifstream in(a.allocation);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    usage_error(a.allocation + ": malformed JSON: " + e.what());
  }
  if (doc.contains("allocation")) {
    return matrix_from_json(doc["allocation"], d, a.allocation + ": allocation");
  }
  if (doc.contains("allocations")) {
    const Json& all = doc["allocations"];
    std::string names;
    for (auto it = all.begin(); it != all.end(); ++it) {
      names += (names.empty() ? "" : ", ") + it.key();
    }
    if (a.pick.empty() || !all.contains(a.pick)) {
      usage_error(a.allocation + ": choose one allocation with --pick (" +
                  names + ")");
    }
    return matrix_from_json(all[a.pick], d,
                            a.allocation + ": allocations." + a.pick);
  }
  usage_error(a.allocation + ": no \"allocation\" or \"allocations\" key");
}

int cmd_eval(const EvalArgs& a) {
  if (a.trials == 0) usage_error("--trials must be positive");
  Dims d;
  auto problem = load_problem(a.problem, d);
  const auto x = load_allocation(a, d);

  int feasible = 0;
  int64_t bad = -1;
  std::vector<int64_t> slack(d.species);
  check(ra_validate_allocation(problem.get(), x.data(), x.size(), &feasible,
                               slack.data(), &bad),
        "validating allocation");
  if (!feasible) {
    runtime_error("allocation is infeasible: species " +
                  std::to_string(bad + 1) + " column exceeds its count by " +
                  std::to_string(-slack[static_cast<size_t>(bad)]) +
                  " (or holds a negative entry)");
  }

  std::vector<double> xr(x.begin(), x.end());
  std::vector<double> lp(d.tasks);
  check(ra_success_log_probs(problem.get(), xr.data(), xr.size(), lp.data(),
                             lp.size()),
        "closed-form probabilities");
  std::vector<double> rates(d.tasks);
  double combined = 0.0;
  check(ra_evaluate_mc(problem.get(), x.data(), x.size(), a.trials, a.seed,
                       a.clamp ? 1 : 0, a.per_robot ? 1 : 0, rates.data(), rates.size(), &combined),
        "Monte Carlo evaluation");

  double product = 1.0;
  Json probs = Json::array(), mc = Json::array(), gaps = Json::array();
  for (size_t m = 0; m < d.tasks; ++m) {
    const double p = std::exp(lp[m]);
    product *= p;
    probs.push_back(round12(p));
    mc.push_back(round12(rates[m]));
    gaps.push_back(round12(rates[m] - p));
  }

  Json allocation = Json::array();
  for (size_t m = 0; m < d.tasks; ++m) {
    allocation.push_back(std::vector<int64_t>(
        x.begin() + static_cast<std::ptrdiff_t>(m * d.species),
        x.begin() + static_cast<std::ptrdiff_t>((m + 1) * d.species)));
  }
  Json report = Json::object();
  report["allocation"] = allocation;
  report["trials"] = a.trials;
  report["seed"] = a.seed;
  report["sampling"] = a.clamp ? "clamp_nonnegative" : "raw";
  report["coupling"] = a.per_robot ? "robot" : "coalition";
  report["task_probs"] = probs;
  report["combined_prob"] = round12(product);
  report["mc_task_rates"] = mc;
  report["mc_combined_rate"] = round12(combined);
  report["task_gaps"] = gaps;
  report["combined_gap"] = round12(combined - product);
  if (!a.out.empty()) write_file(a.out, report.dump(2) + "\n");

  print_allocation(x, d);
  std::cout << "task   closed-form   monte-carlo   gap\n";
  for (size_t m = 0; m < d.tasks; ++m) {
    const double p = std::exp(lp[m]);
    std::cout << std::setw(4) << (m + 1) << "   " << std::setw(11)
              << format_prob(p) << "   " << std::setw(11)
              << format_prob(rates[m]) << "   " << std::showpos
              << format_prob(rates[m] - p) << std::noshowpos << '\n';
  }
  std::cout << "both   " << std::setw(11) << format_prob(product) << "   "
            << std::setw(11) << format_prob(combined) << "   " << std::showpos
            << format_prob(combined - product) << std::noshowpos << '\n'
            << "(" << a.trials << " trials, seed " << a.seed << ")\n";
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  size_t instances = 100;
  std::vector<std::string> methods{"adaptive", "neutral", "averse", "random"};
  uint64_t seed = 0;
  std::string out_dir = ".";
  bool timing = false;
  unsigned threads = 0;
  int starts = 16;
  double lambda = 0.1;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<ra_method> methods;
  for (const auto& name : a.methods) {
    ra_method m;
    check(ra_method_parse(name.c_str(), &m), "--methods");
    methods.push_back(m);
  }
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec || !fs::is_directory(a.out_dir)) {
    runtime_error("cannot create output directory '" + a.out_dir + "'");
  }
  const std::string csv_path = (fs::path(a.out_dir) / "records.csv").string();
  const std::string summary_path =
      (fs::path(a.out_dir) / "summary.txt").string();
  {
    // Fail before spending minutes solving.
    std::ofstream probe(csv_path, std::ios::app);
    if (!probe) runtime_error("output directory '" + a.out_dir + "' is not writable");
  }

  ra_generator_config gen;
  ra_generator_config_default(&gen);
  gen.seed = a.seed;
  ra_solver_config cfg;
  ra_solver_config_default(&cfg);
  cfg.seed = a.seed;
  cfg.num_starts = a.starts;
  cfg.lambda = a.lambda;

  ra_benchmark* raw = nullptr;
  check(ra_benchmark_run(&gen, methods.data(), methods.size(), &cfg,
                         a.instances, a.threads, &raw),
        "benchmark");
  BenchPtr bench(raw);

  char* csv = nullptr;
  check(ra_benchmark_to_csv(bench.get(), a.timing ? 1 : 0, &csv), "csv");
  char* summary = nullptr;
  check(ra_benchmark_summary(bench.get(), &summary), "summary");
  const std::string table = take(summary);
  write_file(csv_path, take(csv));
  write_file(summary_path, table);

  std::cout << table << "wrote " << ra_benchmark_size(bench.get())
            << " records to " << csv_path << '\n';
  return kExitOk;
}

// --- preset ----------------------------------------------------------------

struct PresetArgs {
  std::string name = "robotarium";
  std::string out;
  std::string refs_out;
};

int cmd_preset(const PresetArgs& a) {
  ra_problem* raw = nullptr;
  char* refs = nullptr;
  check(ra_preset(a.name.c_str(), &raw, &refs), "--name");
  ProblemPtr problem(raw);
  const std::string refs_json = take(refs);
  char* text = nullptr;
  check(ra_problem_to_json(problem.get(), &text), "serializing preset");
  const std::string problem_json = take(text);

  const std::string out = a.out.empty() ? a.name + ".json" : a.out;
  std::string refs_out = a.refs_out;
  if (refs_out.empty()) {
    fs::path p(out);
    refs_out = (p.parent_path() / (p.stem().string() + ".refs.json")).string();
  }
  write_file(out, problem_json);
  write_file(refs_out, refs_json);
  std::cout << "wrote problem to " << out << "\nwrote reference allocations to "
            << refs_out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-adaptive multi-robot coalition formation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ra_version()));

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Compute an allocation");
  solve->add_option("problem", solve_args.problem, "Problem JSON file")
      ->required();
  solve->add_option("--method", solve_args.method,
                    "adaptive | neutral | averse | random")
      ->capture_default_str();
  solve->add_option("--seed", solve_args.seed, "Random seed")
      ->capture_default_str();
  solve->add_option("--starts", solve_args.starts, "Multi-start count")
      ->capture_default_str();
  solve->add_option("--lambda", solve_args.lambda,
                    "Variance weight of the risk-averse baseline")
      ->capture_default_str();
  solve->add_option("--out", solve_args.out, "Result JSON path");
  solve->add_flag("--timing", solve_args.timing,
                  "Record wall-clock time in the result file");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "Closed-form and Monte Carlo success rates of an allocation");
  eval->add_option("problem", eval_args.problem, "Problem JSON file")
      ->required();
  eval->add_option("--allocation", eval_args.allocation,
                   "Result/reference JSON file, or inline rows like \"6,1;0,8\"")
      ->required();
  eval->add_option("--pick", eval_args.pick,
                   "Name of the allocation inside a reference file");
  eval->add_option("--trials", eval_args.trials, "Monte Carlo trials")
      ->capture_default_str();
  eval->add_option("--seed", eval_args.seed, "Random seed")
      ->capture_default_str();
  eval->add_flag("--clamp-nonnegative", eval_args.clamp,
                 "Clip negative sampled traits to zero");
  eval->add_flag("--per-robot", eval_args.per_robot,
                 "Draw every robot independently instead of one draw per "
                 "species per task");
  eval->add_option("--out", eval_args.out, "Report JSON path");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run the random-instance benchmark");
  bench->add_option("--instances", bench_args.instances, "Number of instances")
      ->capture_default_str();
  bench->add_option("--methods", bench_args.methods, "Methods to compare")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "Random seed")
      ->capture_default_str();
  bench->add_option("--out-dir", bench_args.out_dir, "Output directory")
      ->capture_default_str();
  bench->add_option("--threads", bench_args.threads,
                    "Worker threads (0 = all cores)");
  bench->add_option("--starts", bench_args.starts, "Multi-start count")
      ->capture_default_str();
  bench->add_option("--lambda", bench_args.lambda,
                    "Variance weight of the risk-averse baseline")
      ->capture_default_str();
  bench->add_flag("--timing", bench_args.timing,
                  "Record wall-clock solve times in the CSV");

  PresetArgs preset_args;
  auto* preset = app.add_subcommand("preset", "Write a built-in scenario");
  preset->add_option("--name", preset_args.name, "Preset name")
      ->capture_default_str();
  preset->add_option("--out", preset_args.out,
                     "Problem JSON path (default <name>.json)");
  preset->add_option("--refs-out", preset_args.refs_out,
                     "Reference allocations path (default <out>.refs.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (preset->parsed()) return cmd_preset(preset_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  }
  return kExitUsage;
}
