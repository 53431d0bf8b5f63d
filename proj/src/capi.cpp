#include "riskalloc/riskalloc.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "riskalloc/experiments.hpp"
#include "riskalloc/gauss.hpp"
#include "riskalloc/montecarlo.hpp"
#include "riskalloc/serialize.hpp"
#include "riskalloc/solver.hpp"

struct ra_problem {
  riskalloc::ProblemInstance value;
};

struct ra_solution {
  riskalloc::Solution value;
  riskalloc::SolverConfig config;
};

struct ra_benchmark {
  std::vector<riskalloc::BenchmarkRecord> records;
};

namespace {

using namespace riskalloc;

thread_local std::string g_last_error;

ra_status fail(ra_status status, std::string msg) {
  g_last_error = std::move(msg);
  return status;
}

ra_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return RA_ERR_INVALID_ARGUMENT;
    case ErrorKind::DimensionMismatch:
      return RA_ERR_DIMENSION;
    case ErrorKind::Infeasible:
      return RA_ERR_INFEASIBLE;
    case ErrorKind::Parse:
      return RA_ERR_PARSE;
    case ErrorKind::Io:
      return RA_ERR_IO;
  }
  return RA_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
ra_status guarded(F&& body) {
  try {
    body();
    return RA_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RA_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

IntMatrix int_matrix(const ProblemInstance& p, const int64_t* x, size_t len) {
  require(x != nullptr, "allocation pointer is null");
  const size_t want = p.num_tasks() * p.num_species();
  if (len != want) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation has " + std::to_string(len) + " entries, expected " +
                    std::to_string(want));
  }
  IntMatrix m(p.num_tasks(), p.num_species());
  std::copy(x, x + len, m.data().begin());
  return m;
}

SolverConfig to_cpp(const ra_solver_config* c) {
  SolverConfig cfg;
  if (c == nullptr) return cfg;
  cfg.num_starts = c->num_starts;
  cfg.max_iters_per_start = c->max_iters_per_start;
  cfg.step_init = c->step_init;
  cfg.armijo_c = c->armijo_c;
  cfg.step_shrink = c->step_shrink;
  cfg.convergence_tol = c->convergence_tol;
  if (c->beta_schedule != nullptr) {
    cfg.beta_schedule.assign(c->beta_schedule,
                             c->beta_schedule + c->beta_schedule_len);
  }
  cfg.lambda = c->lambda;
  cfg.hill_climb_max_moves = c->hill_climb_max_moves;
  cfg.seed = c->seed;
  cfg.validate();
  return cfg;
}

GeneratorConfig to_cpp(const ra_generator_config* c) {
  GeneratorConfig cfg;
  if (c == nullptr) return cfg;
  cfg.num_species = c->num_species;
  cfg.num_traits = c->num_traits;
  cfg.num_tasks = c->num_tasks;
  auto pair = [](const double* r) { return std::array<double, 2>{r[0], r[1]}; };
  cfg.dominant_mu_range = pair(c->dominant_mu_range);
  cfg.nondominant_mu_range = pair(c->nondominant_mu_range);
  cfg.dominant_var_range = pair(c->dominant_var_range);
  cfg.nondominant_var_range = pair(c->nondominant_var_range);
  cfg.count_range = {c->count_range[0], c->count_range[1]};
  cfg.requirement_fraction_range = pair(c->requirement_fraction_range);
  cfg.seed = c->seed;
  cfg.validate();
  return cfg;
}

Method to_cpp(ra_method m) {
  switch (m) {
    case RA_METHOD_ADAPTIVE:
      return Method::Adaptive;
    case RA_METHOD_NEUTRAL:
      return Method::Neutral;
    case RA_METHOD_AVERSE:
      return Method::Averse;
    case RA_METHOD_RANDOM:
      return Method::Random;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

}  // namespace

extern "C" {

const char* ra_version(void) { return RISKALLOC_VERSION; }

const char* ra_last_error(void) { return g_last_error.c_str(); }

const char* ra_status_name(ra_status status) {
  switch (status) {
    case RA_OK:
      return "ok";
    case RA_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case RA_ERR_DIMENSION:
      return "dimension mismatch";
    case RA_ERR_INFEASIBLE:
      return "infeasible";
    case RA_ERR_PARSE:
      return "parse error";
    case RA_ERR_IO:
      return "i/o error";
    case RA_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void ra_string_free(char* s) { std::free(s); }

const char* ra_method_name(ra_method method) {
  switch (method) {
    case RA_METHOD_ADAPTIVE:
      return "adaptive";
    case RA_METHOD_NEUTRAL:
      return "neutral";
    case RA_METHOD_AVERSE:
      return "averse";
    case RA_METHOD_RANDOM:
      return "random";
  }
  return "unknown";
}

ra_status ra_method_parse(const char* name, ra_method* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    const auto m = parse_method(name);
    if (!m) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string("unknown method '") + name +
                      "' (expected adaptive, neutral, averse or random)");
    }
    *out = static_cast<ra_method>(static_cast<int>(*m));
  });
}

ra_status ra_problem_from_json(const char* text, ra_problem** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new ra_problem{parse_problem(text)};
  });
}

ra_status ra_problem_load(const char* path, ra_problem** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorKind::Io, std::string("cannot read '") + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      *out = new ra_problem{parse_problem(buf.str())};
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(path) + ": " + e.what());
    }
  });
}

ra_status ra_problem_to_json(const ra_problem* problem, char** out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    *out = copy_string(dump_json(problem_to_json(problem->value)));
  });
}

ra_status ra_problem_dims(const ra_problem* problem, size_t* species,
                          size_t* traits, size_t* tasks) {
  return guarded([&] {
    require(problem != nullptr, "null problem");
    if (species) *species = problem->value.num_species();
    if (traits) *traits = problem->value.num_traits();
    if (tasks) *tasks = problem->value.num_tasks();
  });
}

ra_status ra_problem_counts(const ra_problem* problem, int64_t* counts,
                            size_t len) {
  return guarded([&] {
    require(problem != nullptr && counts != nullptr, "null argument");
    const auto& c = problem->value.team().counts();
    if (len != c.size()) {
      throw Error(ErrorKind::DimensionMismatch, "counts buffer has wrong length");
    }
    std::copy(c.begin(), c.end(), counts);
  });
}

ra_status ra_problem_generate(const ra_generator_config* cfg,
                              uint64_t instance_id, ra_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new ra_problem{generate_instance(to_cpp(cfg), instance_id)};
  });
}

void ra_problem_free(ra_problem* problem) { delete problem; }

ra_status ra_preset(const char* name, ra_problem** problem,
                    char** references_json) {
  return guarded([&] {
    require(name != nullptr && problem != nullptr, "null argument");
    Preset preset = make_preset(name);
    std::string refs = dump_json(references_to_json(name, preset));
    auto handle = std::make_unique<ra_problem>(ra_problem{preset.problem});
    if (references_json != nullptr) *references_json = copy_string(refs);
    *problem = handle.release();
  });
}

ra_status ra_validate_allocation(const ra_problem* problem, const int64_t* x,
                                 size_t len, int* feasible, int64_t* slack,
                                 int64_t* violating_species) {
  return guarded([&] {
    require(problem != nullptr && feasible != nullptr, "null argument");
    const auto report =
        validate_allocation(int_matrix(problem->value, x, len),
                            problem->value.team());
    *feasible = report.feasible ? 1 : 0;
    if (slack) std::copy(report.slack.begin(), report.slack.end(), slack);
    if (violating_species) {
      *violating_species = report.violating_species
                               ? static_cast<int64_t>(*report.violating_species)
                               : -1;
    }
  });
}

ra_status ra_success_log_probs(const ra_problem* problem, const double* x,
                               size_t len, double* out, size_t out_len) {
  return guarded([&] {
    require(problem != nullptr && x != nullptr && out != nullptr,
            "null argument");
    const auto& p = problem->value;
    if (len != p.num_tasks() * p.num_species() || out_len != p.num_tasks()) {
      throw Error(ErrorKind::DimensionMismatch, "buffer lengths do not match");
    }
    Matrix m(p.num_tasks(), p.num_species());
    std::copy(x, x + len, m.data().begin());
    const auto lp = success_log_probs(m, p);
    std::copy(lp.begin(), lp.end(), out);
  });
}

ra_status ra_evaluate_mc(const ra_problem* problem, const int64_t* x,
                         size_t len, uint64_t trials, uint64_t seed,
                         int clamp_nonnegative, int per_robot,
                         double* task_rates,
                         size_t rates_len, double* combined_rate) {
  return guarded([&] {
    require(problem != nullptr && task_rates != nullptr &&
                combined_rate != nullptr,
            "null argument");
    const auto& p = problem->value;
    if (rates_len != p.num_tasks()) {
      throw Error(ErrorKind::DimensionMismatch, "rates buffer has wrong length");
    }
    Allocation alloc(int_matrix(p, x, len), p.team());
    const auto report = evaluate_allocation_mc(
        alloc, p, trials, seed,
        clamp_nonnegative ? SamplingMode::ClampNonnegative : SamplingMode::Raw,
        per_robot ? Coupling::Robot : Coupling::Coalition);
    std::copy(report.task_rates.begin(), report.task_rates.end(), task_rates);
    *combined_rate = report.combined_rate;
  });
}

void ra_solver_config_default(ra_solver_config* cfg) {
  if (cfg == nullptr) return;
  const SolverConfig d;
  cfg->num_starts = d.num_starts;
  cfg->max_iters_per_start = d.max_iters_per_start;
  cfg->step_init = d.step_init;
  cfg->armijo_c = d.armijo_c;
  cfg->step_shrink = d.step_shrink;
  cfg->convergence_tol = d.convergence_tol;
  cfg->beta_schedule = nullptr;
  cfg->beta_schedule_len = 0;
  cfg->lambda = d.lambda;
  cfg->hill_climb_max_moves = d.hill_climb_max_moves;
  cfg->seed = d.seed;
}

ra_status ra_solve(const ra_problem* problem, ra_method method,
                   const ra_solver_config* cfg, ra_solution** out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    const SolverConfig c = to_cpp(cfg);
    *out = new ra_solution{solve(problem->value, to_cpp(method), c), c};
  });
}

ra_status ra_solution_allocation(const ra_solution* solution, int64_t* x,
                                 size_t len) {
  return guarded([&] {
    require(solution != nullptr && x != nullptr, "null argument");
    const auto data = solution->value.allocation.assignment().data();
    if (len != data.size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "allocation buffer has wrong length");
    }
    std::copy(data.begin(), data.end(), x);
  });
}

ra_status ra_solution_task_log_probs(const ra_solution* solution, double* out,
                                     size_t len) {
  return guarded([&] {
    require(solution != nullptr && out != nullptr, "null argument");
    const auto& lp = solution->value.task_log_probs;
    if (len != lp.size()) {
      throw Error(ErrorKind::DimensionMismatch, "buffer has wrong length");
    }
    std::copy(lp.begin(), lp.end(), out);
  });
}

double ra_solution_min_log_prob(const ra_solution* solution) {
  return solution ? solution->value.min_log_prob : std::nan("");
}

double ra_solution_seconds(const ra_solution* solution) {
  return solution ? solution->value.stats.seconds : std::nan("");
}

ra_status ra_solution_to_json(const ra_solution* solution, int include_timing,
                              char** out) {
  return guarded([&] {
    require(solution != nullptr && out != nullptr, "null argument");
    *out = copy_string(dump_json(solution_to_json(
        solution->value, solution->config, include_timing != 0)));
  });
}

void ra_solution_free(ra_solution* solution) { delete solution; }

void ra_generator_config_default(ra_generator_config* cfg) {
  if (cfg == nullptr) return;
  const GeneratorConfig d;
  cfg->num_species = d.num_species;
  cfg->num_traits = d.num_traits;
  cfg->num_tasks = d.num_tasks;
  auto put = [](double* dst, const std::array<double, 2>& src) {
    dst[0] = src[0];
    dst[1] = src[1];
  };
  put(cfg->dominant_mu_range, d.dominant_mu_range);
  put(cfg->nondominant_mu_range, d.nondominant_mu_range);
  put(cfg->dominant_var_range, d.dominant_var_range);
  put(cfg->nondominant_var_range, d.nondominant_var_range);
  cfg->count_range[0] = d.count_range[0];
  cfg->count_range[1] = d.count_range[1];
  put(cfg->requirement_fraction_range, d.requirement_fraction_range);
  cfg->seed = d.seed;
}

ra_status ra_benchmark_run(const ra_generator_config* gen,
                           const ra_method* methods, size_t n_methods,
                           const ra_solver_config* cfg, size_t n_instances,
                           unsigned threads, ra_benchmark** out) {
  return guarded([&] {
    require(methods != nullptr && out != nullptr, "null argument");
    std::vector<Method> ms;
    for (size_t i = 0; i < n_methods; ++i) ms.push_back(to_cpp(methods[i]));
    *out = new ra_benchmark{
        run_benchmark(n_instances, ms, to_cpp(gen), to_cpp(cfg), threads)};
  });
}

size_t ra_benchmark_size(const ra_benchmark* bench) {
  return bench ? bench->records.size() : 0;
}

ra_status ra_benchmark_to_csv(const ra_benchmark* bench, int include_timing,
                              char** out) {
  return guarded([&] {
    require(bench != nullptr && out != nullptr, "null argument");
    *out = copy_string(records_to_csv(bench->records, include_timing != 0));
  });
}

ra_status ra_benchmark_summary(const ra_benchmark* bench, char** out) {
  return guarded([&] {
    require(bench != nullptr && out != nullptr, "null argument");
    *out = copy_string(format_summary_table(summarize(bench->records)));
  });
}

void ra_benchmark_free(ra_benchmark* bench) { delete bench; }

}  // extern "C"
