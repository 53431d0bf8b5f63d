#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "riskalloc/model.hpp"
#include "riskalloc/solver.hpp"

namespace riskalloc {

/// Sampling ranges for random benchmark instances. Species s has trait s as
/// its dominant trait, so num_species must equal num_traits.
struct GeneratorConfig {
  std::size_t num_species = 3;
  std::size_t num_traits = 3;
  std::size_t num_tasks = 3;
  std::array<double, 2> dominant_mu_range{4.0, 5.0};
  std::array<double, 2> nondominant_mu_range{0.0, 1.0};
  std::array<double, 2> dominant_var_range{0.0, 0.5};
  std::array<double, 2> nondominant_var_range{0.0, 1.0};
  std::array<std::int64_t, 2> count_range{5, 15};
  // Y*[m,u] = f * (N_A . mu_Q)[u] / M with f drawn from this range.
  std::array<double, 2> requirement_fraction_range{0.2, 0.6};
  std::uint64_t seed = 0;

  void validate() const;
};

ProblemInstance generate_instance(const GeneratorConfig& cfg,
                                  std::mt19937_64& rng);

// Instance `instance_id` of the stream rooted at cfg.seed.
ProblemInstance generate_instance(const GeneratorConfig& cfg,
                                  std::uint64_t instance_id);

struct Preset {
  ProblemInstance problem;
  // Named reference allocations, in a fixed order.
  std::vector<std::pair<std::string, Allocation>> references;
};

/// Two-species emergency-response scenario (debris removal + firefighting)
/// with the three published reference allocations "ours", "risk_averse" and
/// "risk_neutral".
Preset robotarium_preset();

std::vector<std::string> preset_names();
// Throws ErrorKind::InvalidArgument for unknown names.
Preset make_preset(const std::string& name);

// FNV-1a over the numeric content of a problem (labels excluded).
std::uint64_t instance_hash(const ProblemInstance& problem);

struct BenchmarkRecord {
  std::uint64_t instance_id = 0;
  Method method = Method::Adaptive;
  std::vector<double> task_probs;
  double min_task_prob = 0.0;
  double solve_seconds = 0.0;
  std::uint64_t instance_hash = 0;
  IntMatrix allocation;
};

/// Solves `n_instances` generated problems with every method in `methods`.
/// Records come back sorted by (instance_id, position in `methods`).
/// `threads` == 0 picks the hardware concurrency.
std::vector<BenchmarkRecord> run_benchmark(std::size_t n_instances,
                                           const std::vector<Method>& methods,
                                           const GeneratorConfig& gen_cfg,
                                           const SolverConfig& solver_cfg,
                                           unsigned threads = 0);

struct Quantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  double iqr() const { return q3 - q1; }
};

// Linear-interpolation quantiles of a nonempty sample.
Quantiles quantiles(std::vector<double> values);

struct MethodSummary {
  Method method = Method::Adaptive;
  std::size_t records = 0;
  Quantiles pooled_task_probs;
  Quantiles min_task_probs;
};

/// Per-method statistics, ordered by Method. Throws on empty input.
std::vector<MethodSummary> summarize(const std::vector<BenchmarkRecord>& records);

std::string format_summary_table(const std::vector<MethodSummary>& summary);

/// One row per record: instance_id, method, task_prob_1..M, min_task_prob,
/// solve_seconds. Without timing the last column is "NA" so the bytes only
/// depend on the inputs.
std::string records_to_csv(const std::vector<BenchmarkRecord>& records,
                           bool include_timing);

}  // namespace riskalloc
