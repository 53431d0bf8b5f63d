#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "riskalloc/matrix.hpp"
#include "riskalloc/model.hpp"

namespace riskalloc {

enum class SamplingMode {
  // Plain Gaussian draws; matches the closed-form success probability.
  Raw,
  // Negative draws are clipped to zero.
  ClampNonnegative,
};

// How robot draws relate to each other within a trial.
enum class Coupling {
  // Robots of one species serving the same task share a single trait draw,
  // so a task's aggregate variance is (X .* X) Var_Q as in the closed form.
  // Distinct (task, species) blocks are independent.
  Coalition,
  // Every robot is an independent draw; aggregate variance is X Var_Q.
  Robot,
};

/// One concrete team: traits[s] is an N_s x U matrix of sampled robots.
struct SampledTeam {
  std::vector<Matrix> traits;
};

struct TrialOutcome {
  std::vector<bool> per_task_success;
  bool combined_success = true;
};

struct MonteCarloReport {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> task_successes;
  std::uint64_t combined_successes = 0;
  std::vector<double> task_rates;
  double combined_rate = 0.0;
};

/// Independent draw for every robot.
SampledTeam sample_team(const ProblemInstance& problem, std::mt19937_64& rng,
                        SamplingMode mode = SamplingMode::Raw);

/// Team laid out for allocation `x`: rows are grouped in task order the way
/// evaluate_trial consumes them. Under Coupling::Coalition each block of
/// x(m, s) rows repeats one draw; unassigned robots are drawn independently.
SampledTeam sample_team(const ProblemInstance& problem, const IntMatrix& x,
                        std::mt19937_64& rng, SamplingMode mode,
                        Coupling coupling);

// Robot k of species s goes to the task whose row-prefix covers k.
TrialOutcome evaluate_trial(const IntMatrix& x, const ProblemInstance& problem,
                            const SampledTeam& team);

/// Success rates of `allocation` over `trials` freshly sampled teams.
/// Throws ErrorKind::InvalidArgument when trials == 0.
MonteCarloReport evaluate_allocation_mc(const Allocation& allocation,
                                        const ProblemInstance& problem,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        SamplingMode mode = SamplingMode::Raw,
                                        Coupling coupling = Coupling::Coalition);

}  // namespace riskalloc
