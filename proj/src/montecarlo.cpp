#include "riskalloc/montecarlo.hpp"

#include <cmath>

#include "riskalloc/rng.hpp"

namespace riskalloc {

namespace {

// Fills rows [first, first + n) of `traits` with one draw for species s.
void draw_block(const ProblemInstance& problem, std::size_t s, Matrix& traits,
                std::size_t first, std::size_t n, std::mt19937_64& rng,
                SamplingMode mode) {
  const Matrix& mu = problem.species().mean_traits();
  const Matrix& var = problem.species().trait_variances();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t u = 0; u < problem.num_traits(); ++u) {
    // Always consume one draw so streams line up across modes.
    double v = mu(s, u) + std::sqrt(var(s, u)) * normal(rng);
    if (mode == SamplingMode::ClampNonnegative && v < 0.0) v = 0.0;
    for (std::size_t r = first; r < first + n; ++r) traits(r, u) = v;
  }
}

}  // namespace

SampledTeam sample_team(const ProblemInstance& problem, std::mt19937_64& rng,
                        SamplingMode mode) {
  SampledTeam team;
  team.traits.reserve(problem.num_species());
  for (std::size_t s = 0; s < problem.num_species(); ++s) {
    const auto robots = static_cast<std::size_t>(problem.team().count(s));
    Matrix traits(robots, problem.num_traits());
    for (std::size_t r = 0; r < robots; ++r) {
      draw_block(problem, s, traits, r, 1, rng, mode);
    }
    team.traits.push_back(std::move(traits));
  }
  return team;
}

SampledTeam sample_team(const ProblemInstance& problem, const IntMatrix& x,
                        std::mt19937_64& rng, SamplingMode mode,
                        Coupling coupling) {
  if (coupling == Coupling::Robot) return sample_team(problem, rng, mode);
  SampledTeam team;
  team.traits.reserve(problem.num_species());
  for (std::size_t s = 0; s < problem.num_species(); ++s) {
    const auto robots = static_cast<std::size_t>(problem.team().count(s));
    Matrix traits(robots, problem.num_traits());
    std::size_t next = 0;
    for (std::size_t m = 0; m < problem.num_tasks(); ++m) {
      const auto n = static_cast<std::size_t>(x(m, s));
      draw_block(problem, s, traits, next, n, rng, mode);
      next += n;
    }
    for (; next < robots; ++next) {
      draw_block(problem, s, traits, next, 1, rng, mode);
    }
    team.traits.push_back(std::move(traits));
  }
  return team;
}

TrialOutcome evaluate_trial(const IntMatrix& x, const ProblemInstance& problem,
                            const SampledTeam& team) {
  const std::size_t tasks = problem.num_tasks();
  const std::size_t traits = problem.num_traits();
  const Matrix& req = problem.tasks().requirements();

  Matrix totals(tasks, traits);
  for (std::size_t s = 0; s < problem.num_species(); ++s) {
    std::size_t next = 0;
    for (std::size_t m = 0; m < tasks; ++m) {
      for (std::int64_t k = 0; k < x(m, s); ++k, ++next) {
        for (std::size_t u = 0; u < traits; ++u) {
          totals(m, u) += team.traits[s](next, u);
        }
      }
    }
  }

  TrialOutcome outcome;
  outcome.per_task_success.resize(tasks);
  for (std::size_t m = 0; m < tasks; ++m) {
    bool ok = true;
    for (std::size_t u = 0; u < traits; ++u) {
      if (req(m, u) > 0.0 && totals(m, u) < req(m, u)) ok = false;
    }
    outcome.per_task_success[m] = ok;
    outcome.combined_success = outcome.combined_success && ok;
  }
  return outcome;
}

MonteCarloReport evaluate_allocation_mc(const Allocation& allocation,
                                        const ProblemInstance& problem,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        SamplingMode mode,
                                        Coupling coupling) {
  if (trials == 0) {
    throw Error(ErrorKind::InvalidArgument, "trials must be positive");
  }
  const IntMatrix& x = allocation.assignment();
  if (!x.same_shape(problem.num_tasks(), problem.num_species())) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation shape does not match the problem");
  }
  // Allocation's constructor already enforced the budget against some team;
  // recheck against this problem's.
  const auto check = validate_allocation(x, problem.team());
  if (!check.feasible) {
    throw Error(ErrorKind::Infeasible,
                "allocation exceeds the team budget of species " +
                    std::to_string(*check.violating_species + 1));
  }

  MonteCarloReport report;
  report.trials = trials;
  report.task_successes.assign(problem.num_tasks(), 0);
  std::mt19937_64 rng(derive_seed(seed, 0));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto team = sample_team(problem, x, rng, mode, coupling);
    const auto outcome = evaluate_trial(x, problem, team);
    for (std::size_t m = 0; m < outcome.per_task_success.size(); ++m) {
      report.task_successes[m] += outcome.per_task_success[m] ? 1 : 0;
    }
    report.combined_successes += outcome.combined_success ? 1 : 0;
  }
  const double n = static_cast<double>(trials);
  for (auto c : report.task_successes) {
    report.task_rates.push_back(static_cast<double>(c) / n);
  }
  report.combined_rate = static_cast<double>(report.combined_successes) / n;
  return report;
}

}  // namespace riskalloc
