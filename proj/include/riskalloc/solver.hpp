#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "riskalloc/matrix.hpp"
#include "riskalloc/model.hpp"

namespace riskalloc {

enum class Method { Adaptive, Neutral, Averse, Random };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

struct SolverConfig {
  int num_starts = 16;
  int max_iters_per_start = 10000;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double step_shrink = 0.5;
  // Frobenius norm of a projected step below which a local run stops.
  double convergence_tol = 1e-6;
  // Softmin temperatures, annealed in order with warm starts.
  std::vector<double> beta_schedule{1.0, 10.0, 100.0};
  // Variance weight of the risk-averse baseline.
  double lambda = 0.1;
  int hill_climb_max_moves = 1000;
  std::uint64_t seed = 0;

  // Throws ErrorKind::InvalidArgument describing the first bad field.
  void validate() const;
};

struct SolveStats {
  std::int64_t iterations = 0;
  std::int64_t starts = 0;
  double seconds = 0.0;
};

struct Solution {
  Allocation allocation;
  RelaxedAllocation relaxed;
  // Unclamped ln P(task m succeeds) of `allocation`.
  std::vector<double> task_log_probs;
  double min_log_prob = 0.0;
  Method method = Method::Adaptive;
  SolveStats stats;
};

/// A maximization objective over relaxed allocations. Smooth surrogates are
/// indexed by stage (local_solve runs them in order); `score` is the true
/// objective used to rank candidates.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t num_stages() const { return 1; }
  virtual double value(const Matrix& x, std::size_t stage) const = 0;
  virtual double value_and_gradient(const Matrix& x, std::size_t stage,
                                    Matrix& grad) const = 0;
  virtual double score(const Matrix& x) const = 0;
};

/// min_m clamped ln P_m, smoothed by softmin with an annealed temperature.
class RiskAdaptiveObjective final : public Objective {
 public:
  RiskAdaptiveObjective(const ProblemInstance& problem,
                        std::vector<double> beta_schedule);

  std::size_t num_stages() const override { return betas_.size(); }
  double value(const Matrix& x, std::size_t stage) const override;
  double value_and_gradient(const Matrix& x, std::size_t stage,
                            Matrix& grad) const override;
  double score(const Matrix& x) const override;

 private:
  const ProblemInstance& problem_;
  std::vector<double> betas_;
};

/// Negated expected deficiency ||max(Y* - X mu_Q, 0)||_F^2, plus
/// lambda * ||(X .* X) Var_Q||_F^2 when lambda > 0.
class DeficiencyObjective final : public Objective {
 public:
  DeficiencyObjective(const ProblemInstance& problem, double lambda);

  double value(const Matrix& x, std::size_t stage) const override;
  double value_and_gradient(const Matrix& x, std::size_t stage,
                            Matrix& grad) const override;
  double score(const Matrix& x) const override { return value(x, 0); }

 private:
  const ProblemInstance& problem_;
  double lambda_;
};

double deficiency(const Matrix& x, const ProblemInstance& problem);
double variance_penalty(const Matrix& x, const ProblemInstance& problem);

/// -(1/beta) ln((1/M) sum exp(-beta v_m)); lies in [min v, min v + ln(M)/beta].
double softmin(std::span<const double> values, double beta);

/// Euclidean projection of v onto {x >= 0, sum x <= cap}.
std::vector<double> project_capped_simplex(std::span<const double> v,
                                           double cap);

// Projects every species column of x onto its capped simplex.
void project_columns(Matrix& x, const TeamComposition& team);

struct LocalSolveResult {
  RelaxedAllocation x;
  std::int64_t iterations = 0;
};

/// Projected gradient ascent with Armijo backtracking, running each stage of
/// `objective` in turn from the previous stage's end point. Returns the
/// point with the best score among the start and the stage end points.
LocalSolveResult local_solve(const RelaxedAllocation& x0,
                             const ProblemInstance& problem,
                             const SolverConfig& cfg,
                             const Objective& objective);

/// Start points in the order they are tried: the warm start (if any), the
/// even split of every species over the tasks, then seeded random feasible
/// points. Truncated to cfg.num_starts.
std::vector<Matrix> initial_points(const ProblemInstance& problem,
                                   const SolverConfig& cfg,
                                   const Matrix* warm_start);

struct MultiStartResult {
  RelaxedAllocation best;
  double best_score = 0.0;
  std::size_t best_start = 0;
  std::int64_t iterations = 0;
  std::int64_t starts = 0;
};

MultiStartResult multi_start_solve(const ProblemInstance& problem,
                                   const SolverConfig& cfg,
                                   const Objective& objective,
                                   const Matrix* warm_start = nullptr);

// Score of an integer allocation; larger is better.
using IntegerObjective = std::function<double(const IntMatrix&)>;

/// Floors every entry, then hands each species' remaining whole agents to
/// the entries with the largest fractional parts (ties to the lower task).
IntMatrix largest_remainder_round(const Matrix& xc, const TeamComposition& team);

/// Best-improvement hill climbing over single-agent moves (transfer between
/// tasks, add an idle agent, remove an agent).
IntMatrix hill_climb(IntMatrix x, const TeamComposition& team,
                     const IntegerObjective& objective, int max_moves);

/// Escapes hill-climbing local optima: from x, try each single move (even a
/// worsening one), hill-climb from there, and keep the result if it beats x.
/// Repeats until no kick helps or `max_moves` kicks have been accepted.
IntMatrix kick_and_climb(IntMatrix x, const TeamComposition& team,
                         const IntegerObjective& objective, int max_moves);

Allocation round_allocation(const RelaxedAllocation& xc,
                            const ProblemInstance& problem,
                            const SolverConfig& cfg,
                            const IntegerObjective& objective);

Solution solve_risk_adaptive(const ProblemInstance& problem,
                             const SolverConfig& cfg);
Solution solve_risk_neutral(const ProblemInstance& problem,
                            const SolverConfig& cfg);
Solution solve_risk_averse(const ProblemInstance& problem,
                           const SolverConfig& cfg);
Solution solve_random(const ProblemInstance& problem, std::uint64_t seed);

Solution solve(const ProblemInstance& problem, Method method,
               const SolverConfig& cfg);

// Builds a Solution for a fixed allocation (probabilities recomputed).
Solution make_solution(const ProblemInstance& problem, Allocation allocation,
                       Matrix relaxed, Method method, SolveStats stats);

}  // namespace riskalloc
