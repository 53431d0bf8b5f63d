#include "riskalloc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "riskalloc/gauss.hpp"
#include "riskalloc/rng.hpp"

namespace riskalloc {

namespace {

constexpr int kMaxBacktracks = 80;
constexpr double kMaxStepScale = 1e6;

bool improves(double candidate, double current) {
  return candidate > current + 1e-12 * (1.0 + std::abs(current));
}

double inner(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a.data()[i] * b.data()[i];
  return sum;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Adaptive:
      return "adaptive";
    case Method::Neutral:
      return "neutral";
    case Method::Averse:
      return "averse";
    case Method::Random:
      return "random";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::Adaptive, Method::Neutral, Method::Averse,
                 Method::Random}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::InvalidArgument, "solver config: " + msg);
  };
  if (num_starts < 1) fail("num_starts must be positive");
  if (max_iters_per_start < 1) fail("max_iters_per_start must be positive");
  if (!(step_init > 0.0)) fail("step_init must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) fail("armijo_c must lie in (0,1)");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    fail("step_shrink must lie in (0,1)");
  }
  if (!(convergence_tol > 0.0)) fail("convergence_tol must be positive");
  if (beta_schedule.empty()) fail("beta_schedule must not be empty");
  for (std::size_t i = 0; i < beta_schedule.size(); ++i) {
    if (!(beta_schedule[i] > 0.0)) fail("beta_schedule entries must be > 0");
    if (i > 0 && !(beta_schedule[i] > beta_schedule[i - 1])) {
      fail("beta_schedule must be strictly increasing");
    }
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail("lambda must be finite and nonnegative");
  }
  if (hill_climb_max_moves < 1) fail("hill_climb_max_moves must be positive");
}

// ---------------------------------------------------------------------------
// Objectives

double softmin(std::span<const double> values, double beta) {
  const double lo = *std::min_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(-beta * (v - lo));
  return lo - std::log(sum / static_cast<double>(values.size())) / beta;
}

RiskAdaptiveObjective::RiskAdaptiveObjective(const ProblemInstance& problem,
                                             std::vector<double> beta_schedule)
    : problem_(problem), betas_(std::move(beta_schedule)) {}

double RiskAdaptiveObjective::value(const Matrix& x, std::size_t stage) const {
  auto logp = success_log_probs(x, problem_);
  for (auto& v : logp) v = clamp_log_prob(v);
  return softmin(logp, betas_[stage]);
}

double RiskAdaptiveObjective::value_and_gradient(const Matrix& x,
                                                 std::size_t stage,
                                                 Matrix& grad) const {
  const std::size_t tasks = x.rows();
  grad = Matrix(tasks, x.cols());
  std::vector<double> logp(tasks);
  for (std::size_t m = 0; m < tasks; ++m) {
    const double raw = task_log_prob_with_grad(x.row(m), problem_, m,
                                               grad.row(m));
    if (raw < kLogProbFloor) {
      std::fill(grad.row(m).begin(), grad.row(m).end(), 0.0);
    }
    logp[m] = clamp_log_prob(raw);
  }
  // d softmin / d v_m is the softmax weight of -beta v_m.
  const double beta = betas_[stage];
  const double lo = *std::min_element(logp.begin(), logp.end());
  std::vector<double> w(tasks);
  double sum = 0.0;
  for (std::size_t m = 0; m < tasks; ++m) {
    w[m] = std::exp(-beta * (logp[m] - lo));
    sum += w[m];
  }
  for (std::size_t m = 0; m < tasks; ++m) {
    for (auto& g : grad.row(m)) g *= w[m] / sum;
  }
  return lo - std::log(sum / static_cast<double>(tasks)) / beta;
}

double RiskAdaptiveObjective::score(const Matrix& x) const {
  const auto logp = success_log_probs(x, problem_);
  return clamp_log_prob(*std::min_element(logp.begin(), logp.end()));
}

DeficiencyObjective::DeficiencyObjective(const ProblemInstance& problem,
                                         double lambda)
    : problem_(problem), lambda_(lambda) {}

double deficiency(const Matrix& x, const ProblemInstance& problem) {
  const Matrix mean = aggregate_means(x, problem.species());
  const Matrix& req = problem.tasks().requirements();
  double sum = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double gap = std::max(req.data()[i] - mean.data()[i], 0.0);
    sum += gap * gap;
  }
  return sum;
}

double variance_penalty(const Matrix& x, const ProblemInstance& problem) {
  const Matrix var = aggregate_variances(x, problem.species());
  double sum = 0.0;
  for (double v : var.data()) sum += v * v;
  return sum;
}

double DeficiencyObjective::value(const Matrix& x, std::size_t) const {
  double d = deficiency(x, problem_);
  if (lambda_ > 0.0) d += lambda_ * variance_penalty(x, problem_);
  return -d;
}

double DeficiencyObjective::value_and_gradient(const Matrix& x, std::size_t,
                                               Matrix& grad) const {
  const Matrix& mu_q = problem_.species().mean_traits();
  const Matrix& var_q = problem_.species().trait_variances();
  const Matrix& req = problem_.tasks().requirements();
  const auto agg = aggregate(x, problem_.species());

  // Ascent direction of -D: 2 max(Y* - X mu_Q, 0) mu_Q^T.
  Matrix gap(req.rows(), req.cols());
  double d = 0.0;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    gap.data()[i] = std::max(req.data()[i] - agg.means.data()[i], 0.0);
    d += gap.data()[i] * gap.data()[i];
  }
  grad = Matrix(x.rows(), x.cols());
  for (std::size_t m = 0; m < x.rows(); ++m) {
    for (std::size_t s = 0; s < x.cols(); ++s) {
      double g = 0.0;
      for (std::size_t u = 0; u < gap.cols(); ++u) g += gap(m, u) * mu_q(s, u);
      grad(m, s) = 2.0 * g;
    }
  }
  if (lambda_ > 0.0) {
    // d/dx ||Var_Y||^2 = 4 ((Var_Y Var_Q^T) .* X).
    double v = 0.0;
    for (double e : agg.variances.data()) v += e * e;
    d += lambda_ * v;
    for (std::size_t m = 0; m < x.rows(); ++m) {
      for (std::size_t s = 0; s < x.cols(); ++s) {
        double g = 0.0;
        for (std::size_t u = 0; u < var_q.cols(); ++u) {
          g += agg.variances(m, u) * var_q(s, u);
        }
        grad(m, s) -= lambda_ * 4.0 * g * x(m, s);
      }
    }
  }
  return -d;
}

// ---------------------------------------------------------------------------
// Projection

std::vector<double> project_capped_simplex(std::span<const double> v,
                                           double cap) {
  std::vector<double> out(v.size());
  if (!(cap > 0.0)) return out;
  double positive_sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i], 0.0);
    positive_sum += out[i];
  }
  if (positive_sum <= cap) return out;

  // Sorted-threshold projection onto {x >= 0, sum x = cap}.
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double t = (prefix - cap) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
  }
  return out;
}

void project_columns(Matrix& x, const TeamComposition& team) {
  std::vector<double> column(x.rows());
  for (std::size_t s = 0; s < x.cols(); ++s) {
    for (std::size_t m = 0; m < x.rows(); ++m) column[m] = x(m, s);
    const auto p =
        project_capped_simplex(column, static_cast<double>(team.count(s)));
    for (std::size_t m = 0; m < x.rows(); ++m) x(m, s) = p[m];
  }
}

// ---------------------------------------------------------------------------
// Continuous solve

LocalSolveResult local_solve(const RelaxedAllocation& x0,
                             const ProblemInstance& problem,
                             const SolverConfig& cfg,
                             const Objective& objective) {
  const auto& team = problem.team();
  if (!is_feasible(x0.assignment(), team)) {
    throw Error(ErrorKind::Infeasible, "local_solve start is infeasible");
  }

  Matrix x = x0.assignment();
  Matrix best = x;
  double best_score = objective.score(x);
  std::int64_t iterations = 0;
  const std::int64_t budget = cfg.max_iters_per_start;

  Matrix grad;
  Matrix candidate;
  for (std::size_t stage = 0; stage < objective.num_stages(); ++stage) {
    double step = cfg.step_init;
    double f = objective.value_and_gradient(x, stage, grad);
    while (iterations < budget) {
      ++iterations;
      bool accepted = false;
      bool converged = false;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        candidate = x;
        for (std::size_t i = 0; i < candidate.size(); ++i) {
          candidate.data()[i] += step * grad.data()[i];
        }
        project_columns(candidate, team);
        // Projected step length is monotone in `step`, so once it drops
        // below tolerance no smaller step can make progress.
        if (distance(candidate, x) < cfg.convergence_tol) {
          converged = true;
          break;
        }
        Matrix delta = candidate;
        for (std::size_t i = 0; i < delta.size(); ++i) {
          delta.data()[i] -= x.data()[i];
        }
        const double fc = objective.value(candidate, stage);
        if (fc >= f + cfg.armijo_c * inner(grad, delta)) {
          accepted = true;
          break;
        }
        step *= cfg.step_shrink;
      }
      if (!accepted || converged) break;
      x = candidate;
      f = objective.value_and_gradient(x, stage, grad);
      step = std::min(step / cfg.step_shrink, cfg.step_init * kMaxStepScale);
    }
    const double s = objective.score(x);
    if (s > best_score) {
      best_score = s;
      best = x;
    }
  }
  return {RelaxedAllocation(std::move(best), team), iterations};
}

std::vector<Matrix> initial_points(const ProblemInstance& problem,
                                   const SolverConfig& cfg,
                                   const Matrix* warm_start) {
  const std::size_t tasks = problem.num_tasks();
  const std::size_t species = problem.num_species();
  const auto want = static_cast<std::size_t>(cfg.num_starts);
  std::vector<Matrix> points;
  points.reserve(want);

  if (warm_start != nullptr) points.push_back(*warm_start);

  if (points.size() < want) {
    Matrix even(tasks, species);
    for (std::size_t s = 0; s < species; ++s) {
      const double share = static_cast<double>(problem.team().count(s)) /
                           static_cast<double>(tasks);
      for (std::size_t m = 0; m < tasks; ++m) even(m, s) = share;
    }
    points.push_back(std::move(even));
  }

  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = points.size(); k < want; ++k) {
    std::mt19937_64 rng(derive_seed(cfg.seed, k));
    Matrix p(tasks, species);
    for (std::size_t s = 0; s < species; ++s) {
      // Dirichlet(1, ..., 1) weights scaled by a random share of the cap.
      std::vector<double> w(tasks);
      double total = 0.0;
      for (auto& wi : w) total += (wi = expo(rng));
      const double budget =
          unit(rng) * static_cast<double>(problem.team().count(s));
      for (std::size_t m = 0; m < tasks; ++m) p(m, s) = budget * w[m] / total;
    }
    project_columns(p, problem.team());
    points.push_back(std::move(p));
  }
  return points;
}

MultiStartResult multi_start_solve(const ProblemInstance& problem,
                                   const SolverConfig& cfg,
                                   const Objective& objective,
                                   const Matrix* warm_start) {
  cfg.validate();
  const auto starts = initial_points(problem, cfg, warm_start);
  MultiStartResult result;
  result.best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    auto local = local_solve(RelaxedAllocation(starts[k], problem.team()),
                             problem, cfg, objective);
    result.iterations += local.iterations;
    ++result.starts;
    const double s = objective.score(local.x.assignment());
    if (k == 0 || s > result.best_score) {
      result.best_score = s;
      result.best = std::move(local.x);
      result.best_start = k;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Rounding

IntMatrix largest_remainder_round(const Matrix& xc,
                                  const TeamComposition& team) {
  const std::size_t tasks = xc.rows();
  IntMatrix out(tasks, xc.cols());
  std::vector<std::size_t> order(tasks);
  std::vector<double> frac(tasks);
  for (std::size_t s = 0; s < xc.cols(); ++s) {
    double total = 0.0;
    std::int64_t floors = 0;
    for (std::size_t m = 0; m < tasks; ++m) {
      const double v = std::max(xc(m, s), 0.0);
      const double fl = std::floor(v);
      out(m, s) = static_cast<std::int64_t>(fl);
      frac[m] = v - fl;
      floors += out(m, s);
      total += v;
    }
    const std::int64_t target =
        std::min<std::int64_t>(team.count(s), std::llround(total));
    std::int64_t leftover = std::max<std::int64_t>(target - floors, 0);

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return frac[a] > frac[b];
                     });
    for (std::size_t i = 0; i < tasks && leftover > 0; ++i, --leftover) {
      ++out(order[i], s);
    }
    // Guard against float noise pushing floors above the cap.
    std::int64_t excess = out.col_sum(s) - team.count(s);
    for (std::size_t m = tasks; m-- > 0 && excess > 0;) {
      const std::int64_t take = std::min(excess, out(m, s));
      out(m, s) -= take;
      excess -= take;
    }
  }
  return out;
}

namespace {

// One agent of species s leaves `from` and joins `to`; index == tasks stands
// for the idle pool, so (pool -> m) adds an agent and (m -> pool) releases one.
struct Move {
  std::size_t s, from, to;
};

void apply(IntMatrix& x, const Move& mv, int sign) {
  const std::size_t tasks = x.rows();
  if (mv.from < tasks) x(mv.from, mv.s) -= sign;
  if (mv.to < tasks) x(mv.to, mv.s) += sign;
}

std::vector<Move> single_moves(const IntMatrix& x, const TeamComposition& team) {
  const std::size_t tasks = x.rows();
  std::vector<Move> moves;
  for (std::size_t s = 0; s < x.cols(); ++s) {
    for (std::size_t from = 0; from < tasks; ++from) {
      if (x(from, s) <= 0) continue;
      for (std::size_t to = 0; to < tasks; ++to) {
        if (to != from) moves.push_back({s, from, to});
      }
    }
    if (x.col_sum(s) < team.count(s)) {
      for (std::size_t to = 0; to < tasks; ++to) moves.push_back({s, tasks, to});
    }
    for (std::size_t from = 0; from < tasks; ++from) {
      if (x(from, s) > 0) moves.push_back({s, from, tasks});
    }
  }
  return moves;
}

}  // namespace

IntMatrix hill_climb(IntMatrix x, const TeamComposition& team,
                     const IntegerObjective& objective, int max_moves) {
  double current = objective(x);
  for (int step = 0; step < max_moves; ++step) {
    double best = current;
    std::optional<Move> chosen;
    for (const Move& mv : single_moves(x, team)) {
      apply(x, mv, +1);
      const double v = objective(x);
      apply(x, mv, -1);
      if (improves(v, best)) {
        best = v;
        chosen = mv;
      }
    }
    if (!chosen) break;
    apply(x, *chosen, +1);
    current = best;
  }
  return x;
}

IntMatrix kick_and_climb(IntMatrix x, const TeamComposition& team,
                         const IntegerObjective& objective, int max_moves) {
  double current = objective(x);
  for (int round = 0; round < max_moves; ++round) {
    bool improved = false;
    for (const Move& mv : single_moves(x, team)) {
      IntMatrix y = x;
      apply(y, mv, +1);
      y = hill_climb(std::move(y), team, objective, max_moves);
      const double v = objective(y);
      if (improves(v, current)) {
        x = std::move(y);
        current = v;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

Allocation round_allocation(const RelaxedAllocation& xc,
                            const ProblemInstance& problem,
                            const SolverConfig& cfg,
                            const IntegerObjective& objective) {
  IntMatrix x = largest_remainder_round(xc.assignment(), problem.team());
  x = hill_climb(std::move(x), problem.team(), objective,
                 cfg.hill_climb_max_moves);
  x = kick_and_climb(std::move(x), problem.team(), objective,
                     cfg.hill_climb_max_moves);
  return Allocation(std::move(x), problem.team());
}

// ---------------------------------------------------------------------------
// Methods

Solution make_solution(const ProblemInstance& problem, Allocation allocation,
                       Matrix relaxed, Method method, SolveStats stats) {
  Solution sol;
  sol.task_log_probs =
      success_log_probs(to_real(allocation.assignment()), problem);
  sol.min_log_prob =
      *std::min_element(sol.task_log_probs.begin(), sol.task_log_probs.end());
  sol.allocation = std::move(allocation);
  sol.relaxed = RelaxedAllocation(std::move(relaxed), problem.team());
  sol.method = method;
  sol.stats = stats;
  return sol;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

IntegerObjective integer_score(const Objective& objective) {
  return [&objective](const IntMatrix& x) {
    return objective.score(to_real(x));
  };
}

Solution solve_deficiency(const ProblemInstance& problem,
                          const SolverConfig& cfg, double lambda,
                          Method method) {
  cfg.validate();
  const auto start = Clock::now();
  DeficiencyObjective objective(problem, lambda);
  auto ms = multi_start_solve(problem, cfg, objective);
  auto rounded =
      round_allocation(ms.best, problem, cfg, integer_score(objective));
  SolveStats stats{ms.iterations, ms.starts, seconds_since(start)};
  return make_solution(problem, std::move(rounded), ms.best.assignment(),
                       method, stats);
}

}  // namespace

Solution solve_risk_neutral(const ProblemInstance& problem,
                            const SolverConfig& cfg) {
  return solve_deficiency(problem, cfg, 0.0, Method::Neutral);
}

Solution solve_risk_averse(const ProblemInstance& problem,
                           const SolverConfig& cfg) {
  return solve_deficiency(problem, cfg, cfg.lambda, Method::Averse);
}

Solution solve_risk_adaptive(const ProblemInstance& problem,
                             const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const Solution neutral = solve_risk_neutral(problem, cfg);
  const Matrix warm = to_real(neutral.allocation.assignment());

  RiskAdaptiveObjective objective(problem, cfg.beta_schedule);
  auto ms = multi_start_solve(problem, cfg, objective, &warm);
  auto rounded =
      round_allocation(ms.best, problem, cfg, integer_score(objective));

  SolveStats stats{ms.iterations + neutral.stats.iterations,
                   ms.starts + neutral.stats.starts, 0.0};
  Solution adaptive = make_solution(problem, std::move(rounded),
                                    ms.best.assignment(), Method::Adaptive,
                                    stats);
  if (adaptive.min_log_prob < neutral.min_log_prob) {
    adaptive = make_solution(problem, neutral.allocation,
                             neutral.relaxed.assignment(), Method::Adaptive,
                             stats);
  }
  adaptive.stats.seconds = seconds_since(start);
  return adaptive;
}

Solution solve_random(const ProblemInstance& problem, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_int_distribution<std::size_t> pick(0, problem.num_tasks() - 1);
  IntMatrix x(problem.num_tasks(), problem.num_species());
  for (std::size_t s = 0; s < problem.num_species(); ++s) {
    for (std::int64_t agent = 0; agent < problem.team().count(s); ++agent) {
      ++x(pick(rng), s);
    }
  }
  Matrix relaxed = to_real(x);
  SolveStats stats{0, 0, seconds_since(start)};
  return make_solution(problem, Allocation(std::move(x), problem.team()),
                       std::move(relaxed), Method::Random, stats);
}

Solution solve(const ProblemInstance& problem, Method method,
               const SolverConfig& cfg) {
  switch (method) {
    case Method::Adaptive:
      return solve_risk_adaptive(problem, cfg);
    case Method::Neutral:
      return solve_risk_neutral(problem, cfg);
    case Method::Averse:
      return solve_risk_averse(problem, cfg);
    case Method::Random:
      return solve_random(problem, cfg.seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

}  // namespace riskalloc
