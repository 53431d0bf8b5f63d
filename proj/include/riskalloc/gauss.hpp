#pragma once

#include <span>
#include <vector>

#include "riskalloc/matrix.hpp"
#include "riskalloc/model.hpp"

namespace riskalloc {

// Task log-probabilities are clamped to this value before they enter any
// objective, so an impossible task still yields a finite score.
inline constexpr double kLogProbFloor = -1e6;

// Below this argument the log-CDF and the pdf/cdf ratio switch to the
// asymptotic tail expansion.
inline constexpr double kTailThreshold = -8.0;

/// Standard normal CDF. Throws ErrorKind::InvalidArgument on non-finite z.
double std_normal_cdf(double z);

/// ln Phi(z), accurate to ~1e-14 relative for z down to well below -40.
/// Uses log1p(-Q(z)) on the upper half so values near zero keep their
/// relative precision.
double std_normal_log_cdf(double z);

double std_normal_log_pdf(double z);

/// phi(z) / Phi(z), the derivative of ln Phi. Stable in both tails.
double inverse_mills_ratio(double z);

inline double clamp_log_prob(double log_prob) {
  return log_prob < kLogProbFloor ? kLogProbFloor : log_prob;
}

struct TaskSuccess {
  // Standardized margins of the required traits, in trait order.
  std::vector<double> per_trait_z;
  double log_prob = 0.0;
  double prob = 1.0;
};

TaskSuccess task_success(std::span<const double> mu_row,
                         std::span<const double> var_row,
                         std::span<const double> req_row);

/// Sum over required traits of ln Phi((mu - req) / sigma). Zero when the
/// task requires nothing.
double task_success_log_prob(std::span<const double> mu_row,
                             std::span<const double> var_row,
                             std::span<const double> req_row);

/// Unclamped ln P(task m succeeds) for every task under relaxed allocation x.
std::vector<double> success_log_probs(const Matrix& x,
                                      const ProblemInstance& problem);

/// Per-task gradients: entry m is an M x S matrix holding
/// d ln P_m / d x, which is zero outside row m.
std::vector<Matrix> grad_success_log_probs(const Matrix& x,
                                           const ProblemInstance& problem);

/// Log-probability of one task from its allocation row, writing
/// d ln P_task / d x_row into `grad_row` (length S). This is the kernel the
/// solver calls; it does no dimension checking.
double task_log_prob_with_grad(std::span<const double> x_row,
                               const ProblemInstance& problem,
                               std::size_t task, std::span<double> grad_row);

}  // namespace riskalloc
