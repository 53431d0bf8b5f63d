#include "riskalloc/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace riskalloc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void require_finite(double z) {
  if (!std::isfinite(z)) {
    std::ostringstream os;
    os << "normal CDF argument must be finite, got " << z;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

// Asymptotic series S(z) = 1 - 1/z^2 + 3/z^4 - 15/z^6 + ... with
// Phi(z) = phi(z) * S(z) / (-z) for z -> -inf. Summed until the terms stop
// shrinking; at z = -8 the smallest term is ~1e-14.
double tail_series(double z) {
  const double inv_z2 = 1.0 / (z * z);
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv_z2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double sigma_of(double variance) {
  return std::sqrt(std::max(variance, kVarianceFloor));
}

}  // namespace

double std_normal_cdf(double z) {
  require_finite(z);
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

double std_normal_log_cdf(double z) {
  require_finite(z);
  if (z < kTailThreshold) {
    return -0.5 * z * z - std::log(-z) - kLogSqrt2Pi +
           std::log(tail_series(z));
  }
  if (z <= 0.0) return std::log(0.5 * std::erfc(-z * kInvSqrt2));
  return std::log1p(-0.5 * std::erfc(z * kInvSqrt2));
}

double std_normal_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double inverse_mills_ratio(double z) {
  require_finite(z);
  if (z < kTailThreshold) return -z / tail_series(z);
  return std::exp(std_normal_log_pdf(z) - std_normal_log_cdf(z));
}

TaskSuccess task_success(std::span<const double> mu_row,
                         std::span<const double> var_row,
                         std::span<const double> req_row) {
  if (mu_row.size() != req_row.size() || var_row.size() != req_row.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "trait rows passed to task_success differ in length");
  }
  TaskSuccess out;
  out.log_prob = 0.0;
  for (std::size_t u = 0; u < req_row.size(); ++u) {
    if (!(req_row[u] > 0.0)) continue;
    const double z = (mu_row[u] - req_row[u]) / sigma_of(var_row[u]);
    out.per_trait_z.push_back(z);
    out.log_prob += std_normal_log_cdf(z);
  }
  out.prob = std::exp(out.log_prob);
  return out;
}

double task_success_log_prob(std::span<const double> mu_row,
                             std::span<const double> var_row,
                             std::span<const double> req_row) {
  return task_success(mu_row, var_row, req_row).log_prob;
}

std::vector<double> success_log_probs(const Matrix& x,
                                      const ProblemInstance& problem) {
  if (x.rows() != problem.num_tasks()) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation rows do not match the number of tasks");
  }
  const auto agg = aggregate(x, problem.species());
  const Matrix& req = problem.tasks().requirements();
  std::vector<double> out(x.rows());
  for (std::size_t m = 0; m < x.rows(); ++m) {
    out[m] = task_success_log_prob(agg.means.row(m), agg.variances.row(m),
                                   req.row(m));
  }
  return out;
}

double task_log_prob_with_grad(std::span<const double> x_row,
                               const ProblemInstance& problem,
                               std::size_t task, std::span<double> grad_row) {
  const Matrix& mu_q = problem.species().mean_traits();
  const Matrix& var_q = problem.species().trait_variances();
  const auto req = problem.tasks().requirements().row(task);
  const std::size_t num_species = x_row.size();

  std::fill(grad_row.begin(), grad_row.end(), 0.0);
  double log_prob = 0.0;
  for (std::size_t u = 0; u < req.size(); ++u) {
    if (!(req[u] > 0.0)) continue;
    double mean = 0.0;
    double variance = 0.0;
    for (std::size_t s = 0; s < num_species; ++s) {
      mean += x_row[s] * mu_q(s, u);
      variance += x_row[s] * x_row[s] * var_q(s, u);
    }
    const bool floored = variance < kVarianceFloor;
    const double sigma = sigma_of(variance);
    const double z = (mean - req[u]) / sigma;
    log_prob += std_normal_log_cdf(z);

    // d ln Phi(z) / dx_s = ratio * (mu_s - z * x_s * var_s / sigma) / sigma;
    // sigma is constant where the variance floor is active.
    const double ratio = inverse_mills_ratio(z);
    for (std::size_t s = 0; s < num_species; ++s) {
      const double spread = floored ? 0.0 : z * x_row[s] * var_q(s, u) / sigma;
      grad_row[s] += ratio * (mu_q(s, u) - spread) / sigma;
    }
  }
  return log_prob;
}

std::vector<Matrix> grad_success_log_probs(const Matrix& x,
                                           const ProblemInstance& problem) {
  if (x.rows() != problem.num_tasks() || x.cols() != problem.num_species()) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation shape does not match the problem");
  }
  std::vector<Matrix> grads;
  grads.reserve(x.rows());
  for (std::size_t m = 0; m < x.rows(); ++m) {
    Matrix g(x.rows(), x.cols());
    task_log_prob_with_grad(x.row(m), problem, m, g.row(m));
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace riskalloc
