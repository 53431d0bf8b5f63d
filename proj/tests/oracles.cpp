#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Big big_cdf(const Big& z) {
  return boost::math::erfc(-z / boost::multiprecision::sqrt(Big(2))) / 2;
}

}  // namespace

double normal_cdf(double z) { return static_cast<double>(big_cdf(Big(z))); }

double normal_log_cdf(double z) {
  return static_cast<double>(boost::multiprecision::log(big_cdf(Big(z))));
}

double task_log_prob(const Matrix& x, const ProblemInstance& p, std::size_t m) {
  const Matrix& mu = p.species().mean_traits();
  const Matrix& var = p.species().trait_variances();
  const Matrix& req = p.tasks().requirements();
  Big total = 0;
  for (std::size_t u = 0; u < p.num_traits(); ++u) {
    if (req(m, u) <= 0.0) continue;
    Big mean = 0, v = 0;
    for (std::size_t s = 0; s < p.num_species(); ++s) {
      mean += Big(x(m, s)) * mu(s, u);
      v += Big(x(m, s)) * x(m, s) * var(s, u);
    }
    if (v < riskalloc::kVarianceFloor) v = riskalloc::kVarianceFloor;
    const Big z = (mean - req(m, u)) / boost::multiprecision::sqrt(v);
    total += boost::multiprecision::log(big_cdf(z));
  }
  return static_cast<double>(total);
}

std::vector<double> grid_projection3(const std::vector<double>& v, double cap,
                                     double fine_step) {
  auto cost = [&](double a, double b, double c) {
    return (a - v[0]) * (a - v[0]) + (b - v[1]) * (b - v[1]) +
           (c - v[2]) * (c - v[2]);
  };
  std::vector<double> best{0.0, 0.0, 0.0};
  if (cap <= 0.0) return best;

  // Convex objective over a convex set: zooming in around the grid winner
  // cannot miss the minimizer as long as the window spans a few cells.
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {cap, cap, cap};
  double step = cap / 40.0;
  for (;;) {
    const bool last = step <= fine_step;
    if (last) step = fine_step;
    double best_cost = std::numeric_limits<double>::infinity();
    for (double a = lo[0]; a <= hi[0] + 1e-12; a += step) {
      for (double b = lo[1]; b <= hi[1] + 1e-12; b += step) {
        if (a + b > cap + 1e-12) break;
        for (double c = lo[2]; c <= hi[2] + 1e-12; c += step) {
          if (a + b + c > cap + 1e-12) break;
          const double f = cost(a, b, c);
          if (f < best_cost) {
            best_cost = f;
            best = {a, b, c};
          }
        }
      }
    }
    if (last) return best;
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::max(0.0, best[i] - 3 * step);
      hi[i] = std::min(cap, best[i] + 3 * step);
    }
    step /= 10.0;
  }
}

void for_each_allocation(std::size_t tasks,
                         const std::vector<std::int64_t>& counts,
                         const std::function<void(const IntMatrix&)>& visit) {
  const std::size_t species = counts.size();
  IntMatrix x(tasks, species);
  // Fill column by column, task by task; remaining budget bounds each entry.
  std::function<void(std::size_t, std::size_t, std::int64_t)> rec =
      [&](std::size_t s, std::size_t m, std::int64_t left) {
        if (s == species) {
          visit(x);
          return;
        }
        if (m == tasks) {
          rec(s + 1, 0, s + 1 < species ? counts[s + 1] : 0);
          return;
        }
        for (std::int64_t k = 0; k <= left; ++k) {
          x(m, s) = k;
          rec(s, m + 1, left - k);
        }
        x(m, s) = 0;
      };
  rec(0, 0, counts.empty() ? 0 : counts[0]);
}

double best_min_log_prob(const ProblemInstance& p) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_allocation(p.num_tasks(), p.team().counts(), [&](const IntMatrix& x) {
    const Matrix xr = riskalloc::to_real(x);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < p.num_tasks(); ++m) {
      worst = std::min(worst, std::max(task_log_prob(xr, p, m), -1e6));
    }
    best = std::max(best, worst);
  });
  return best;
}

Matrix central_difference(const std::function<double(const Matrix&)>& f,
                          const Matrix& x, double h) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double up = f(probe);
    probe.data()[i] = orig - h;
    const double down = f(probe);
    probe.data()[i] = orig;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

ProblemInstance random_problem(std::mt19937_64& rng, std::size_t species,
                               std::size_t traits, std::size_t tasks,
                               std::int64_t count_lo, std::int64_t count_hi) {
  std::uniform_real_distribution<double> mu_d(0.2, 4.0), var_d(0.05, 2.0),
      frac(0.2, 0.9), coin(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> count_d(count_lo, count_hi);
  Matrix mu(species, traits), var(species, traits), req(tasks, traits);
  std::vector<std::int64_t> counts(species);
  for (std::size_t s = 0; s < species; ++s) {
    for (std::size_t u = 0; u < traits; ++u) {
      mu(s, u) = mu_d(rng);
      var(s, u) = var_d(rng);
    }
    counts[s] = count_d(rng);
  }
  for (std::size_t u = 0; u < traits; ++u) {
    double capability = 0.0;
    for (std::size_t s = 0; s < species; ++s) capability += counts[s] * mu(s, u);
    for (std::size_t m = 0; m < tasks; ++m) {
      req(m, u) = coin(rng) < 0.8 ? frac(rng) * capability / tasks : 0.0;
    }
  }
  return ProblemInstance(riskalloc::SpeciesTraitModel(mu, var),
                         riskalloc::TeamComposition(counts),
                         riskalloc::TaskRequirements(req));
}

Matrix random_relaxed(std::mt19937_64& rng, const ProblemInstance& p) {
  std::uniform_real_distribution<double> w(0.05, 1.0), fill(0.1, 1.0);
  Matrix x(p.num_tasks(), p.num_species());
  for (std::size_t s = 0; s < p.num_species(); ++s) {
    std::vector<double> weights(p.num_tasks());
    double sum = 0.0;
    for (auto& v : weights) sum += (v = w(rng));
    const double budget = fill(rng) * static_cast<double>(p.team().count(s));
    for (std::size_t m = 0; m < p.num_tasks(); ++m) {
      x(m, s) = budget * weights[m] / sum;
    }
  }
  return x;
}

}  // namespace oracle
