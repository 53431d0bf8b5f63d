#pragma once

// Reference implementations used to check the library. None of these share
// code paths with src/; they are slow, direct, and meant to be obviously right.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "riskalloc/matrix.hpp"
#include "riskalloc/model.hpp"

namespace oracle {

using riskalloc::IntMatrix;
using riskalloc::Matrix;
using riskalloc::ProblemInstance;

// 50-digit Phi(z) and ln Phi(z), rounded to double at the end.
double normal_cdf(double z);
double normal_log_cdf(double z);

// ln P(task succeeds) evaluated straight from the definition with 50-digit
// arithmetic: sums of x*mu and x^2*var, then ln Phi of each margin.
double task_log_prob(const Matrix& x, const ProblemInstance& p, std::size_t m);

// argmin ||y - v|| over {y >= 0, sum y <= cap} for 3-vectors by a coarse
// grid scan refined with a fine one around the coarse winner.
std::vector<double> grid_projection3(const std::vector<double>& v, double cap,
                                     double fine_step = 1e-3);

// Every integer M x S allocation with column sums <= counts.
void for_each_allocation(std::size_t tasks,
                         const std::vector<std::int64_t>& counts,
                         const std::function<void(const IntMatrix&)>& visit);

// Best min-over-tasks log-probability over all integer allocations.
double best_min_log_prob(const ProblemInstance& p);

// Central-difference derivative of f at x (entry-wise), step h.
Matrix central_difference(const std::function<double(const Matrix&)>& f,
                          const Matrix& x, double h);

// Small random instance: S species, U traits, M tasks, counts in
// [count_lo, count_hi], requirements near the expected team capability.
ProblemInstance random_problem(std::mt19937_64& rng, std::size_t species,
                               std::size_t traits, std::size_t tasks,
                               std::int64_t count_lo, std::int64_t count_hi);

// Random feasible real allocation (entries strictly positive).
Matrix random_relaxed(std::mt19937_64& rng, const ProblemInstance& p);

}  // namespace oracle
