#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskalloc/matrix.hpp"

namespace riskalloc {

// Variances below this are lifted to it before any probability or gradient
// is computed.
inline constexpr double kVarianceFloor = 1e-9;

// Slack allowed on relaxed column sums.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Per-species Gaussian trait model: expected value and variance of each
/// trait (S x U). Traits are independent, so only the covariance diagonal is
/// stored.
class SpeciesTraitModel {
 public:
  SpeciesTraitModel() = default;
  SpeciesTraitModel(Matrix mean_traits, Matrix trait_variances);

  const Matrix& mean_traits() const noexcept { return mean_; }
  const Matrix& trait_variances() const noexcept { return var_; }
  std::size_t num_species() const noexcept { return mean_.rows(); }
  std::size_t num_traits() const noexcept { return mean_.cols(); }

  friend bool operator==(const SpeciesTraitModel&,
                         const SpeciesTraitModel&) = default;

 private:
  Matrix mean_;
  Matrix var_;
};

/// Minimum collective trait per task (M x U). A zero entry means the task
/// does not need that trait at all.
class TaskRequirements {
 public:
  TaskRequirements() = default;
  explicit TaskRequirements(Matrix requirements);

  const Matrix& requirements() const noexcept { return req_; }
  std::size_t num_tasks() const noexcept { return req_.rows(); }
  std::size_t num_traits() const noexcept { return req_.cols(); }
  bool required(std::size_t task, std::size_t trait) const {
    return req_(task, trait) > 0.0;
  }

  friend bool operator==(const TaskRequirements&,
                         const TaskRequirements&) = default;

 private:
  Matrix req_;
};

/// Number of robots available per species.
class TeamComposition {
 public:
  TeamComposition() = default;
  explicit TeamComposition(std::vector<std::int64_t> counts);

  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t count(std::size_t species) const { return counts_[species]; }
  std::size_t num_species() const noexcept { return counts_.size(); }
  std::int64_t total() const noexcept;

  friend bool operator==(const TeamComposition&,
                         const TeamComposition&) = default;

 private:
  std::vector<std::int64_t> counts_;
};

// Optional display labels. An empty vector means "unnamed".
struct ProblemLabels {
  std::vector<std::string> species;
  std::vector<std::string> tasks;
  std::vector<std::string> traits;

  friend bool operator==(const ProblemLabels&, const ProblemLabels&) = default;
};

class ProblemInstance {
 public:
  ProblemInstance() = default;
  ProblemInstance(SpeciesTraitModel species, TeamComposition team,
                  TaskRequirements tasks, ProblemLabels labels = {});

  const SpeciesTraitModel& species() const noexcept { return species_; }
  const TeamComposition& team() const noexcept { return team_; }
  const TaskRequirements& tasks() const noexcept { return tasks_; }
  const ProblemLabels& labels() const noexcept { return labels_; }

  std::size_t num_species() const noexcept { return species_.num_species(); }
  std::size_t num_traits() const noexcept { return species_.num_traits(); }
  std::size_t num_tasks() const noexcept { return tasks_.num_tasks(); }

  friend bool operator==(const ProblemInstance&,
                         const ProblemInstance&) = default;

 private:
  SpeciesTraitModel species_;
  TeamComposition team_;
  TaskRequirements tasks_;
  ProblemLabels labels_;
};

/// Integer task x species assignment whose column sums respect the team.
class Allocation {
 public:
  Allocation() = default;
  // Throws ErrorKind::Infeasible if `assignment` violates the team counts.
  Allocation(IntMatrix assignment, const TeamComposition& team);

  const IntMatrix& assignment() const noexcept { return x_; }
  std::int64_t operator()(std::size_t task, std::size_t species) const {
    return x_(task, species);
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  IntMatrix x_;
};

/// Real-valued relaxation of an Allocation.
class RelaxedAllocation {
 public:
  RelaxedAllocation() = default;
  RelaxedAllocation(Matrix assignment, const TeamComposition& team);

  const Matrix& assignment() const noexcept { return x_; }

  friend bool operator==(const RelaxedAllocation&,
                         const RelaxedAllocation&) = default;

 private:
  Matrix x_;
};

struct AggregatedTraits {
  Matrix means;
  Matrix variances;
};

// X * mean_traits.
Matrix aggregate_means(const Matrix& x, const SpeciesTraitModel& species);

// (X .* X) * trait_variances.
Matrix aggregate_variances(const Matrix& x, const SpeciesTraitModel& species);

AggregatedTraits aggregate(const Matrix& x, const SpeciesTraitModel& species);

struct FeasibilityReport {
  bool feasible = true;
  // counts[s] - column_sum[s]; negative where a species is over-assigned.
  std::vector<std::int64_t> slack;
  // First species whose column is over budget or holds a negative entry.
  std::optional<std::size_t> violating_species;
};

FeasibilityReport validate_allocation(const IntMatrix& x,
                                      const TeamComposition& team);

// Relaxed check with kFeasibilityTolerance on the column sums.
bool is_feasible(const Matrix& x, const TeamComposition& team);

}  // namespace riskalloc
