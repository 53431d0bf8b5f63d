#include "riskalloc/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace riskalloc {

namespace {

void require_nonnegative(const Matrix& m, const char* what) {
  for (double v : m.data()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(what) + " must hold finite nonnegative entries");
    }
  }
}

void check_product_dims(const Matrix& x, const SpeciesTraitModel& species) {
  if (x.cols() != species.num_species()) {
    std::ostringstream os;
    os << "allocation has " << x.cols() << " species columns, model has "
       << species.num_species();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

SpeciesTraitModel::SpeciesTraitModel(Matrix mean_traits, Matrix trait_variances)
    : mean_(std::move(mean_traits)), var_(std::move(trait_variances)) {
  if (!var_.same_shape(mean_.rows(), mean_.cols())) {
    throw Error(ErrorKind::DimensionMismatch,
                "trait means and variances differ in shape");
  }
  require_nonnegative(mean_, "trait means");
  require_nonnegative(var_, "trait variances");
}

TaskRequirements::TaskRequirements(Matrix requirements)
    : req_(std::move(requirements)) {
  require_nonnegative(req_, "task requirements");
}

TeamComposition::TeamComposition(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  for (auto c : counts_) {
    if (c < 0) {
      throw Error(ErrorKind::InvalidArgument, "species counts must be >= 0");
    }
  }
}

std::int64_t TeamComposition::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

ProblemInstance::ProblemInstance(SpeciesTraitModel species,
                                 TeamComposition team, TaskRequirements tasks,
                                 ProblemLabels labels)
    : species_(std::move(species)),
      team_(std::move(team)),
      tasks_(std::move(tasks)),
      labels_(std::move(labels)) {
  const auto s = species_.num_species();
  const auto u = species_.num_traits();
  const auto m = tasks_.num_tasks();
  if (s == 0 || u == 0 || m == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "problem needs at least one species, trait and task");
  }
  if (team_.num_species() != s) {
    throw Error(ErrorKind::DimensionMismatch,
                "team counts do not match the number of species");
  }
  if (tasks_.num_traits() != u) {
    throw Error(ErrorKind::DimensionMismatch,
                "task requirements do not match the number of traits");
  }
  auto check_labels = [](const std::vector<std::string>& l, std::size_t n,
                         const char* what) {
    if (!l.empty() && l.size() != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  std::string(what) + " labels have the wrong length");
    }
  };
  check_labels(labels_.species, s, "species");
  check_labels(labels_.tasks, m, "task");
  check_labels(labels_.traits, u, "trait");
}

Allocation::Allocation(IntMatrix assignment, const TeamComposition& team)
    : x_(std::move(assignment)) {
  if (x_.cols() != team.num_species()) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation columns do not match the number of species");
  }
  const auto report = validate_allocation(x_, team);
  if (!report.feasible) {
    std::ostringstream os;
    os << "allocation violates the team budget of species "
       << (*report.violating_species + 1);
    throw Error(ErrorKind::Infeasible, os.str());
  }
}

RelaxedAllocation::RelaxedAllocation(Matrix assignment,
                                     const TeamComposition& team)
    : x_(std::move(assignment)) {
  if (x_.cols() != team.num_species()) {
    throw Error(ErrorKind::DimensionMismatch,
                "allocation columns do not match the number of species");
  }
  if (!is_feasible(x_, team)) {
    throw Error(ErrorKind::Infeasible,
                "relaxed allocation violates the team budget");
  }
}

Matrix aggregate_means(const Matrix& x, const SpeciesTraitModel& species) {
  check_product_dims(x, species);
  const Matrix& mu = species.mean_traits();
  Matrix out(x.rows(), mu.cols());
  for (std::size_t m = 0; m < x.rows(); ++m) {
    for (std::size_t s = 0; s < x.cols(); ++s) {
      const double xs = x(m, s);
      for (std::size_t u = 0; u < mu.cols(); ++u) out(m, u) += xs * mu(s, u);
    }
  }
  return out;
}

Matrix aggregate_variances(const Matrix& x, const SpeciesTraitModel& species) {
  check_product_dims(x, species);
  const Matrix& var = species.trait_variances();
  Matrix out(x.rows(), var.cols());
  for (std::size_t m = 0; m < x.rows(); ++m) {
    for (std::size_t s = 0; s < x.cols(); ++s) {
      const double xs2 = x(m, s) * x(m, s);
      for (std::size_t u = 0; u < var.cols(); ++u) out(m, u) += xs2 * var(s, u);
    }
  }
  return out;
}

AggregatedTraits aggregate(const Matrix& x, const SpeciesTraitModel& species) {
  return {aggregate_means(x, species), aggregate_variances(x, species)};
}

FeasibilityReport validate_allocation(const IntMatrix& x,
                                      const TeamComposition& team) {
  FeasibilityReport report;
  report.slack.resize(team.num_species());
  for (std::size_t s = 0; s < team.num_species(); ++s) {
    bool negative = false;
    std::int64_t sum = 0;
    if (s < x.cols()) {
      for (std::size_t m = 0; m < x.rows(); ++m) {
        negative |= x(m, s) < 0;
        sum += x(m, s);
      }
    }
    report.slack[s] = team.count(s) - sum;
    if ((negative || report.slack[s] < 0) && report.feasible) {
      report.feasible = false;
      report.violating_species = s;
    }
  }
  return report;
}

bool is_feasible(const Matrix& x, const TeamComposition& team) {
  if (x.cols() != team.num_species()) return false;
  for (std::size_t s = 0; s < x.cols(); ++s) {
    double sum = 0.0;
    for (std::size_t m = 0; m < x.rows(); ++m) {
      if (!(x(m, s) >= 0.0)) return false;
      sum += x(m, s);
    }
    if (sum > static_cast<double>(team.count(s)) + kFeasibilityTolerance) {
      return false;
    }
  }
  return true;
}

}  // namespace riskalloc
