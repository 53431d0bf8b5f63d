#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "riskalloc/model.hpp"

using namespace riskalloc;

namespace {

SpeciesTraitModel robotarium_species() {
  return SpeciesTraitModel({{2, 1}, {1, 2}}, {{0.5, 1}, {1, 0.5}});
}

}  // namespace

TEST_CASE("matrix literal and accessors") {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.col_sum(1) == 7);
  CHECK(m.row(1)[0] == 4);
  CHECK_ERROR_KIND((Matrix{{1, 2}, {3}}), ErrorKind::DimensionMismatch);
  CHECK(distance(Matrix{{3, 0}}, Matrix{{0, 4}}) == doctest::Approx(5.0));
}

TEST_CASE("species model validation") {
  CHECK_NOTHROW(robotarium_species());
  CHECK_ERROR_KIND(SpeciesTraitModel(Matrix{{1, 2}}, Matrix{{1, 2, 3}}),
                   ErrorKind::DimensionMismatch);
  CHECK_ERROR_KIND(SpeciesTraitModel(Matrix{{-1, 2}}, Matrix{{1, 2}}),
                   ErrorKind::InvalidArgument);
  CHECK_ERROR_KIND(SpeciesTraitModel(Matrix{{1, 2}}, Matrix{{1, -0.1}}),
                   ErrorKind::InvalidArgument);
  CHECK_ERROR_KIND(SpeciesTraitModel(Matrix{{1, NAN}}, Matrix{{1, 1}}),
                   ErrorKind::InvalidArgument);
}

TEST_CASE("requirements, team and problem validation") {
  CHECK_ERROR_KIND(TaskRequirements(Matrix{{-1.0}}), ErrorKind::InvalidArgument);
  CHECK_ERROR_KIND(TeamComposition({3, -1}), ErrorKind::InvalidArgument);
  CHECK(TeamComposition({6, 9}).total() == 15);

  TaskRequirements req(Matrix{{11, 0}, {0, 14}});
  CHECK(req.required(0, 0));
  CHECK_FALSE(req.required(0, 1));

  CHECK_ERROR_KIND(ProblemInstance(robotarium_species(), TeamComposition({6}),
                                   req),
                   ErrorKind::DimensionMismatch);
  CHECK_ERROR_KIND(ProblemInstance(robotarium_species(), TeamComposition({6, 9}),
                                   TaskRequirements(Matrix{{1, 2, 3}})),
                   ErrorKind::DimensionMismatch);
  ProblemLabels bad;
  bad.tasks = {"only one"};
  CHECK_ERROR_KIND(ProblemInstance(robotarium_species(), TeamComposition({6, 9}),
                                   req, bad),
                   ErrorKind::DimensionMismatch);
}

TEST_CASE("aggregate means") {
  const auto species = robotarium_species();
  CHECK(aggregate_means(Matrix(2, 2), species) == Matrix(2, 2));
  CHECK(aggregate_means(Matrix{{6, 1}, {0, 8}}, species) ==
        Matrix{{13, 8}, {8, 16}});
  CHECK(aggregate_means(Matrix{{1, 0}, {0, 1}}, species) ==
        species.mean_traits());
  CHECK_ERROR_KIND(aggregate_means(Matrix(2, 3), species),
                   ErrorKind::DimensionMismatch);
}

TEST_CASE("aggregate variances") {
  const auto species = robotarium_species();
  CHECK(aggregate_variances(Matrix(2, 2), species) == Matrix(2, 2));
  CHECK(aggregate_variances(Matrix{{6, 1}, {0, 8}}, species) ==
        Matrix{{19, 36.5}, {64, 32}});

  // Doubling X quadruples every variance.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(2, 2);
    for (double& v : x.data()) v = d(rng);
    Matrix x2 = x;
    for (double& v : x2.data()) v *= 2;
    const Matrix a = aggregate_variances(x, species);
    const Matrix b = aggregate_variances(x2, species);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b.data()[i] == doctest::Approx(4 * a.data()[i]).epsilon(1e-14));
    }
  }

  const auto both = aggregate(Matrix{{6, 1}, {0, 8}}, species);
  CHECK(both.means == Matrix{{13, 8}, {8, 16}});
  CHECK(both.variances == Matrix{{19, 36.5}, {64, 32}});
}

TEST_CASE("validate_allocation reports slack and the violating species") {
  TeamComposition team({6, 9});
  auto ok = validate_allocation(IntMatrix{{6, 1}, {0, 8}}, team);
  CHECK(ok.feasible);
  CHECK(ok.slack == std::vector<std::int64_t>{0, 0});
  CHECK_FALSE(ok.violating_species.has_value());

  auto over = validate_allocation(IntMatrix{{7, 0}, {0, 0}}, team);
  CHECK_FALSE(over.feasible);
  CHECK(over.slack[0] == -1);
  REQUIRE(over.violating_species.has_value());
  CHECK(*over.violating_species == 0);

  auto zero = validate_allocation(IntMatrix(2, 2), team);
  CHECK(zero.feasible);
  CHECK(zero.slack == team.counts());

  auto negative = validate_allocation(IntMatrix{{-1, 0}, {1, 0}}, team);
  CHECK_FALSE(negative.feasible);
  CHECK(*negative.violating_species == 0);

  CHECK_ERROR_KIND(Allocation(IntMatrix{{7, 0}, {0, 0}}, team),
                   ErrorKind::Infeasible);
  try {
    Allocation(IntMatrix{{0, 5}, {0, 5}}, team);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("species 2") != std::string::npos);
  }
}

TEST_CASE("relaxed feasibility uses the tolerance") {
  TeamComposition team({6, 9});
  CHECK(is_feasible(Matrix{{3, 4.5}, {3 + 5e-10, 4.5}}, team));
  CHECK_FALSE(is_feasible(Matrix{{3, 4.5}, {3.001, 4.5}}, team));
  CHECK_FALSE(is_feasible(Matrix{{-0.1, 0}, {0, 0}}, team));
  CHECK_NOTHROW(RelaxedAllocation(Matrix{{2.5, 1}, {3.5, 8}}, team));
  CHECK_ERROR_KIND(RelaxedAllocation(Matrix{{2.5, 1}, {3.6, 8}}, team),
                   ErrorKind::Infeasible);
}
