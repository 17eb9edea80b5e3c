#include <doctest.h>

#include "convex_auction/discretization.hpp"
#include "convex_auction/mechanism.hpp"
#include "test_support.hpp"

using namespace convex_auction;

namespace {

AuctionInstance one_bidder_one_type() {
  VectorX<double> one(1);
  one << 1.0;
  return AuctionInstance::symmetric(Bidder<double>(TypeSpace<double>(one), DiscreteDistribution<double>(one)), 1);
}

bool on_grid(double x, double delta) {
  const double units = x / delta;
  return std::abs(units - std::round(units)) <= 1e-9;
}

}  // namespace

TEST_CASE("grid units") {
  CHECK(grid_units(0.1) == 10);
  CHECK(grid_units(0.0125) == 80);
  CHECK(grid_units(1.0) == 1);
  CHECK_THROWS_AS(grid_units(0.3), std::invalid_argument);
  CHECK_THROWS_AS(grid_units(0.0), std::invalid_argument);
  CHECK_THROWS_AS(grid_units(1.5), std::invalid_argument);
}

TEST_CASE("single entries round to the nearest grid point") {
  const auto instance = one_bidder_one_type();
  ExPostAllocation<double> x(1, 1);
  x(0, 0) = 0.37;
  const auto rounded = round_allocation(x, instance, 0.1);
  CHECK(rounded.allocation(0, 0) == doctest::Approx(0.4));
  CHECK(rounded.report.residuals(0, 0) == doctest::Approx(-0.03));

  x(0, 0) = 0.3;
  const auto same = round_allocation(x, instance, 0.1);
  CHECK(same.allocation(0, 0) == doctest::Approx(0.3));
  CHECK(same.report.max_abs_residual <= 1e-12);
}

TEST_CASE("supply forces a floor") {
  const auto instance = AuctionInstance::symmetric(make_uniform(1), 2);
  ExPostAllocation<double> x(2, 1);
  x(0, 0) = 0.55;
  x(1, 0) = 0.55;
  const auto rounded = round_allocation(x, instance, 0.1);
  CHECK(rounded.allocation(0, 0) + rounded.allocation(1, 0) <= 1.0 + 1e-12);
  CHECK(rounded.allocation(0, 0) == doctest::Approx(0.5));
  CHECK(rounded.allocation(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("rounding keeps supply, monotonicity and the unit residual bound") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 150; ++trial) {
    const auto instance = test_support::random_instance(rng, 3, 4);
    const auto x = test_support::random_monotone_allocation(rng, instance);
    for (double delta : {0.5, 0.1, 0.05, 0.01}) {
      const auto result = round_allocation(x, instance, delta);
      const auto& y = result.allocation;
      CHECK(check_monotone(y, instance).monotone);
      for (Index p = 0; p < instance.num_profiles(); ++p) {
        CHECK(y.table.col(p).sum() <= 1.0 + 1e-9);
        for (Index i = 0; i < instance.num_bidders(); ++i) {
          CHECK(on_grid(y(i, p), delta));
          CHECK(y(i, p) >= -1e-12);
          CHECK(std::abs(x(i, p) - y(i, p)) <= delta + 1e-12);
        }
      }
      CHECK(result.report.residuals.isApprox(x.table - y.table));
    }
  }
}

TEST_CASE("already-gridded allocations have zero gaps") {
  const auto instance = AuctionInstance::symmetric(make_categorical(0.0, 100.0, 0.5), 2);
  MatrixX<double> t(2, 4);
  t << 0, 0, 1, 0.5,
       0, 1, 0, 0.5;
  const auto report = discretization_gap(instance, ExPostAllocation<double>(t), 0.1);
  CHECK(report.max_abs_residual <= 1e-12);
  CHECK(report.perceived_payment_gap <= 1e-9);
  CHECK(report.revenue_gap <= 1e-9);
}

TEST_CASE("perceived payment gap bound on random allocations") {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const auto instance = test_support::random_instance(rng, 3, 4);
    const auto x = test_support::random_monotone_allocation(rng, instance);
    for (double delta : {0.1, 0.05, 0.025}) {
      const auto report = discretization_gap(instance, x, delta);
      CHECK(report.payment_bound_holds(1e-9));
      CHECK(report.worst_payment_bound_excess <= 1e-9);
    }
  }
}

TEST_CASE("categorical sweep") {
  const auto instance = AuctionInstance::symmetric(make_categorical(3.0, 10.0, 0.8), 2);
  const auto star = heuristic_lb_rrm(instance).mechanism.allocation;
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {0.1, 0.05, 0.025, 0.0125}) {
    const auto report = discretization_gap(instance, star, delta);
    CHECK(report.revenue_gap <= previous + 1e-9);
    CHECK(report.revenue_gap / std::sqrt(delta) <= 1.0);
    CHECK(report.payment_bound_holds(1e-9));
    previous = report.revenue_gap;
  }
}
