#include <doctest.h>

#include "convex_auction/allocation.hpp"
#include "test_support.hpp"

using namespace convex_auction;

namespace {

VectorX<double> vec(std::initializer_list<double> values) {
  VectorX<double> v(static_cast<Index>(values.size()));
  Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

double power_objective(const VectorX<double>& c, const VectorX<double>& x, double alpha) {
  double total = 0.0;
  for (Index j = 0; j < c.size(); ++j) total += std::pow(std::max(0.0, c[j]) * x[j], alpha);
  return total;
}

}  // namespace

TEST_CASE("pointwise max") {
  CHECK(pointwise_max(vec({3, 10})) == vec({0, 1}));
  CHECK(pointwise_max(vec({5, 5})) == vec({0.5, 0.5}));
  CHECK(pointwise_max(vec({-1, -2})) == vec({0, 0}));
  CHECK(pointwise_max(vec({0, 0, 0})) == vec({0, 0, 0}));
  CHECK(pointwise_max(vec({2, 7, 7, 7})) == vec({0, 1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST_CASE("equi-marginal greedy") {
  const auto even = eqp_solver(vec({1, 1}), GreedyConfig{0.01});
  CHECK(even[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(even[1] == doctest::Approx(0.5).epsilon(1e-12));

  const auto skew = eqp_solver(vec({4, 1}));
  CHECK(std::abs(skew[0] - 0.8) <= 1e-3);
  CHECK(std::abs(skew[1] - 0.2) <= 1e-3);
  CHECK(skew.sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(eqp_solver(vec({-3, -7})) == vec({0, 0}));
  const auto partial = eqp_solver(vec({-3, 2}));
  CHECK(partial[0] == 0.0);
  CHECK(partial[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(eqp_solver(vec({1, 1}), GreedyConfig{0.3}), std::invalid_argument);
  CHECK_THROWS_AS(eqp_solver(vec({1, 1}), GreedyConfig{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(eqp_solver(vec({1, 1}), GreedyConfig{0.1, 1.0}), std::invalid_argument);
}

TEST_CASE("greedy never lands far from a fine grid optimum of the sqrt objective") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> score(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorX<double> c = vec({score(rng), score(rng)});
    const auto x = eqp_solver(c, GreedyConfig{0.01});
    double best = 0.0;
    for (int a = 0; a <= 1000; ++a) {
      const double x0 = a / 1000.0;
      best = std::max(best, power_objective(c, vec({x0, 1.0 - x0}), 0.5));
    }
    CHECK(power_objective(c, x, 0.5) >= best - 2e-2);
  }
}

TEST_CASE("closed form") {
  const auto half = closed_form_alloc(vec({100, 100}));
  CHECK(half[0] == doctest::Approx(0.5));
  CHECK(half[1] == doctest::Approx(0.5));
  CHECK(closed_form_alloc(vec({100, 0})) == vec({1, 0}));
  CHECK(closed_form_alloc(vec({-1, -2})) == vec({0, 0}));

  const auto cubic = closed_form_alloc(vec({2, 1}), 2.0 / 3.0);
  CHECK(cubic[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(cubic[1] == doctest::Approx(0.2).epsilon(1e-12));
  double best_x = 0.0;
  double best = -1.0;
  for (int a = 0; a <= 10000; ++a) {
    const double x0 = a / 10000.0;
    const double value = power_objective(vec({2, 1}), vec({x0, 1.0 - x0}), 2.0 / 3.0);
    if (value > best) {
      best = value;
      best_x = x0;
    }
  }
  CHECK(std::abs(best_x - 0.8) <= 1e-4);

  const auto tiny = closed_form_alloc(vec({1e-300, 3e-300}));
  CHECK(tiny.sum() == doctest::Approx(1.0));
  CHECK(tiny[1] == doctest::Approx(0.75));
}

TEST_CASE("closed form satisfies the first-order conditions") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> score(-1.0, 4.0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    VectorX<double> c(size(rng));
    for (Index j = 0; j < c.size(); ++j) c[j] = score(rng);
    const auto x = closed_form_alloc(c);
    if (c.maxCoeff() <= 0.0) {
      CHECK(x.isZero());
      continue;
    }
    CHECK(x.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Marginal sqrt(c_j / x_j) / 2 is equal across every bidder with c_j > 0.
    double marginal = -1.0;
    for (Index j = 0; j < c.size(); ++j) {
      if (c[j] <= 0.0) {
        CHECK(x[j] == 0.0);
        continue;
      }
      const double m = std::sqrt(c[j] / x[j]);
      if (marginal < 0.0) marginal = m;
      CHECK(m == doctest::Approx(marginal).epsilon(1e-10));
    }
  }
}

TEST_CASE("ex-ante closed form") {
  const auto instance = AuctionInstance::symmetric(make_categorical(3.0, 10.0, 0.8), 2);
  const auto table = virtual_values(instance);
  const auto open = ex_ante_closed_form(instance, table, false);
  CHECK(open.normalizer == doctest::Approx(6.0));
  CHECK(open.interim(0, 1) == doctest::Approx(10.0 / 6.0));
  CHECK(open.interim(0, 0) == doctest::Approx(1.25 / 6.0));

  const auto capped = ex_ante_closed_form(instance, table, true);
  CHECK(capped.interim(1, 1) == 1.0);
  CHECK(capped.interim(1, 0) == doctest::Approx(1.25 / 6.0));

  const auto single = AuctionInstance::symmetric(make_uniform(1), 1);
  VectorX<double> one(1);
  one << 1.0;
  const auto unit = AuctionInstance::symmetric(Bidder<double>(TypeSpace<double>(one), DiscreteDistribution<double>(one)), 1);
  CHECK(ex_ante_closed_form(unit, virtual_values(unit), false).interim(0, 0) == doctest::Approx(1.0));
  CHECK(ex_ante_closed_form(single, virtual_values(single), false).interim(0, 0) == 0.0);

  // Supply binds in expectation before truncation.
  double supply = 0.0;
  for (Index i = 0; i < 2; ++i) supply += instance.bidder(i).distribution.pmf().dot(open.interim.bidder(i));
  CHECK(supply == doctest::Approx(1.0).epsilon(1e-12));
}
