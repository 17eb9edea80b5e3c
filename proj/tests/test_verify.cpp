#include <doctest.h>

#include "convex_auction/mechanism.hpp"
#include "convex_auction/verify.hpp"
#include "test_support.hpp"

using namespace convex_auction;

namespace {

AuctionInstance bic_ic() { return AuctionInstance::symmetric(make_categorical(0.0, 100.0, 0.5), 2); }

Mechanism bic_ic_robust() {
  const auto instance = bic_ic();
  MatrixX<double> x(2, 4);
  x << 0, 0, 1, 0.5,
       0, 1, 0, 0.5;
  Mechanism m;
  m.provenance = "hand";
  m.allocation = ExPostAllocation<double>(x);
  m.robust_payments = robust_payment(m.allocation, instance);
  return m;
}

const ConstraintCheck& find(const VerificationReport& report, Constraint c) {
  const auto* check = report.find(c);
  REQUIRE(check != nullptr);
  return *check;
}

/// Worst IC violation by direct enumeration of every misreport.
double brute_ic(const AuctionInstance& instance, const Mechanism& m) {
  const auto& space = instance.space();
  double worst = 0.0;
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    for (Index p = 0; p < instance.num_profiles(); ++p) {
      const double v = instance.value(i, p);
      const double truthful = v * m.allocation(i, p) - std::pow((*m.robust_payments)(i, p), 2);
      for (Index k = 0; k < instance.bidder(i).size(); ++k) {
        const Index lie = space.with_type(p, i, k);
        const double deviating = v * m.allocation(i, lie) - std::pow((*m.robust_payments)(i, lie), 2);
        worst = std::max(worst, deviating - truthful);
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("hand-built robust optimum passes IC, IR and XP") {
  const auto report = verify(bic_ic(), bic_ic_robust(), {Constraint::ic, Constraint::ir, Constraint::xp});
  CHECK(report.passed());
  CHECK(find(report, Constraint::ic).checked);
  CHECK(find(report, Constraint::ic).worst_violation <= 1e-12);
}

TEST_CASE("over-allocation fails XP by exactly one") {
  auto m = bic_ic_robust();
  m.allocation(0, 3) = 1.0;
  m.allocation(1, 3) = 1.0;
  const auto report = verify(bic_ic(), m, {Constraint::xp});
  CHECK_FALSE(report.passed());
  CHECK(find(report, Constraint::xp).worst_violation == 1.0);
}

TEST_CASE("overcharging the high type fails IR and IC") {
  auto m = bic_ic_robust();
  (*m.robust_payments)(0, 2) = 11.0;
  const auto ir = verify(bic_ic(), m, {Constraint::ir});
  CHECK_FALSE(ir.passed());
  CHECK(find(ir, Constraint::ir).worst_violation == doctest::Approx(21.0));

  const auto ic = verify(bic_ic(), m, {Constraint::ic});
  CHECK_FALSE(ic.passed());
  CHECK(find(ic, Constraint::ic).worst_violation == doctest::Approx(21.0));
  CHECK(find(ic, Constraint::ic).worst_violation == doctest::Approx(brute_ic(bic_ic(), m)));

  auto cheap = bic_ic_robust();
  (*cheap.robust_payments)(0, 3) = 0.0;
  CHECK(verify(bic_ic(), cheap, {Constraint::ic}).passed());
}

TEST_CASE("Bayesian mechanism passes BIC and BIR but not per-profile IR") {
  const auto instance = bic_ic();
  const auto result = heuristic_brm(instance);
  const auto interim = verify(instance, result.mechanism, {Constraint::bic, Constraint::bir, Constraint::xp});
  CHECK(interim.passed());
  const auto ex_post = verify(instance, result.mechanism, {Constraint::ir});
  CHECK_FALSE(ex_post.passed());
  // x(100,100) = 1/2 but h(100)^2 = 75.
  CHECK(find(ex_post, Constraint::ir).worst_violation == doctest::Approx(25.0));
}

TEST_CASE("inapplicable checks are reported as unchecked") {
  const auto instance = AuctionInstance::symmetric(make_categorical(3.0, 10.0, 0.8), 2);
  const auto ex_ante = ex_ante_mechanism(instance, false);
  const auto report = verify(instance, ex_ante.mechanism, {Constraint::ic, Constraint::xp, Constraint::xa});
  CHECK_FALSE(find(report, Constraint::ic).checked);
  CHECK_FALSE(find(report, Constraint::xp).checked);
  CHECK(find(report, Constraint::xa).checked);
  CHECK(find(report, Constraint::xa).passed);

  CHECK(default_constraints(ex_ante.mechanism) ==
        std::vector<Constraint>{Constraint::bic, Constraint::bir, Constraint::xa});
  CHECK(default_constraints(bic_ic_robust()) ==
        std::vector<Constraint>{Constraint::ic, Constraint::ir, Constraint::xp, Constraint::bounds});
}

TEST_CASE("ex-ante relaxation may give a type more than one unit yet meets supply in expectation") {
  const auto instance = AuctionInstance::symmetric(make_categorical(3.0, 10.0, 0.8), 2);
  const auto ex_ante = ex_ante_mechanism(instance, false);
  CHECK((*ex_ante.mechanism.interim_allocation)(0, 1) > 1.0);
  const auto report = verify(instance, ex_ante.mechanism, {Constraint::xa});
  CHECK(find(report, Constraint::xa).worst_violation <= 1e-12);
}

TEST_CASE("verifier agrees with brute-force IC on random mechanisms") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto instance = test_support::random_instance(rng, 3, 3);
    Mechanism m;
    m.allocation = test_support::random_monotone_allocation(rng, instance);
    m.robust_payments = robust_payment(m.allocation, instance);
    CHECK(verify(instance, m, {Constraint::ic, Constraint::ir, Constraint::xp}).passed());

    for (Index p = 0; p < instance.num_profiles(); ++p) (*m.robust_payments)(0, p) += noise(rng);
    const auto report = verify(instance, m, {Constraint::ic});
    CHECK(find(report, Constraint::ic).worst_violation == doctest::Approx(brute_ic(instance, m)).epsilon(1e-9));
  }
}
