#pragma once

#include "convex_auction/core.hpp"
#include "convex_auction/payments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace test_support {

using convex_auction::AuctionInstance;
using convex_auction::Bidder;
using convex_auction::DiscreteDistribution;
using convex_auction::ExPostAllocation;
using convex_auction::Index;
using convex_auction::TypeSpace;
using convex_auction::VectorX;

inline Bidder<double> random_bidder(std::mt19937_64& rng, int max_types) {
  std::uniform_int_distribution<int> count(1, max_types);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const int K = count(rng);
  VectorX<double> values(K), pmf(K);
  double v = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
  for (int k = 0; k < K; ++k) {
    values[k] = v;
    v += unit(rng) * 3.0;
    pmf[k] = unit(rng);
  }
  pmf /= pmf.sum();
  return {TypeSpace<double>(values), DiscreteDistribution<double>(pmf)};
}

inline AuctionInstance random_instance(std::mt19937_64& rng, int max_bidders, int max_types) {
  const int n = std::uniform_int_distribution<int>(1, max_bidders)(rng);
  std::vector<Bidder<double>> bidders;
  for (int i = 0; i < n; ++i) bidders.push_back(random_bidder(rng, max_types));
  return AuctionInstance(std::move(bidders));
}

/// x_i = s_i / (1 + sum_j s_j) with s_i increasing in bidder i's type: feasible and monotone.
inline ExPostAllocation<double> random_monotone_allocation(std::mt19937_64& rng, const AuctionInstance& instance) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VectorX<double>> strength;
  for (const auto& b : instance.bidders()) {
    VectorX<double> s(b.size());
    double level = unit(rng) < 0.3 ? 0.0 : unit(rng);
    for (Index k = 0; k < b.size(); ++k) {
      s[k] = level;
      level += unit(rng) < 0.25 ? 0.0 : 2.0 * unit(rng);
    }
    strength.push_back(std::move(s));
  }
  const auto& space = instance.space();
  ExPostAllocation<double> x(instance.num_bidders(), instance.num_profiles());
  for (Index p = 0; p < instance.num_profiles(); ++p) {
    double total = 1.0;
    for (Index i = 0; i < instance.num_bidders(); ++i) total += strength[static_cast<std::size_t>(i)][space.digit(p, i)];
    for (Index i = 0; i < instance.num_bidders(); ++i) {
      x(i, p) = strength[static_cast<std::size_t>(i)][space.digit(p, i)] / total;
    }
  }
  return x;
}

/// Perceived payment built by binding each downward-adjacent IC constraint:
/// q(z_0) = z_0 x(z_0), q(z_k) = q(z_{k-1}) + z_k (x(z_k) - x(z_{k-1})).
inline double chain_payment(const TypeSpace<double>& z, const std::vector<double>& x, Index level) {
  double q = z[0] * x[0];
  for (Index k = 1; k <= level; ++k) q += z[k] * (x[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k - 1)]);
  return q;
}

/// Virtual value from the revenue-curve identity R(k) = z_k (1 - F_{k-1}):
/// phi_k f_k = R(k) - R(k+1) with R(K) = 0 evaluated at the clamped next type.
inline std::vector<double> revenue_curve_virtual_values(const Bidder<double>& bidder) {
  const Index K = bidder.size();
  std::vector<double> tail(static_cast<std::size_t>(K + 1), 0.0);
  for (Index k = K; k-- > 0;) tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k + 1)] + bidder.distribution.pmf(k);
  std::vector<double> phi(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const double here = bidder.types[k] * tail[static_cast<std::size_t>(k)];
    const double next = bidder.types.next(k) * tail[static_cast<std::size_t>(k + 1)];
    phi[static_cast<std::size_t>(k)] = (here - next) / bidder.distribution.pmf(k);
  }
  return phi;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace test_support
