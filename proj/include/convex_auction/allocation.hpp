#pragma once

#include "convex_auction/core.hpp"
#include "convex_auction/virtual_values.hpp"

#include <cmath>
#include <stdexcept>

namespace convex_auction {

/// Winner-take-all on strictly positive scores, ties split evenly.
template <typename Derived>
VectorX<typename Derived::Scalar> pointwise_max(const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> x = VectorX<Scalar>::Zero(c.size());
  if (c.size() == 0) return x;
  const Scalar best = c.maxCoeff();
  if (!(best > Scalar(0))) return x;
  Index winners = 0;
  for (Index i = 0; i < c.size(); ++i) winners += c[i] == best ? 1 : 0;
  for (Index i = 0; i < c.size(); ++i) {
    if (c[i] == best) x[i] = Scalar(1) / Scalar(winners);
  }
  return x;
}

struct GreedyConfig {
  double epsilon = 1e-3;
  double alpha = 0.5;
  double tie_tolerance = 1e-12;

  /// Number of increments 1/epsilon; throws unless epsilon divides 1.
  long steps() const {
    if (!(epsilon > 0.0) || epsilon > 1.0) {
      throw std::invalid_argument("GreedyConfig: epsilon must lie in (0, 1]");
    }
    const double inverse = 1.0 / epsilon;
    const double rounded = std::round(inverse);
    if (std::abs(inverse - rounded) > 1e-9 * rounded) {
      throw std::invalid_argument("GreedyConfig: 1/epsilon must be an integer");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
      throw std::invalid_argument("GreedyConfig: alpha must lie in (0, 1)");
    }
    return static_cast<long>(rounded);
  }
};

/// Equi-marginal greedy for max sum_i sqrt(c_i^+ x_i) s.t. sum_i x_i <= 1.
///
/// Each of the 1/epsilon rounds gives epsilon/|M| to every bidder in the
/// argmax set M of marginal gains sqrt(c_i^+)(sqrt(x_i + eps) - sqrt(x_i)).
template <typename Derived>
VectorX<typename Derived::Scalar> eqp_solver(const Eigen::MatrixBase<Derived>& c, const GreedyConfig& config = {}) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const long steps = config.steps();
  const Index n = c.size();
  VectorX<Scalar> x = VectorX<Scalar>::Zero(n);
  if (n == 0 || !(c.maxCoeff() > Scalar(0))) return x;

  const Scalar eps(config.epsilon);
  const VectorX<Scalar> root = c.cwiseMax(Scalar(0)).cwiseSqrt();
  VectorX<Scalar> gain(n);
  for (long s = 0; s < steps; ++s) {
    for (Index i = 0; i < n; ++i) gain[i] = root[i] * (sqrt(x[i] + eps) - sqrt(x[i]));
    const Scalar best = gain.maxCoeff();
    Index members = 0;
    for (Index i = 0; i < n; ++i) {
      if (c[i] > Scalar(0) && best - gain[i] <= Scalar(config.tie_tolerance)) ++members;
    }
    const Scalar share = eps / Scalar(members);
    for (Index i = 0; i < n; ++i) {
      if (c[i] > Scalar(0) && best - gain[i] <= Scalar(config.tie_tolerance)) x[i] += share;
    }
  }
  return x;
}

/// Optimum of max sum_i (c_i^+)^alpha x_i^(1-alpha) over the simplex:
/// x_j proportional to (c_j^+)^(alpha/(1-alpha)).
template <typename Derived>
VectorX<typename Derived::Scalar> closed_form_alloc(const Eigen::MatrixBase<Derived>& c, double alpha = 0.5) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("closed_form_alloc: alpha must lie in (0, 1)");
  }
  VectorX<Scalar> x = VectorX<Scalar>::Zero(c.size());
  if (c.size() == 0) return x;
  const Scalar top = c.maxCoeff();
  if (!(top > Scalar(0))) return x;
  const Scalar exponent(alpha / (1.0 - alpha));
  for (Index i = 0; i < c.size(); ++i) {
    x[i] = c[i] > Scalar(0) ? pow(c[i] / top, exponent) : Scalar(0);
  }
  return x / x.sum();
}

template <typename Scalar>
struct ExAnteSolution {
  InterimAllocation<Scalar> interim;
  Scalar normalizer{};
  bool truncated = false;
};

/// Interim allocation proportional to positive virtual values, normalized so
/// the ex-ante supply constraint binds; optionally capped at 1 afterwards.
template <typename Scalar>
ExAnteSolution<Scalar> ex_ante_closed_form(const BasicAuctionInstance<Scalar>& instance,
                                           const VirtualValueTable<Scalar>& table, bool truncate) {
  ExAnteSolution<Scalar> out;
  out.truncated = truncate;
  out.interim = InterimAllocation<Scalar>::zeros_like(instance);
  Scalar total(0);
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    total += instance.bidder(i).distribution.pmf().dot(table.phi_plus[static_cast<std::size_t>(i)]);
  }
  out.normalizer = total;
  if (!(total > Scalar(0))) return out;
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    VectorX<Scalar> x = table.phi_plus[static_cast<std::size_t>(i)] / total;
    if (truncate) x = x.cwiseMin(Scalar(1));
    out.interim.per_bidder[static_cast<std::size_t>(i)] = std::move(x);
  }
  return out;
}

}  // namespace convex_auction
