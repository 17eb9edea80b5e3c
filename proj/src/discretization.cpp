#include "convex_auction/discretization.hpp"

#include "convex_auction/payments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace convex_auction {

long grid_units(double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("grid step must lie in (0, 1]");
  const double inverse = 1.0 / delta;
  const double rounded = std::round(inverse);
  if (std::abs(inverse - rounded) > 1e-9 * rounded) {
    throw std::invalid_argument("grid step must divide 1 exactly");
  }
  return static_cast<long>(rounded);
}

namespace {

struct Candidate {
  Index bidder;
  Index profile;
  double fraction;
};

}  // namespace

RoundingResult round_allocation(const ExPostAllocation<double>& alloc, const AuctionInstance& instance, double delta,
                                MonotoneRule rule) {
  const long units = grid_units(delta);
  const Index n = alloc.num_bidders();
  const Index P = alloc.num_profiles();
  const auto& space = instance.space();
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> k(n, P);
  std::vector<Candidate> candidates;
  for (Index p = 0; p < P; ++p) {
    for (Index i = 0; i < n; ++i) {
      const double y = alloc(i, p) * static_cast<double>(units);
      const double nearest = std::round(y);
      if (std::abs(y - nearest) <= 1e-9) {
        k(i, p) = static_cast<long>(nearest);
        continue;
      }
      const double floor = std::floor(y);
      k(i, p) = static_cast<long>(floor);
      if (y - floor > 0.5 + 1e-9) candidates.push_back({i, p, y - floor});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.fraction > b.fraction; });

  Eigen::Matrix<long, Eigen::Dynamic, 1> used = k.colwise().sum().transpose();
  std::vector<bool> raised(candidates.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (raised[c]) continue;
      const Index i = candidates[c].bidder;
      const Index p = candidates[c].profile;
      if (used[p] + 1 > units) continue;
      if (rule == MonotoneRule::ex_post) {
        const Index d = space.digit(p, i);
        if (d + 1 < space.types(i) && k(i, p) + 1 > k(i, space.with_type(p, i, d + 1))) continue;
      }
      ++k(i, p);
      ++used[p];
      raised[c] = true;
      changed = true;
    }
  }

  RoundingResult out;
  out.allocation = ExPostAllocation<double>(k.cast<double>() / static_cast<double>(units));
  out.report.delta = delta;
  out.report.residuals = alloc.table - out.allocation.table;
  out.report.max_abs_residual = out.report.residuals.size() > 0 ? out.report.residuals.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

DiscretizationReport discretization_gap(const AuctionInstance& instance, const ExPostAllocation<double>& alloc_star,
                                        double delta) {
  auto rounded = round_allocation(alloc_star, instance, delta, MonotoneRule::ex_post);
  auto& report = rounded.report;
  const auto q_star = perceived_payment(alloc_star, instance);
  const auto q = perceived_payment(rounded.allocation, instance);
  const auto p_star = robust_payment(alloc_star, instance);
  const auto p = robust_payment(rounded.allocation, instance);

  report.worst_payment_bound_excess = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const auto& z = instance.bidder(i).types;
    for (Index v = 0; v < instance.num_profiles(); ++v) {
      const double gap = std::abs(q_star(i, v) - q(i, v));
      const double bound = delta * (2.0 * z[instance.space().digit(v, i)] - z[0]);
      report.perceived_payment_gap = std::max(report.perceived_payment_gap, gap);
      report.worst_payment_bound_excess = std::max(report.worst_payment_bound_excess, gap - bound);
    }
  }
  report.revenue_star = expected_revenue(p_star, instance);
  report.revenue_rounded = expected_revenue(p, instance);
  report.revenue_gap = std::abs(report.revenue_star - report.revenue_rounded);
  return report;
}

}  // namespace convex_auction
