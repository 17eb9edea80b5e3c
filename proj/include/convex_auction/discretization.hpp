#pragma once

#include "convex_auction/core.hpp"

namespace convex_auction {

enum class MonotoneRule {
  /// x_i(z_l, v_-i) <= x_i(z_{l+1}, v_-i) on every chain.
  ex_post,
  /// No ordering between entries of a chain.
  none,
};

struct DiscretizationReport {
  double delta = 0.0;
  /// rho = x* - rounded x, per bidder per profile.
  MatrixX<double> residuals;
  double max_abs_residual = 0.0;
  double perceived_payment_gap = 0.0;
  /// Largest |q* - q| - delta (2 z_l - z_1) over all entries; <= 0 when the bound holds.
  double worst_payment_bound_excess = 0.0;
  double revenue_gap = 0.0;
  double revenue_star = 0.0;
  double revenue_rounded = 0.0;

  bool payment_bound_holds(double tolerance = kDefaultTolerance) const {
    return worst_payment_bound_excess <= tolerance;
  }
};

struct RoundingResult {
  ExPostAllocation<double> allocation;
  DiscretizationReport report;
};

/// Units per whole item for grid step delta; throws unless 1/delta is an integer.
long grid_units(double delta);

/// Rounds every entry to floor or ceiling on the delta grid, preferring the
/// nearer point, without breaking per-profile supply or (optionally) chain
/// monotonicity.
///
/// Entries within 1e-9 units of a grid point snap to it. Remaining entries
/// start at the floor; those whose fractional part exceeds 1/2 are raised in
/// decreasing order of fractional part whenever the raise keeps the profile
/// total within supply and the entry no larger than the next type's.
RoundingResult round_allocation(const ExPostAllocation<double>& alloc, const AuctionInstance& instance, double delta,
                                MonotoneRule rule = MonotoneRule::ex_post);

/// Rounds alloc_star and compares perceived payments and quadratic-cost
/// revenue before and after.
DiscretizationReport discretization_gap(const AuctionInstance& instance, const ExPostAllocation<double>& alloc_star,
                                        double delta);

}  // namespace convex_auction
