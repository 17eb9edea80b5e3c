#pragma once

#include "convex_auction/mechanism.hpp"

#include <vector>

namespace convex_auction {

/// Evaluates every inequality of the requested constraint families.
///
/// Ex-post checks (IC, IR) use the robust payments when present, otherwise
/// the per-type payments h_i(v_i) charged at every profile. Interim checks
/// (BIC, BIR) use h_i^2 for Bayesian mechanisms and E_{v_-i}[cost(p_i)]
/// otherwise. Families that do not apply to the mechanism are reported with
/// checked = false.
VerificationReport verify(const AuctionInstance& instance, const Mechanism& mechanism,
                          const std::vector<Constraint>& which, double tolerance = kDefaultTolerance);

/// IC, IR, XP, bounds for robust mechanisms; BIC, BIR and XP (or XA without
/// an ex-post table) plus bounds for Bayesian ones.
std::vector<Constraint> default_constraints(const Mechanism& mechanism);

}  // namespace convex_auction
