#include "convex_auction/verify.hpp"

#include <algorithm>
#include <cmath>

namespace convex_auction {
namespace {

double cost_of(CostModel cost, double p) { return cost == CostModel::quadratic ? p * p : p; }

ConstraintCheck skipped(Constraint c, const char* note) {
  ConstraintCheck out;
  out.constraint = c;
  out.checked = false;
  out.passed = true;
  out.note = note;
  return out;
}

void finish(ConstraintCheck& check, double tolerance) {
  check.checked = true;
  check.passed = check.worst_violation <= tolerance;
}

// Payment charged to bidder i at profile p.
double ex_post_payment(const AuctionInstance& instance, const Mechanism& m, Index i, Index p) {
  if (m.robust_payments) return (*m.robust_payments)(i, p);
  return (*m.interim_payments)(i, instance.space().digit(p, i));
}

ConstraintCheck check_ex_post(const AuctionInstance& instance, const Mechanism& m, Constraint which) {
  if (!m.has_ex_post_allocation()) return skipped(which, "no ex-post allocation");
  if (!m.has_payments()) return skipped(which, "no payment rule");
  ConstraintCheck out;
  out.constraint = which;
  const auto& space = instance.space();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const Index K = space.types(i);
    const Index s = space.stride(i);
    const auto& z = instance.bidder(i).types;
    space.for_each_chain(i, [&](Index base) {
      for (Index a = 0; a < K; ++a) {
        const double truthful =
            z[a] * m.allocation(i, base + a * s) - cost_of(m.cost, ex_post_payment(instance, m, i, base + a * s));
        if (which == Constraint::ir) {
          out.worst_violation = std::max(out.worst_violation, -truthful);
          continue;
        }
        for (Index b = 0; b < K; ++b) {
          const double deviate =
              z[a] * m.allocation(i, base + b * s) - cost_of(m.cost, ex_post_payment(instance, m, i, base + b * s));
          out.worst_violation = std::max(out.worst_violation, deviate - truthful);
        }
      }
    });
  }
  return out;
}

// Interim allocation and interim perceived cost per bidder per type.
struct InterimView {
  InterimAllocation<double> x;
  std::vector<VectorX<double>> cost;
};

InterimView interim_view(const AuctionInstance& instance, const Mechanism& m) {
  InterimView view;
  if (m.interim_allocation) {
    view.x = *m.interim_allocation;
  } else {
    view.x = interim_collapse(m.allocation, instance);
  }
  const auto& space = instance.space();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    VectorX<double> c = VectorX<double>::Zero(space.types(i));
    if (m.interim_payments) {
      for (Index k = 0; k < c.size(); ++k) c[k] = cost_of(m.cost, (*m.interim_payments)(i, k));
    } else {
      const Index s = space.stride(i);
      space.for_each_chain(i, [&](Index base) {
        const double w = instance.others_probability(i, base);
        for (Index k = 0; k < c.size(); ++k) c[k] += w * cost_of(m.cost, (*m.robust_payments)(i, base + k * s));
      });
    }
    view.cost.push_back(std::move(c));
  }
  return view;
}

ConstraintCheck check_interim(const AuctionInstance& instance, const Mechanism& m, Constraint which) {
  if (!m.has_payments()) return skipped(which, "no payment rule");
  if (!m.has_ex_post_allocation() && !m.interim_allocation) return skipped(which, "no allocation");
  const InterimView view = interim_view(instance, m);
  ConstraintCheck out;
  out.constraint = which;
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const auto& z = instance.bidder(i).types;
    const auto& x = view.x.bidder(i);
    const auto& c = view.cost[static_cast<std::size_t>(i)];
    for (Index a = 0; a < z.size(); ++a) {
      const double truthful = z[a] * x[a] - c[a];
      if (which == Constraint::bir) {
        out.worst_violation = std::max(out.worst_violation, -truthful);
        continue;
      }
      for (Index b = 0; b < z.size(); ++b) {
        out.worst_violation = std::max(out.worst_violation, z[a] * x[b] - c[b] - truthful);
      }
    }
  }
  return out;
}

ConstraintCheck check_xp(const Mechanism& m) {
  if (!m.has_ex_post_allocation()) return skipped(Constraint::xp, "no ex-post allocation");
  ConstraintCheck out;
  out.constraint = Constraint::xp;
  for (Index p = 0; p < m.allocation.num_profiles(); ++p) {
    out.worst_violation = std::max(out.worst_violation, m.allocation.table.col(p).sum() - 1.0);
  }
  return out;
}

ConstraintCheck check_xa(const AuctionInstance& instance, const Mechanism& m) {
  if (!m.has_ex_post_allocation() && !m.interim_allocation) return skipped(Constraint::xa, "no allocation");
  const auto x = m.interim_allocation ? *m.interim_allocation : interim_collapse(m.allocation, instance);
  double total = 0.0;
  for (Index i = 0; i < instance.num_bidders(); ++i) total += instance.bidder(i).distribution.pmf().dot(x.bidder(i));
  ConstraintCheck out;
  out.constraint = Constraint::xa;
  out.worst_violation = std::max(0.0, total - 1.0);
  return out;
}

ConstraintCheck check_bounds(const Mechanism& m) {
  ConstraintCheck out;
  out.constraint = Constraint::bounds;
  auto range = [&](double value) {
    out.worst_violation = std::max({out.worst_violation, -value, value - 1.0});
  };
  for (Index k = 0; k < m.allocation.table.size(); ++k) range(m.allocation.table.data()[k]);
  if (m.interim_allocation) {
    for (const auto& x : m.interim_allocation->per_bidder) {
      for (Index k = 0; k < x.size(); ++k) range(x[k]);
    }
  }
  if (m.robust_payments) {
    const auto& t = m.robust_payments->table;
    if (t.size() > 0) out.worst_violation = std::max(out.worst_violation, -t.minCoeff());
  }
  if (m.interim_payments) {
    for (const auto& h : m.interim_payments->per_bidder) {
      if (h.size() > 0) out.worst_violation = std::max(out.worst_violation, -h.minCoeff());
    }
  }
  return out;
}

}  // namespace

VerificationReport verify(const AuctionInstance& instance, const Mechanism& mechanism,
                          const std::vector<Constraint>& which, double tolerance) {
  if (mechanism.has_ex_post_allocation() && (mechanism.allocation.num_bidders() != instance.num_bidders() ||
                                             mechanism.allocation.num_profiles() != instance.num_profiles())) {
    throw std::invalid_argument("verify: allocation table does not match instance");
  }
  VerificationReport report;
  for (Constraint c : which) {
    ConstraintCheck check;
    switch (c) {
      case Constraint::ic:
      case Constraint::ir:
        check = check_ex_post(instance, mechanism, c);
        break;
      case Constraint::bic:
      case Constraint::bir:
        check = check_interim(instance, mechanism, c);
        break;
      case Constraint::xp:
        check = check_xp(mechanism);
        break;
      case Constraint::xa:
        check = check_xa(instance, mechanism);
        break;
      case Constraint::bounds:
        check = check_bounds(mechanism);
        break;
    }
    if (check.note.empty()) finish(check, tolerance);
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::vector<Constraint> default_constraints(const Mechanism& mechanism) {
  if (!mechanism.is_bayesian()) return {Constraint::ic, Constraint::ir, Constraint::xp, Constraint::bounds};
  if (!mechanism.has_ex_post_allocation()) return {Constraint::bic, Constraint::bir, Constraint::xa};
  return {Constraint::bic, Constraint::bir, Constraint::xp, Constraint::bounds};
}

}  // namespace convex_auction
