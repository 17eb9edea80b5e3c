#pragma once

#include "convex_auction/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace convex_auction {

/// Raised when a payment formula is evaluated on an allocation it does not
/// apply to (a non-monotone rule producing a negative radicand).
class PaymentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Radicands in [-kRadicandSlack, 0) are treated as 0.
inline constexpr double kRadicandSlack = 1e-9;

template <typename Scalar>
Scalar checked_sqrt(Scalar radicand, const char* what) {
  using std::sqrt;
  if (radicand >= Scalar(0)) return sqrt(radicand);
  if (radicand >= Scalar(-kRadicandSlack)) return Scalar(0);
  throw PaymentError(std::string(what) + ": negative perceived payment " +
                     std::to_string(static_cast<double>(radicand)) + " (allocation is not monotone)");
}

/// q_l = z_l x_l - sum_{j<l} (z_{j+1} - z_j) x_j along one chain of types.
/// `x(k)` returns the allocation at type index k.
template <typename Scalar, typename Alloc>
void myerson_chain(const TypeSpace<Scalar>& z, Alloc&& x, VectorX<Scalar>& q) {
  const Index K = z.size();
  q.resize(K);
  Scalar rent(0);
  for (Index l = 0; l < K; ++l) {
    const Scalar xl = x(l);
    q[l] = z[l] * xl - rent;
    rent += z.gap(l) * xl;
  }
}

struct MonotonicityCheck {
  bool monotone = true;
  double worst_violation = 0.0;
};

/// Checks x_i(z_l, v_-i) >= x_i(z_{l-1}, v_-i) - tolerance everywhere.
template <typename Scalar>
MonotonicityCheck check_monotone(const ExPostAllocation<Scalar>& alloc, const BasicAuctionInstance<Scalar>& instance,
                                 double tolerance = kDefaultTolerance) {
  MonotonicityCheck out;
  const auto& space = instance.space();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const Index K = space.types(i);
    const Index s = space.stride(i);
    space.for_each_chain(i, [&](Index base) {
      for (Index l = 1; l < K; ++l) {
        const double drop = static_cast<double>(alloc(i, base + (l - 1) * s) - alloc(i, base + l * s));
        out.worst_violation = std::max(out.worst_violation, drop);
      }
    });
  }
  out.monotone = out.worst_violation <= tolerance;
  return out;
}

template <typename Scalar>
MonotonicityCheck check_monotone(const InterimAllocation<Scalar>& interim, double tolerance = kDefaultTolerance) {
  MonotonicityCheck out;
  for (const auto& x : interim.per_bidder) {
    for (Index l = 1; l < x.size(); ++l) {
      out.worst_violation = std::max(out.worst_violation, static_cast<double>(x[l - 1] - x[l]));
    }
  }
  out.monotone = out.worst_violation <= tolerance;
  return out;
}

/// Perceived payments q_i(v) characterizing IC and IR for a monotone rule.
///
/// Throws PaymentError for a non-monotone allocation unless `require_monotone`
/// is false, in which case the formula is evaluated as-is.
template <typename Scalar>
PerceivedPayments<Scalar> perceived_payment(const ExPostAllocation<Scalar>& alloc,
                                            const BasicAuctionInstance<Scalar>& instance,
                                            bool require_monotone = true) {
  if (alloc.num_bidders() != instance.num_bidders() || alloc.num_profiles() != instance.num_profiles()) {
    throw std::invalid_argument("perceived_payment: allocation does not match instance");
  }
  if (require_monotone) {
    const auto check = check_monotone(alloc, instance);
    if (!check.monotone) {
      throw PaymentError("perceived_payment: allocation is not monotone (worst drop " +
                         std::to_string(check.worst_violation) + ")");
    }
  }
  const auto& space = instance.space();
  PerceivedPayments<Scalar> q(instance.num_bidders(), instance.num_profiles());
  VectorX<Scalar> chain;
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const Index s = space.stride(i);
    const auto& z = instance.bidder(i).types;
    space.for_each_chain(i, [&](Index base) {
      myerson_chain(z, [&](Index k) { return alloc(i, base + k * s); }, chain);
      for (Index k = 0; k < z.size(); ++k) q(i, base + k * s) = chain[k];
    });
  }
  return q;
}

/// p_i(v) = sqrt(q_i(v)): actual payments when the perceived cost is p^2.
template <typename Scalar>
RobustPaymentRule<Scalar> robust_payment(const ExPostAllocation<Scalar>& alloc,
                                         const BasicAuctionInstance<Scalar>& instance) {
  const auto q = perceived_payment(alloc, instance);
  RobustPaymentRule<Scalar> p(q.num_bidders(), q.num_profiles());
  for (Index i = 0; i < q.num_bidders(); ++i) {
    for (Index v = 0; v < q.num_profiles(); ++v) p(i, v) = checked_sqrt(q(i, v), "robust_payment");
  }
  return p;
}

/// p_i(v) = q_i(v): actual payments when the perceived cost is linear.
template <typename Scalar>
RobustPaymentRule<Scalar> linear_payment(const ExPostAllocation<Scalar>& alloc,
                                         const BasicAuctionInstance<Scalar>& instance) {
  const auto q = perceived_payment(alloc, instance);
  return RobustPaymentRule<Scalar>(q.table);
}

/// x̂_i(z_k) = sum over v_-i of f_-i(v_-i) x_i(z_k, v_-i).
template <typename Scalar>
InterimAllocation<Scalar> interim_collapse(const ExPostAllocation<Scalar>& alloc,
                                           const BasicAuctionInstance<Scalar>& instance) {
  auto out = InterimAllocation<Scalar>::zeros_like(instance);
  const auto& space = instance.space();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const Index s = space.stride(i);
    space.for_each_chain(i, [&](Index base) {
      const Scalar weight = instance.others_probability(i, base);
      for (Index k = 0; k < space.types(i); ++k) out(i, k) += weight * alloc(i, base + k * s);
    });
  }
  return out;
}

/// Interim perceived payments q̂_i(z_l) from the Myerson formula on x̂_i.
template <typename Scalar>
InterimTable<Scalar, PerceivedPaymentTag> interim_perceived_payment(const InterimAllocation<Scalar>& interim,
                                                                    const BasicAuctionInstance<Scalar>& instance) {
  InterimTable<Scalar, PerceivedPaymentTag> out;
  VectorX<Scalar> chain;
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const auto& x = interim.bidder(i);
    myerson_chain(instance.bidder(i).types, [&](Index k) { return x[k]; }, chain);
    out.per_bidder.push_back(chain);
  }
  return out;
}

/// h_i(z_l) = sqrt(q̂_i(z_l)): deterministic per-type payments.
template <typename Scalar>
InterimPaymentRule<Scalar> bayesian_payment(const InterimAllocation<Scalar>& interim,
                                            const BasicAuctionInstance<Scalar>& instance) {
  if (interim.num_bidders() != instance.num_bidders()) {
    throw std::invalid_argument("bayesian_payment: interim allocation does not match instance");
  }
  const auto check = check_monotone(interim);
  if (!check.monotone) {
    throw PaymentError("bayesian_payment: interim allocation is not monotone (worst drop " +
                       std::to_string(check.worst_violation) + ")");
  }
  const auto q = interim_perceived_payment(interim, instance);
  InterimPaymentRule<Scalar> h;
  for (const auto& qi : q.per_bidder) {
    VectorX<Scalar> hi(qi.size());
    for (Index k = 0; k < qi.size(); ++k) hi[k] = checked_sqrt(qi[k], "bayesian_payment");
    h.per_bidder.push_back(std::move(hi));
  }
  return h;
}

/// sum_v f(v) sum_i p_i(v).
template <typename Scalar>
Scalar expected_revenue(const RobustPaymentRule<Scalar>& rule, const BasicAuctionInstance<Scalar>& instance) {
  return (rule.table * instance.probabilities()).sum();
}

/// sum_i sum_k f_{i,k} h_i(z_k).
template <typename Scalar>
Scalar expected_revenue(const InterimPaymentRule<Scalar>& rule, const BasicAuctionInstance<Scalar>& instance) {
  Scalar total(0);
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    total += instance.bidder(i).distribution.pmf().dot(rule.bidder(i));
  }
  return total;
}

/// E[p_i] per bidder for an ex-post rule.
template <typename Scalar>
VectorX<Scalar> expected_revenue_per_bidder(const RobustPaymentRule<Scalar>& rule,
                                            const BasicAuctionInstance<Scalar>& instance) {
  return rule.table * instance.probabilities();
}

}  // namespace convex_auction
