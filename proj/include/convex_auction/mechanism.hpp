#pragma once

#include "convex_auction/allocation.hpp"
#include "convex_auction/core.hpp"
#include "convex_auction/payments.hpp"
#include "convex_auction/virtual_values.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace convex_auction {

/// How an actual payment p turns into the perceived cost in a bidder's utility.
enum class CostModel { linear, quadratic };

enum class ObjectiveKind {
  revenue_robust,
  revenue_bayesian,
  pseudo_surplus,
  heuristic_lower_bound,
  ex_ante_bound,
  exact_oracle,
  surplus,
};

std::string_view to_string(ObjectiveKind kind);
std::string_view to_string(CostModel cost);
ObjectiveKind parse_objective_kind(std::string_view name);
CostModel parse_cost_model(std::string_view name);

/// Allocation rule plus whichever payment rules support it.
///
/// Robust mechanisms carry ex-post payments p_i(v); Bayesian mechanisms carry
/// the interim allocation and per-type payments h_i(v_i). A mechanism built
/// from an ex-ante relaxation has no ex-post allocation (zero-sized table).
struct Mechanism {
  std::string provenance;
  CostModel cost = CostModel::quadratic;
  ExPostAllocation<double> allocation;
  std::optional<RobustPaymentRule<double>> robust_payments;
  std::optional<InterimAllocation<double>> interim_allocation;
  std::optional<InterimPaymentRule<double>> interim_payments;

  bool has_ex_post_allocation() const { return allocation.num_profiles() > 0; }
  bool is_bayesian() const { return interim_payments.has_value(); }
  bool has_payments() const { return robust_payments.has_value() || interim_payments.has_value(); }

  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

enum class Constraint { ic, ir, bic, bir, xp, xa, bounds };

std::string_view to_string(Constraint c);
Constraint parse_constraint(std::string_view name);
std::vector<Constraint> parse_constraints(std::string_view comma_separated);

struct ConstraintCheck {
  Constraint constraint = Constraint::ic;
  bool checked = false;
  bool passed = true;
  double worst_violation = 0.0;
  std::string note;
};

struct VerificationReport {
  std::vector<ConstraintCheck> checks;

  bool passed() const;
  const ConstraintCheck* find(Constraint c) const;
};

struct MechanismReport {
  double objective_value = 0.0;
  ObjectiveKind kind = ObjectiveKind::revenue_robust;
  std::optional<double> revenue;
  VerificationReport verification;
  std::vector<bool> regular;
  std::string warning;
  double runtime_ms = 0.0;
};

struct PipelineResult {
  Mechanism mechanism;
  MechanismReport report;
};

enum class AllocationMethod { greedy, closed_form };

struct PipelineOptions {
  AllocationMethod method = AllocationMethod::closed_form;
  GreedyConfig greedy{};
  bool verify = true;
};

/// Applies `score_to_alloc` to every profile's score vector, in parallel.
/// `scores(i, p)` gives bidder i's score in profile p.
template <typename Scores, typename Engine>
ExPostAllocation<double> allocate_profiles(const AuctionInstance& instance, Scores&& scores, Engine&& engine);

PipelineResult surplus_maximizer(const AuctionInstance& instance);
PipelineResult pseudo_surplus_maximizer(const AuctionInstance& instance, const PipelineOptions& options = {});
PipelineResult virtual_surplus_maximizer(const AuctionInstance& instance);
PipelineResult heuristic_lb_rrm(const AuctionInstance& instance, const PipelineOptions& options = {});
PipelineResult heuristic_brm(const AuctionInstance& instance, const PipelineOptions& options = {});

struct ExAnteResult {
  ExAnteSolution<double> solution;
  Mechanism mechanism;
  MechanismReport report;
};

/// Bayesian h-payments supported by the ex-ante closed-form interim rule.
ExAnteResult ex_ante_mechanism(const AuctionInstance& instance, bool truncate);

struct BoundCheck {
  std::string name;
  bool checked = false;
  bool passed = true;
  double slack = 0.0;
};

/// Upper and lower revenue bounds evaluated on a mechanism's allocation.
struct BoundReport {
  double revenue = 0.0;
  VectorX<double> revenue_per_bidder;
  double surplus = 0.0;
  double virtual_surplus = 0.0;
  double robust_pseudo_surplus = 0.0;
  double bayesian_pseudo_surplus = 0.0;
  double virtual_sqrt_upper = 0.0;
  VectorX<double> virtual_sqrt_upper_per_bidder;
  double heuristic_lb_value = 0.0;
  std::vector<BoundCheck> checks;

  bool passed() const;
};

BoundReport bound_report(const AuctionInstance& instance, const Mechanism& mechanism,
                         double tolerance = kDefaultTolerance);

/// E[sum_i sqrt(c_i(v) x_i(v))] for an ex-post allocation and scores c_i(v) = s_i[type].
double expected_sqrt_objective(const AuctionInstance& instance, const ExPostAllocation<double>& alloc,
                               const std::vector<VectorX<double>>& per_type_scores);

}  // namespace convex_auction

#include "convex_auction/parallel.hpp"

namespace convex_auction {

template <typename Scores, typename Engine>
ExPostAllocation<double> allocate_profiles(const AuctionInstance& instance, Scores&& scores, Engine&& engine) {
  const Index n = instance.num_bidders();
  ExPostAllocation<double> alloc(n, instance.num_profiles());
  parallel_for(instance.num_profiles(), [&](Index p) {
    VectorX<double> c(n);
    for (Index i = 0; i < n; ++i) c[i] = scores(i, p);
    alloc.table.col(p) = engine(c);
  });
  return alloc;
}

}  // namespace convex_auction
