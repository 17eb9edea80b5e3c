#include "convex_auction/mechanism.hpp"

#include "convex_auction/verify.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace convex_auction {

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::revenue_robust: return "revenue_robust";
    case ObjectiveKind::revenue_bayesian: return "revenue_bayesian";
    case ObjectiveKind::pseudo_surplus: return "pseudo_surplus";
    case ObjectiveKind::heuristic_lower_bound: return "heuristic_lower_bound";
    case ObjectiveKind::ex_ante_bound: return "ex_ante_bound";
    case ObjectiveKind::exact_oracle: return "exact_oracle";
    case ObjectiveKind::surplus: return "surplus";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  for (auto kind : {ObjectiveKind::revenue_robust, ObjectiveKind::revenue_bayesian, ObjectiveKind::pseudo_surplus,
                    ObjectiveKind::heuristic_lower_bound, ObjectiveKind::ex_ante_bound, ObjectiveKind::exact_oracle,
                    ObjectiveKind::surplus}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown objective kind: " + std::string(name));
}

std::string_view to_string(CostModel cost) { return cost == CostModel::linear ? "linear" : "quadratic"; }

CostModel parse_cost_model(std::string_view name) {
  if (name == "linear") return CostModel::linear;
  if (name == "quadratic") return CostModel::quadratic;
  throw std::invalid_argument("unknown cost model: " + std::string(name));
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::ic: return "ic";
    case Constraint::ir: return "ir";
    case Constraint::bic: return "bic";
    case Constraint::bir: return "bir";
    case Constraint::xp: return "xp";
    case Constraint::xa: return "xa";
    case Constraint::bounds: return "bounds";
  }
  return "unknown";
}

Constraint parse_constraint(std::string_view name) {
  for (auto c : {Constraint::ic, Constraint::ir, Constraint::bic, Constraint::bir, Constraint::xp, Constraint::xa,
                 Constraint::bounds}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown constraint: " + std::string(name));
}

std::vector<Constraint> parse_constraints(std::string_view list) {
  std::vector<Constraint> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    auto token = list.substr(start, comma - start);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    if (!token.empty()) out.push_back(parse_constraint(token));
    start = comma + 1;
  }
  return out;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.passed; });
}

const ConstraintCheck* VerificationReport::find(Constraint c) const {
  for (const auto& check : checks) {
    if (check.constraint == c) return &check;
  }
  return nullptr;
}

bool BoundReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<VectorX<double>> type_values(const AuctionInstance& instance) {
  std::vector<VectorX<double>> out;
  for (const auto& b : instance.bidders()) out.push_back(b.types.values());
  return out;
}

template <typename Engine>
ExPostAllocation<double> allocate_by_type_scores(const AuctionInstance& instance,
                                                 const std::vector<VectorX<double>>& scores, Engine&& engine) {
  const auto& space = instance.space();
  return allocate_profiles(
      instance, [&](Index i, Index p) { return scores[static_cast<std::size_t>(i)][space.digit(p, i)]; },
      std::forward<Engine>(engine));
}

ExPostAllocation<double> allocate_concave(const AuctionInstance& instance, const std::vector<VectorX<double>>& scores,
                                          const PipelineOptions& options) {
  if (options.method == AllocationMethod::greedy) {
    const GreedyConfig config = options.greedy;
    config.steps();
    return allocate_by_type_scores(instance, scores, [&](const VectorX<double>& c) { return eqp_solver(c, config); });
  }
  const double alpha = options.greedy.alpha;
  return allocate_by_type_scores(instance, scores,
                                 [&](const VectorX<double>& c) { return closed_form_alloc(c, alpha); });
}

// Payments for allocations that may be non-monotone: the formula is applied
// as-is and negative perceived payments are floored at zero. The verifier
// then reports the resulting IC failures.
RobustPaymentRule<double> payments_for(const ExPostAllocation<double>& alloc, const AuctionInstance& instance,
                                       CostModel cost, std::string& warning) {
  const bool monotone = check_monotone(alloc, instance).monotone;
  if (!monotone) warning += "allocation is not monotone; payments are not incentive compatible. ";
  const auto q = perceived_payment(alloc, instance, false);
  RobustPaymentRule<double> p(q.num_bidders(), q.num_profiles());
  for (Index k = 0; k < q.table.size(); ++k) {
    const double qk = monotone ? q.table.data()[k] : std::max(0.0, q.table.data()[k]);
    p.table.data()[k] = cost == CostModel::quadratic ? checked_sqrt(qk, "robust_payment") : std::max(0.0, qk);
  }
  return p;
}

InterimPaymentRule<double> interim_payments_for(const InterimAllocation<double>& interim,
                                                const AuctionInstance& instance, std::string& warning) {
  if (check_monotone(interim).monotone) return bayesian_payment(interim, instance);
  warning += "interim allocation is not monotone; payments are not Bayesian incentive compatible. ";
  const auto q = interim_perceived_payment(interim, instance);
  InterimPaymentRule<double> h;
  for (const auto& qi : q.per_bidder) h.per_bidder.push_back(qi.cwiseMax(0.0).cwiseSqrt());
  return h;
}

void annotate(MechanismReport& report, const AuctionInstance& instance, const Mechanism& mechanism,
              const PipelineOptions& options, const std::vector<bool>& regular) {
  report.regular = regular;
  if (!all_regular(regular)) report.warning += "virtual values are not monotone for some bidder. ";
  if (options.verify) report.verification = verify(instance, mechanism, default_constraints(mechanism));
}

std::vector<bool> all_true(const AuctionInstance& instance) {
  return std::vector<bool>(static_cast<std::size_t>(instance.num_bidders()), true);
}

}  // namespace

double expected_sqrt_objective(const AuctionInstance& instance, const ExPostAllocation<double>& alloc,
                               const std::vector<VectorX<double>>& per_type_scores) {
  const auto& space = instance.space();
  double total = 0.0;
  for (Index p = 0; p < instance.num_profiles(); ++p) {
    double inner = 0.0;
    for (Index i = 0; i < instance.num_bidders(); ++i) {
      const double c = per_type_scores[static_cast<std::size_t>(i)][space.digit(p, i)];
      inner += std::sqrt(std::max(0.0, c * alloc(i, p)));
    }
    total += instance.probability(p) * inner;
  }
  return total;
}

PipelineResult surplus_maximizer(const AuctionInstance& instance) {
  const auto start = Clock::now();
  PipelineResult out;
  auto& m = out.mechanism;
  m.provenance = "surplus";
  m.cost = CostModel::linear;
  m.allocation = allocate_by_type_scores(instance, type_values(instance),
                                         [](const VectorX<double>& c) { return pointwise_max(c); });
  m.robust_payments = payments_for(m.allocation, instance, m.cost, out.report.warning);
  out.report.kind = ObjectiveKind::surplus;
  out.report.objective_value =
      (m.allocation.table.cwiseProduct(MatrixX<double>::NullaryExpr(
           instance.num_bidders(), instance.num_profiles(), [&](Index i, Index p) { return instance.value(i, p); })) *
       instance.probabilities())
          .sum();
  out.report.revenue = expected_revenue(*m.robust_payments, instance);
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, {}, all_true(instance));
  return out;
}

PipelineResult pseudo_surplus_maximizer(const AuctionInstance& instance, const PipelineOptions& options) {
  const auto start = Clock::now();
  PipelineResult out;
  auto& m = out.mechanism;
  m.provenance = options.method == AllocationMethod::greedy ? "pseudo_surplus_greedy" : "pseudo_surplus_cf";
  const auto values = type_values(instance);
  m.allocation = allocate_concave(instance, values, options);
  m.robust_payments = payments_for(m.allocation, instance, m.cost, out.report.warning);
  out.report.kind = ObjectiveKind::pseudo_surplus;
  out.report.objective_value = expected_sqrt_objective(instance, m.allocation, values);
  out.report.revenue = expected_revenue(*m.robust_payments, instance);
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, options, all_true(instance));
  return out;
}

PipelineResult virtual_surplus_maximizer(const AuctionInstance& instance) {
  const auto start = Clock::now();
  PipelineResult out;
  auto& m = out.mechanism;
  m.provenance = "virtual_surplus";
  m.cost = CostModel::linear;
  const auto table = virtual_values(instance);
  m.allocation = allocate_by_type_scores(instance, table.phi, [](const VectorX<double>& c) { return pointwise_max(c); });
  m.robust_payments = payments_for(m.allocation, instance, m.cost, out.report.warning);
  out.report.kind = ObjectiveKind::revenue_robust;
  out.report.revenue = expected_revenue(*m.robust_payments, instance);
  out.report.objective_value = *out.report.revenue;
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, {}, is_regular(table));
  return out;
}

PipelineResult heuristic_lb_rrm(const AuctionInstance& instance, const PipelineOptions& options) {
  const auto start = Clock::now();
  PipelineResult out;
  auto& m = out.mechanism;
  m.provenance = options.method == AllocationMethod::greedy ? "heur_rrm_greedy" : "heur_rrm_cf";
  const auto table = virtual_values(instance);
  m.allocation = allocate_concave(instance, table.phi_plus, options);
  m.robust_payments = payments_for(m.allocation, instance, m.cost, out.report.warning);
  out.report.kind = ObjectiveKind::heuristic_lower_bound;
  out.report.objective_value = expected_sqrt_objective(instance, m.allocation, table.phi_plus);
  out.report.revenue = expected_revenue(*m.robust_payments, instance);
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, options, is_regular(table));
  return out;
}

PipelineResult heuristic_brm(const AuctionInstance& instance, const PipelineOptions& options) {
  const auto start = Clock::now();
  PipelineResult out;
  auto& m = out.mechanism;
  m.provenance = options.method == AllocationMethod::greedy ? "heur_brm_greedy" : "heur_brm_cf";
  const auto table = virtual_values(instance);
  m.allocation = allocate_concave(instance, table.phi_plus, options);
  m.interim_allocation = interim_collapse(m.allocation, instance);
  m.interim_payments = interim_payments_for(*m.interim_allocation, instance, out.report.warning);
  out.report.kind = ObjectiveKind::revenue_bayesian;
  out.report.revenue = expected_revenue(*m.interim_payments, instance);
  out.report.objective_value = *out.report.revenue;
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, options, is_regular(table));
  return out;
}

ExAnteResult ex_ante_mechanism(const AuctionInstance& instance, bool truncate) {
  const auto start = Clock::now();
  ExAnteResult out;
  const auto table = virtual_values(instance);
  out.solution = ex_ante_closed_form(instance, table, truncate);
  auto& m = out.mechanism;
  m.provenance = truncate ? "ex_ante_trunc" : "ex_ante";
  m.interim_allocation = out.solution.interim;
  m.interim_payments = interim_payments_for(*m.interim_allocation, instance, out.report.warning);
  out.report.kind = ObjectiveKind::ex_ante_bound;
  out.report.revenue = expected_revenue(*m.interim_payments, instance);
  out.report.objective_value = *out.report.revenue;
  out.report.runtime_ms = elapsed_ms(start);
  annotate(out.report, instance, m, {}, is_regular(table));
  return out;
}

namespace {

void add_check(BoundReport& report, std::string name, double lhs, double rhs, double tolerance) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  report.checks.push_back({std::move(name), true, lhs <= rhs + tolerance * scale, rhs - lhs});
}

}  // namespace

BoundReport bound_report(const AuctionInstance& instance, const Mechanism& mechanism, double tolerance) {
  if (!mechanism.has_payments()) throw std::invalid_argument("bound_report: mechanism has no payment rule");
  const auto table = virtual_values(instance);
  const Index n = instance.num_bidders();
  BoundReport out;

  const InterimAllocation<double> interim = mechanism.interim_allocation
                                                ? *mechanism.interim_allocation
                                                : interim_collapse(mechanism.allocation, instance);

  if (mechanism.robust_payments) {
    out.revenue_per_bidder = expected_revenue_per_bidder(*mechanism.robust_payments, instance);
  } else {
    out.revenue_per_bidder.resize(n);
    for (Index i = 0; i < n; ++i) {
      out.revenue_per_bidder[i] = instance.bidder(i).distribution.pmf().dot(mechanism.interim_payments->bidder(i));
    }
  }
  out.revenue = out.revenue_per_bidder.sum();

  out.virtual_sqrt_upper_per_bidder.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& f = instance.bidder(i).distribution.pmf();
    const auto& z = instance.bidder(i).types.values();
    const auto& x = interim.bidder(i);
    const auto& phi = table.phi[static_cast<std::size_t>(i)];
    out.surplus += f.dot(z.cwiseProduct(x));
    const double vs = f.dot(phi.cwiseProduct(x));
    out.virtual_surplus += vs;
    out.virtual_sqrt_upper_per_bidder[i] = std::sqrt(std::max(0.0, vs));
    out.bayesian_pseudo_surplus += f.dot(z.cwiseProduct(x).cwiseMax(0.0).cwiseSqrt());
    if (!mechanism.has_ex_post_allocation()) {
      out.heuristic_lb_value +=
          f.dot(table.phi_plus[static_cast<std::size_t>(i)].cwiseProduct(x).cwiseMax(0.0).cwiseSqrt());
    }
  }
  out.virtual_sqrt_upper = out.virtual_sqrt_upper_per_bidder.sum();
  if (mechanism.has_ex_post_allocation()) {
    out.robust_pseudo_surplus = expected_sqrt_objective(instance, mechanism.allocation, type_values(instance));
    out.heuristic_lb_value = expected_sqrt_objective(instance, mechanism.allocation, table.phi_plus);
  }

  if (mechanism.cost == CostModel::linear) {
    add_check(out, "revenue <= surplus", out.revenue, out.surplus, tolerance);
    const double scale = std::max(1.0, std::abs(out.revenue));
    out.checks.push_back({"revenue == virtual surplus", true,
                          std::abs(out.revenue - out.virtual_surplus) <= tolerance * scale,
                          out.virtual_surplus - out.revenue});
    return out;
  }

  if (mechanism.has_ex_post_allocation()) {
    if (!mechanism.is_bayesian()) {
      add_check(out, "revenue <= robust pseudo-surplus", out.revenue, out.robust_pseudo_surplus, tolerance);
    }
    add_check(out, "robust pseudo-surplus <= bayesian pseudo-surplus", out.robust_pseudo_surplus,
              out.bayesian_pseudo_surplus, tolerance);
  }
  add_check(out, "revenue <= bayesian pseudo-surplus", out.revenue, out.bayesian_pseudo_surplus, tolerance);
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (Index i = 0; i < n; ++i) {
    const double lhs = out.revenue_per_bidder[i];
    const double rhs = out.virtual_sqrt_upper_per_bidder[i];
    worst = std::min(worst, rhs - lhs);
    ok = ok && lhs <= rhs + tolerance * std::max({1.0, lhs, rhs});
  }
  out.checks.push_back({"bidder revenue <= sqrt(expected virtual surplus)", true, ok, worst});
  return out;
}

}  // namespace convex_auction
