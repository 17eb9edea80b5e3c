#include "convex_auction/oracle.hpp"

#include "convex_auction/discretization.hpp"
#include "convex_auction/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace convex_auction {

void OracleConfig::validate() const {
  if (!(grid > 0.0) || grid > 1.0) throw std::invalid_argument("OracleConfig: grid must lie in (0, 1]");
  grid_units(grid);
  if (max_profile_vars < 1) throw std::invalid_argument("OracleConfig: max_profile_vars must be positive");
}

namespace {

using Units = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;
using Triplets = std::vector<Eigen::Triplet<double>>;

bool is_robust(OracleObjective objective) { return objective != OracleObjective::bayesian_sqrt; }

// Coefficients of q_i(z_l, v_-i) on the chain starting at `base`.
void add_payment_row(const AuctionInstance& instance, Index i, Index base, Index l, Index row, double scale,
                     Triplets& out) {
  const auto& z = instance.bidder(i).types;
  const Index n = instance.num_bidders();
  const Index s = instance.space().stride(i);
  if (z[l] != 0.0) out.emplace_back(row, allocation_variable(n, i, base + l * s), scale * z[l]);
  for (Index j = 0; j < l; ++j) {
    if (z.gap(j) != 0.0) out.emplace_back(row, allocation_variable(n, i, base + j * s), -scale * z.gap(j));
  }
}

std::string too_large(const AuctionInstance& instance, const OracleConfig& config) {
  return "oracle refuses instance with " + std::to_string(instance.num_bidders() * instance.num_profiles()) +
         " allocation variables (n * |V|); the cap is " + std::to_string(config.max_profile_vars);
}

// Supply, non-negativity and monotonicity checks for unit tables.
class GridState {
 public:
  GridState(const AuctionInstance& instance, OracleObjective objective, long units)
      : instance_(instance), objective_(objective), units_(units) {}

  bool entry_ok(const Units& U, Index i, Index p) const {
    if (U(i, p) < 0 || U.col(p).sum() > units_) return false;
    if (!is_robust(objective_)) return interim_ok(U, i);
    const auto& space = instance_.space();
    const Index d = space.digit(p, i);
    if (d > 0 && U(i, space.with_type(p, i, d - 1)) > U(i, p)) return false;
    if (d + 1 < space.types(i) && U(i, space.with_type(p, i, d + 1)) < U(i, p)) return false;
    return true;
  }

  bool interim_ok(const Units& U, Index i) const {
    const VectorX<double> x = interim(U, i);
    for (Index k = 1; k < x.size(); ++k) {
      if (x[k - 1] > x[k] + 1e-12) return false;
    }
    return true;
  }

  VectorX<double> interim(const Units& U, Index i) const {
    const auto& space = instance_.space();
    VectorX<double> x = VectorX<double>::Zero(space.types(i));
    const Index s = space.stride(i);
    space.for_each_chain(i, [&](Index base) {
      const double w = instance_.others_probability(i, base);
      for (Index k = 0; k < x.size(); ++k) x[k] += w * static_cast<double>(U(i, base + k * s));
    });
    return x / static_cast<double>(units_);
  }

  double value(const Units& U) const {
    return oracle_objective(instance_, ExPostAllocation<double>(U.cast<double>() / static_cast<double>(units_)),
                            objective_);
  }

 private:
  const AuctionInstance& instance_;
  OracleObjective objective_;
  long units_;
};

// Lowers type-k entries (largest first) until interim allocations are
// non-decreasing in type for every bidder.
void repair_interim(const AuctionInstance& instance, const GridState& state, Units& U) {
  const auto& space = instance.space();
  for (Index i = 0; i < instance.num_bidders(); ++i) {
    const Index s = space.stride(i);
    for (Index k = space.types(i) - 2; k >= 0; --k) {
      while (true) {
        const VectorX<double> x = state.interim(U, i);
        if (x[k] <= x[k + 1] + 1e-12) break;
        Index best = -1;
        space.for_each_chain(i, [&](Index base) {
          const Index p = base + k * s;
          if (U(i, p) > 0 && (best < 0 || U(i, p) > U(i, best))) best = p;
        });
        if (best < 0) break;
        --U(i, best);
      }
    }
  }
}

// First-improvement hill climbing over +1, -1 and within-profile transfers.
long local_search(const AuctionInstance& instance, const GridState& state, Units& U, int passes) {
  const Index n = instance.num_bidders();
  const Index P = instance.num_profiles();
  double current = state.value(U);
  long moves = 0;
  auto attempt = [&](Index i, Index p, long delta_i, Index j, long delta_j) {
    U(i, p) += delta_i;
    if (delta_j != 0) U(j, p) += delta_j;
    bool ok = state.entry_ok(U, i, p) && (delta_j == 0 || state.entry_ok(U, j, p));
    if (ok) {
      const double trial = state.value(U);
      if (trial > current + 1e-12) {
        current = trial;
        ++moves;
        return true;
      }
    }
    U(i, p) -= delta_i;
    if (delta_j != 0) U(j, p) -= delta_j;
    return false;
  };
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (Index p = 0; p < P; ++p) {
      for (Index i = 0; i < n; ++i) {
        improved |= attempt(i, p, +1, i, 0);
        improved |= attempt(i, p, -1, i, 0);
        for (Index j = 0; j < n; ++j) {
          if (j != i) improved |= attempt(i, p, +1, j, -1);
        }
      }
    }
    if (!improved) break;
  }
  return moves;
}

VectorX<double> interior_start(const AuctionInstance& instance) {
  const Index n = instance.num_bidders();
  VectorX<double> x(n * instance.num_profiles());
  for (Index p = 0; p < instance.num_profiles(); ++p) {
    for (Index i = 0; i < n; ++i) {
      const double K = static_cast<double>(instance.space().types(i));
      x[allocation_variable(n, i, p)] =
          static_cast<double>(instance.space().digit(p, i) + 1) / ((K + 1.0) * static_cast<double>(n));
    }
  }
  return x;
}

OracleResult solve(const AuctionInstance& instance, const OracleConfig& config, OracleObjective objective) {
  config.validate();
  const Index n = instance.num_bidders();
  const Index P = instance.num_profiles();
  if (n * P > config.max_profile_vars) throw OracleRefusal(too_large(instance, config));
  const auto start = std::chrono::steady_clock::now();

  const SqrtSumProgram program = build_program(instance, objective);
  const BarrierResult continuous = maximize_sqrt_sum(program, interior_start(instance), config.barrier);

  ExPostAllocation<double> relaxed(n, P);
  for (Index p = 0; p < P; ++p) {
    for (Index i = 0; i < n; ++i) relaxed(i, p) = std::clamp(continuous.x[allocation_variable(n, i, p)], 0.0, 1.0);
  }
  const long units = grid_units(config.grid);
  const GridState state(instance, objective, units);
  const auto rounded = round_allocation(relaxed, instance, config.grid,
                                        is_robust(objective) ? MonotoneRule::ex_post : MonotoneRule::none);
  Units U = (rounded.allocation.table * static_cast<double>(units)).array().round().cast<long>();
  if (!is_robust(objective)) repair_interim(instance, state, U);

  OracleResult out;
  out.diagnostics.local_search_moves = local_search(instance, state, U, config.local_search_passes);
  out.diagnostics.continuous_value = continuous.objective;
  out.diagnostics.duality_gap = continuous.duality_gap;
  out.diagnostics.newton_steps = continuous.newton_steps;
  out.diagnostics.grid_slack = static_cast<double>(n) * instance.max_value() * config.grid;

  auto& m = out.mechanism;
  m.allocation = ExPostAllocation<double>(U.cast<double>() / static_cast<double>(units));
  switch (objective) {
    case OracleObjective::robust_sqrt:
      m.provenance = "exact_rrm";
      m.robust_payments = robust_payment(m.allocation, instance);
      out.report.revenue = expected_revenue(*m.robust_payments, instance);
      break;
    case OracleObjective::robust_linear:
      m.provenance = "exact_linear_rrm";
      m.cost = CostModel::linear;
      m.robust_payments = linear_payment(m.allocation, instance);
      out.report.revenue = expected_revenue(*m.robust_payments, instance);
      break;
    case OracleObjective::bayesian_sqrt:
      m.provenance = "exact_brm";
      m.interim_allocation = interim_collapse(m.allocation, instance);
      m.interim_payments = bayesian_payment(*m.interim_allocation, instance);
      out.report.revenue = expected_revenue(*m.interim_payments, instance);
      break;
  }
  out.diagnostics.grid_value = *out.report.revenue;
  out.report.kind = ObjectiveKind::exact_oracle;
  out.report.objective_value = *out.report.revenue;
  out.report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.report.regular = is_regular(virtual_values(instance));
  if (!continuous.converged) out.report.warning += "interior-point solve stopped before reaching its gap tolerance. ";
  out.report.verification = verify(instance, m, default_constraints(m));
  return out;
}

}  // namespace

double oracle_objective(const AuctionInstance& instance, const ExPostAllocation<double>& alloc,
                        OracleObjective objective) {
  switch (objective) {
    case OracleObjective::robust_sqrt: {
      const auto q = perceived_payment(alloc, instance, false);
      return (q.table.cwiseMax(0.0).cwiseSqrt() * instance.probabilities()).sum();
    }
    case OracleObjective::robust_linear: {
      const auto q = perceived_payment(alloc, instance, false);
      return (q.table * instance.probabilities()).sum();
    }
    case OracleObjective::bayesian_sqrt: {
      const auto q = interim_perceived_payment(interim_collapse(alloc, instance), instance);
      double total = 0.0;
      for (Index i = 0; i < instance.num_bidders(); ++i) {
        total += instance.bidder(i).distribution.pmf().dot(q.bidder(i).cwiseMax(0.0).cwiseSqrt());
      }
      return total;
    }
  }
  return 0.0;
}

SqrtSumProgram build_program(const AuctionInstance& instance, OracleObjective objective) {
  const Index n = instance.num_bidders();
  const Index P = instance.num_profiles();
  const Index N = n * P;
  const auto& space = instance.space();
  SqrtSumProgram program;

  Triplets a;
  std::vector<double> weights;
  if (is_robust(objective)) {
    for (Index i = 0; i < n; ++i) {
      const Index s = space.stride(i);
      space.for_each_chain(i, [&](Index base) {
        for (Index l = 0; l < space.types(i); ++l) {
          const auto row = static_cast<Index>(weights.size());
          add_payment_row(instance, i, base, l, row, 1.0, a);
          weights.push_back(instance.probability(base + l * s));
        }
      });
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index l = 0; l < space.types(i); ++l) {
        const auto row = static_cast<Index>(weights.size());
        space.for_each_chain(i, [&](Index base) {
          add_payment_row(instance, i, base, l, row, instance.others_probability(i, base), a);
        });
        weights.push_back(instance.bidder(i).distribution.pmf(l));
      }
    }
  }
  program.A.resize(static_cast<Index>(weights.size()), N);
  program.A.setFromTriplets(a.begin(), a.end());
  program.w = Eigen::Map<const VectorX<double>>(weights.data(), static_cast<Index>(weights.size()));
  if (objective == OracleObjective::robust_linear) {
    program.c = (program.A.transpose() * program.w).eval();
    program.w.setZero();
  }

  Triplets g;
  std::vector<double> rhs;
  auto next_row = [&](double value) {
    rhs.push_back(value);
    return static_cast<Index>(rhs.size() - 1);
  };
  for (Index k = 0; k < N; ++k) g.emplace_back(next_row(0.0), k, -1.0);
  for (Index p = 0; p < P; ++p) {
    const Index row = next_row(1.0);
    for (Index i = 0; i < n; ++i) g.emplace_back(row, allocation_variable(n, i, p), 1.0);
  }
  for (Index i = 0; i < n; ++i) {
    const Index s = space.stride(i);
    if (is_robust(objective)) {
      space.for_each_chain(i, [&](Index base) {
        for (Index l = 1; l < space.types(i); ++l) {
          const Index row = next_row(0.0);
          g.emplace_back(row, allocation_variable(n, i, base + (l - 1) * s), 1.0);
          g.emplace_back(row, allocation_variable(n, i, base + l * s), -1.0);
        }
      });
    } else {
      for (Index l = 1; l < space.types(i); ++l) {
        const Index row = next_row(0.0);
        space.for_each_chain(i, [&](Index base) {
          const double w = instance.others_probability(i, base);
          g.emplace_back(row, allocation_variable(n, i, base + (l - 1) * s), w);
          g.emplace_back(row, allocation_variable(n, i, base + l * s), -w);
        });
      }
    }
  }
  program.G.resize(static_cast<Index>(rhs.size()), N);
  program.G.setFromTriplets(g.begin(), g.end());
  program.h = Eigen::Map<const VectorX<double>>(rhs.data(), static_cast<Index>(rhs.size()));
  return program;
}

OracleResult exact_rrm(const AuctionInstance& instance, const OracleConfig& config) {
  return solve(instance, config, OracleObjective::robust_sqrt);
}

OracleResult exact_linear_rrm(const AuctionInstance& instance, const OracleConfig& config) {
  return solve(instance, config, OracleObjective::robust_linear);
}

OracleResult exact_brm(const AuctionInstance& instance, const OracleConfig& config) {
  return solve(instance, config, OracleObjective::bayesian_sqrt);
}

ExhaustiveResult exhaustive_grid_search(const AuctionInstance& instance, double grid, OracleObjective objective,
                                        long max_leaves) {
  const long units = grid_units(grid);
  const Index n = instance.num_bidders();
  const Index P = instance.num_profiles();
  const auto& space = instance.space();
  const GridState state(instance, objective, units);
  Units U = Units::Zero(n, P);
  Units best = U;
  double best_value = -std::numeric_limits<double>::infinity();
  long leaves = 0;

  auto visit = [&](auto&& self, Index var, long used) -> void {
    if (var == n * P) {
      if (++leaves > max_leaves) throw OracleRefusal("exhaustive search exceeded its leaf budget");
      if (!is_robust(objective)) {
        for (Index i = 0; i < n; ++i) {
          if (!state.interim_ok(U, i)) return;
        }
      }
      const double value = state.value(U);
      if (value > best_value + 1e-12) {
        best_value = value;
        best = U;
      }
      return;
    }
    const Index p = var / n;
    const Index i = var % n;
    if (i == 0) used = 0;
    long low = 0;
    const Index d = space.digit(p, i);
    if (is_robust(objective) && d > 0) low = U(i, space.with_type(p, i, d - 1));
    for (long u = low; u + used <= units; ++u) {
      U(i, p) = u;
      self(self, var + 1, used + u);
    }
    U(i, p) = 0;
  };
  visit(visit, 0, 0);

  ExhaustiveResult out;
  out.allocation = ExPostAllocation<double>(best.cast<double>() / static_cast<double>(units));
  out.value = best_value;
  out.leaves = leaves;
  return out;
}

}  // namespace convex_auction
