#pragma once

#include "convex_auction/barrier.hpp"
#include "convex_auction/mechanism.hpp"

#include <stdexcept>

namespace convex_auction {

/// Thrown when an instance exceeds the oracle's size cap.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  /// Allocation grid step g in (0, 1]; 1/g must be an integer.
  double grid = 1e-3;
  /// Largest n * |V| accepted.
  Index max_profile_vars = 400;
  int local_search_passes = 200;
  BarrierOptions barrier{};

  void validate() const;
};

/// Objective maximized over allocations. Payments follow from the allocation.
enum class OracleObjective {
  /// E[sum_i sqrt(q_i(v))]: robust revenue with quadratic perceived payments.
  robust_sqrt,
  /// E[sum_i q_i(v)]: robust revenue with linear perceived payments.
  robust_linear,
  /// sum_i sum_k f_{i,k} sqrt(q̂_i(z_k)): Bayesian revenue with h-payments.
  bayesian_sqrt,
};

struct OracleDiagnostics {
  /// Optimum of the continuous program (the grid optimum cannot exceed it
  /// by more than the duality gap).
  double continuous_value = 0.0;
  double duality_gap = 0.0;
  int newton_steps = 0;
  double grid_value = 0.0;
  /// Conservative n * max_value * g.
  double grid_slack = 0.0;
  long local_search_moves = 0;
};

struct OracleResult {
  Mechanism mechanism;
  MechanismReport report;
  OracleDiagnostics diagnostics;
};

/// Index of x_i(v) in the flattened variable vector (column-major n x |V|).
inline Index allocation_variable(Index n, Index bidder, Index profile) { return profile * n + bidder; }

/// Objective value of an allocation table.
double oracle_objective(const AuctionInstance& instance, const ExPostAllocation<double>& alloc,
                        OracleObjective objective);

/// The continuous program max objective s.t. XP, x >= 0 and monotonicity
/// (per chain for robust objectives, interim for the Bayesian one).
SqrtSumProgram build_program(const AuctionInstance& instance, OracleObjective objective);

/// Revenue-optimal robust mechanism with quadratic perceived payments, on the grid.
///
/// Solves the continuous program with an interior-point method, rounds the
/// optimum to the grid without breaking supply or monotonicity, then climbs
/// on the grid with single-unit moves until no move improves revenue.
OracleResult exact_rrm(const AuctionInstance& instance, const OracleConfig& config = {});

/// Revenue-optimal robust mechanism with linear perceived payments, on the grid.
OracleResult exact_linear_rrm(const AuctionInstance& instance, const OracleConfig& config = {});

/// Revenue-optimal Bayesian mechanism (ex-post feasible, interim monotone,
/// h-payments), on the grid.
OracleResult exact_brm(const AuctionInstance& instance, const OracleConfig& config = {});

struct ExhaustiveResult {
  ExPostAllocation<double> allocation;
  double value = 0.0;
  long leaves = 0;
};

/// Enumerates every grid allocation satisfying supply and the objective's
/// monotonicity rule. Only for very small instances and coarse grids.
ExhaustiveResult exhaustive_grid_search(const AuctionInstance& instance, double grid, OracleObjective objective,
                                        long max_leaves = 50'000'000);

}  // namespace convex_auction
