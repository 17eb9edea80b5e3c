#pragma once

#include "convex_auction/core.hpp"

#include <Eigen/Sparse>

namespace convex_auction {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// maximize sum_r w_r sqrt(a_r^T x) + c^T x  subject to  G x <= h.
///
/// Rows of A with no non-zero entry are ignored; an empty c means no linear
/// term. The objective is concave, so the barrier path converges to the
/// global optimum.
struct SqrtSumProgram {
  SparseMatrix A;
  VectorX<double> w;
  VectorX<double> c;
  SparseMatrix G;
  VectorX<double> h;

  double objective(const VectorX<double>& x) const;
};

struct BarrierOptions {
  double gap_tolerance = 1e-9;
  double t_initial = 1.0;
  double t_growth = 12.0;
  double newton_tolerance = 1e-12;
  int max_newton_steps = 2000;
};

struct BarrierResult {
  VectorX<double> x;
  double objective = 0.0;
  double duality_gap = 0.0;
  int newton_steps = 0;
  bool converged = false;
};

/// Log-barrier interior-point method with damped Newton steps.
/// `start` must satisfy G start < h strictly and a_r^T start > 0 for every
/// non-zero row.
BarrierResult maximize_sqrt_sum(const SqrtSumProgram& program, const VectorX<double>& start,
                                const BarrierOptions& options = {});

}  // namespace convex_auction
