#include "convex_auction/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace convex_auction {

double SqrtSumProgram::objective(const VectorX<double>& x) const {
  const VectorX<double> u = A * x;
  double total = c.size() > 0 ? c.dot(x) : 0.0;
  for (Index r = 0; r < u.size(); ++r) total += w[r] * std::sqrt(std::max(0.0, u[r]));
  return total;
}

namespace {

struct ActiveRows {
  SparseMatrix A;
  VectorX<double> w;
};

ActiveRows active_rows(const SqrtSumProgram& program) {
  VectorX<double> row_norm = VectorX<double>::Zero(program.A.rows());
  for (Index col = 0; col < program.A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(program.A, col); it; ++it) {
      row_norm[it.row()] = std::max(row_norm[it.row()], std::abs(it.value()));
    }
  }
  std::vector<Index> new_index(static_cast<std::size_t>(program.A.rows()), -1);
  Index kept = 0;
  for (Index r = 0; r < program.A.rows(); ++r) {
    if (program.w[r] != 0.0 && row_norm[r] > 0.0) new_index[static_cast<std::size_t>(r)] = kept++;
  }
  ActiveRows out;
  out.w.resize(kept);
  std::vector<Eigen::Triplet<double>> entries;
  for (Index col = 0; col < program.A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(program.A, col); it; ++it) {
      const Index r = new_index[static_cast<std::size_t>(it.row())];
      if (r >= 0) entries.emplace_back(r, it.col(), it.value());
    }
  }
  for (Index r = 0; r < program.A.rows(); ++r) {
    if (new_index[static_cast<std::size_t>(r)] >= 0) out.w[new_index[static_cast<std::size_t>(r)]] = program.w[r];
  }
  out.A.resize(kept, program.A.cols());
  out.A.setFromTriplets(entries.begin(), entries.end());
  return out;
}

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// -t f(x) - sum log(h - Gx); +inf outside the domain.
double barrier_value(const ActiveRows& rows, const SqrtSumProgram& program, const VectorX<double>& x, double t) {
  const VectorX<double> u = rows.A * x;
  const VectorX<double> s = program.h - program.G * x;
  if (u.size() > 0 && u.minCoeff() <= 0.0) return kInfinity;
  if (s.size() > 0 && s.minCoeff() <= 0.0) return kInfinity;
  const double linear = program.c.size() > 0 ? program.c.dot(x) : 0.0;
  return -t * (rows.w.dot(u.cwiseSqrt()) + linear) - s.array().log().sum();
}

}  // namespace

BarrierResult maximize_sqrt_sum(const SqrtSumProgram& program, const VectorX<double>& start,
                                const BarrierOptions& options) {
  if (program.A.cols() != start.size() || program.G.cols() != start.size() || program.A.rows() != program.w.size() ||
      program.G.rows() != program.h.size() || (program.c.size() != 0 && program.c.size() != start.size())) {
    throw std::invalid_argument("maximize_sqrt_sum: inconsistent program dimensions");
  }
  const ActiveRows rows = active_rows(program);
  const SparseMatrix Gt = program.G.transpose();
  const SparseMatrix At = rows.A.transpose();
  const auto m = static_cast<double>(program.G.rows());
  BarrierResult result;
  result.x = start;
  if (!std::isfinite(barrier_value(rows, program, start, 1.0))) {
    throw std::invalid_argument("maximize_sqrt_sum: start point is not strictly feasible");
  }

  double t = options.t_initial;
  while (true) {
    for (int inner = 0; inner < options.max_newton_steps; ++inner) {
      const VectorX<double> u = rows.A * result.x;
      const VectorX<double> inv_s = (program.h - program.G * result.x).cwiseInverse();
      const VectorX<double> root = u.cwiseSqrt();

      VectorX<double> gradient = Gt * inv_s - At * ((t * 0.5) * rows.w.cwiseQuotient(root));
      if (program.c.size() > 0) gradient -= t * program.c;

      const VectorX<double> curvature = (t * 0.25) * rows.w.cwiseQuotient(root.cwiseProduct(u));
      const SparseMatrix sparse_hessian =
          Gt * inv_s.cwiseAbs2().asDiagonal() * program.G + At * curvature.asDiagonal() * rows.A;
      MatrixX<double> hessian(sparse_hessian);

      Eigen::LDLT<MatrixX<double>> solver(hessian);
      VectorX<double> step = -solver.solve(gradient);
      if (solver.info() != Eigen::Success || !step.allFinite()) {
        hessian.diagonal().array() += 1e-12 * std::max(1.0, hessian.diagonal().maxCoeff());
        step = -hessian.ldlt().solve(gradient);
      }
      const double decrement = -gradient.dot(step);
      ++result.newton_steps;
      const double current = barrier_value(rows, program, result.x, t);
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(current);
      if (!(0.5 * decrement > std::max(options.newton_tolerance, noise))) break;

      double alpha = 1.0;
      bool moved = false;
      for (int backtrack = 0; backtrack < 80; ++backtrack) {
        const VectorX<double> trial = result.x + alpha * step;
        if (barrier_value(rows, program, trial, t) <= current - 0.25 * alpha * decrement) {
          result.x = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    result.duality_gap = m / t;
    if (result.duality_gap <= options.gap_tolerance || result.newton_steps >= options.max_newton_steps) break;
    t *= options.t_growth;
  }
  result.converged = result.duality_gap <= options.gap_tolerance;
  result.objective = program.objective(result.x);
  return result;
}

}  // namespace convex_auction
