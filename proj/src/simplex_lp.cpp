#include "car/simplex_lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace car::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterations = 200000;

// Dense tableau with the original n columns followed by m artificial
// columns (initially the identity, afterwards B^{-1}).
struct Tableau {
  Eigen::MatrixXd body;    // m x (n + m)
  Eigen::VectorXd rhs;     // m
  std::vector<int> basis;  // column index per row
  Eigen::Index m = 0;
  Eigen::Index n = 0;
};

double objective_of(const Tableau& t, const Eigen::VectorXd& cost) {
  double obj = 0.0;
  for (Eigen::Index r = 0; r < t.m; ++r) obj += cost[t.basis[r]] * t.rhs[r];
  return obj;
}

void pivot(Tableau& t, Eigen::Index row, Eigen::Index col) {
  const double p = t.body(row, col);
  t.body.row(row) /= p;
  t.rhs[row] /= p;
  for (Eigen::Index r = 0; r < t.m; ++r) {
    if (r == row) continue;
    const double factor = t.body(r, col);
    if (factor == 0.0) continue;
    t.body.row(r) -= factor * t.body.row(row);
    t.rhs[r] -= factor * t.rhs[row];
    if (t.rhs[r] < 0.0 && t.rhs[r] > -1e-13) t.rhs[r] = 0.0;
  }
  t.basis[row] = static_cast<int>(col);
}

enum class LoopResult { kOptimal, kUnbounded, kIterationLimit };

// Runs the simplex loop for the given cost vector over the allowed columns.
// Reduced costs are recomputed from the tableau each iteration; the systems
// here are small and this keeps the loop free of drift.
LoopResult run_simplex(Tableau& t, const Eigen::VectorXd& cost,
                       Eigen::Index allowed_cols, int& iterations) {
  bool bland = false;
  int stall = 0;
  double last_obj = objective_of(t, cost);
  const int stall_limit = 2 * static_cast<int>(t.m + t.n) + 16;

  while (true) {
    if (++iterations > kMaxIterations) return LoopResult::kIterationLimit;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(t.m);
    for (Eigen::Index r = 0; r < t.m; ++r) y[r] = cost[t.basis[r]];

    Eigen::Index entering = -1;
    double best = -1e-9;
    for (Eigen::Index j = 0; j < allowed_cols; ++j) {
      const double reduced = cost[j] - y.dot(t.body.col(j));
      if (reduced < best) {
        best = reduced;
        entering = j;
        if (bland) break;  // Bland: first improving column
      }
    }
    if (entering < 0) return LoopResult::kOptimal;

    Eigen::Index leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < t.m; ++r) {
      const double a = t.body(r, entering);
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs[r] / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && leaving >= 0 &&
           t.basis[r] < t.basis[leaving])) {
        best_ratio = ratio;
        leaving = r;
      }
    }
    if (leaving < 0) return LoopResult::kUnbounded;

    pivot(t, leaving, entering);

    const double obj = objective_of(t, cost);
    if (obj > last_obj - 1e-13) {
      if (++stall > stall_limit) bland = true;
    } else {
      stall = 0;
    }
    last_obj = obj;
  }
}

Eigen::VectorXd multipliers(const Tableau& t, const Eigen::VectorXd& cost) {
  // The artificial block of the tableau holds B^{-1}; y = c_B' B^{-1}.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(t.m);
  for (Eigen::Index i = 0; i < t.m; ++i) {
    double v = 0.0;
    for (Eigen::Index r = 0; r < t.m; ++r) {
      v += cost[t.basis[r]] * t.body(r, t.n + i);
    }
    y[i] = v;
  }
  return y;
}

}  // namespace

Result solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
             const Eigen::VectorXd& c, double tol) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) {
    throw std::invalid_argument("lp::solve: dimension mismatch");
  }

  Tableau t;
  t.m = m;
  t.n = n;
  t.body.resize(m, n + m);
  t.body.leftCols(n) = A;
  t.body.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  t.rhs = b;
  Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (t.rhs[r] < 0.0) {
      t.rhs[r] = -t.rhs[r];
      t.body.row(r).head(n) = -t.body.row(r).head(n);
      t.body(r, n + r) = 1.0;  // keep the artificial block the identity
      row_sign[r] = -1.0;
    }
  }
  t.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) t.basis[r] = static_cast<int>(n + r);

  Result result;

  // Phase 1: minimize the artificial mass. Only original columns may enter.
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  LoopResult loop = run_simplex(t, phase1_cost, n, result.iterations);
  if (loop == LoopResult::kIterationLimit) {
    result.status = Status::kIterationLimit;
    return result;
  }
  const double infeasibility = objective_of(t, phase1_cost);
  if (infeasibility > tol) {
    // Farkas certificate from the phase-1 multipliers, mapped back through
    // the row sign flips and normalized in sup norm.
    Eigen::VectorXd y = multipliers(t, phase1_cost);
    y = y.cwiseProduct(row_sign);
    const double scale = y.cwiseAbs().maxCoeff();
    if (scale > 0.0) y /= scale;
    result.status = Status::kInfeasible;
    result.dual = y;
    result.objective = infeasibility;
    return result;
  }

  // Drive remaining artificials out of the basis where possible; rows where
  // no original column can pivot are redundant and their artificial stays
  // parked at level zero.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (t.basis[r] < n) continue;
    Eigen::Index col = -1;
    double best = kPivotTol;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(t.body(r, j));
      if (a > best) {
        best = a;
        col = j;
      }
    }
    if (col >= 0) pivot(t, r, col);
  }

  // Phase 2 over the original columns only; artificials never re-enter.
  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
  phase2_cost.head(n) = c;
  loop = run_simplex(t, phase2_cost, n, result.iterations);
  if (loop == LoopResult::kIterationLimit) {
    result.status = Status::kIterationLimit;
    return result;
  }
  if (loop == LoopResult::kUnbounded) {
    result.status = Status::kUnbounded;
    return result;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (t.basis[r] < n) x[t.basis[r]] = std::max(t.rhs[r], 0.0);
  }
  result.status = Status::kOptimal;
  result.x = std::move(x);
  result.dual = multipliers(t, phase2_cost).cwiseProduct(row_sign);
  result.objective = c.dot(result.x);
  return result;
}

Feasibility linear_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            double tol) {
  Result r = solve(A, b, Eigen::VectorXd::Zero(A.cols()), tol);
  Feasibility f;
  if (r.status == Status::kOptimal) {
    f.feasible = true;
    f.x = std::move(r.x);
    f.residual = (A * f.x - b).cwiseAbs().maxCoeff();
  } else if (r.status == Status::kInfeasible) {
    f.feasible = false;
    f.farkas = std::move(r.dual);
  } else {
    throw std::runtime_error("linear_feasible: simplex did not terminate");
  }
  return f;
}

}  // namespace car::lp
