#pragma once

#include <Eigen/Dense>

namespace car::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct Result {
  Status status = Status::kIterationLimit;
  /// Primal solution (meaningful when optimal), clamped to be nonnegative.
  Eigen::VectorXd x;
  /// Optimal: simplex multipliers y with y'A <= c componentwise.
  /// Infeasible: Farkas certificate with y'A <= tol, y'b > tol, scaled so
  /// ||y||_inf = 1.
  Eigen::VectorXd dual;
  double objective = 0.0;
  int iterations = 0;
};

/// Solves min c'x subject to A x = b, x >= 0 by a dense two-phase tableau
/// simplex. Dantzig pricing with a permanent switch to Bland's rule once the
/// objective stalls, so cycling cannot occur. Intended for the small,
/// well-conditioned systems this toolkit produces.
Result solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
             const Eigen::VectorXd& c, double tol = 1e-9);

struct Feasibility {
  bool feasible = false;
  /// Nonnegative solution of A x = b when feasible.
  Eigen::VectorXd x;
  /// Farkas dual when infeasible: y'A <= tol componentwise and y'b > tol.
  Eigen::VectorXd farkas;
  /// ||A x - b||_inf of the returned point (feasible case).
  double residual = 0.0;
};

/// Finds x >= 0 with A x = b, or proves there is none.
Feasibility linear_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            double tol = 1e-9);

}  // namespace car::lp
