#pragma once

#include <string>

#include "car/coarsening.hpp"
#include "car/density.hpp"

namespace car {

struct ProjectionOptions {
  /// Convergence threshold on the change of the KL objective between
  /// successive iterations. The objective is the monotone quantity; iterate
  /// change is not.
  double tol = 1e-12;
  int max_iter = 200000;
  /// Floor applied to the uniform initial iterate.
  double floor = 1e-12;

  void validate() const;
};

struct ProjectionResult {
  Density h_star;
  double kl_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Output of the CAR factorization f = g* S(h*).
struct FactorizationReport {
  enum class Verdict { kCompatible, kProjectionResidual };
  Density h_star;
  Density k_star;            // S(h_star)
  Eigen::VectorXd g_star;    // f / k_star
  double kl_value = 0.0;     // KL(f || k_star)
  Eigen::VectorXd slack;     // 1 - S*(g_star), componentwise over Y
  Verdict verdict = Verdict::kProjectionResidual;
  int iterations = 0;
  bool converged = false;
  double slack_tol = 0.0;
  /// Mixture weight toward uniform applied by the caller before projecting
  /// (zero when the target was already strictly positive).
  double smoothing_eps = 0.0;
};

/// One multiplicative update h'(y) = h(y) S*(f / S(h))(y). Fixed points
/// satisfy the stationarity condition S*(f / S(h)) = 1 on the support of h;
/// each step cannot increase KL(f || S(h)).
Density em_step(const CoarseningJoint& j, const Density& f, const Density& h);

/// KL-projects a strictly positive target f onto the closure of M by
/// iterating em_step from the uniform start.
ProjectionResult kl_project(const CoarseningJoint& j, const Density& f,
                            const ProjectionOptions& opts = {});

/// Projects f, extracts g = f / S(h*), and decides CAR compatibility from
/// the adjoint slack. A compatible verdict is a certificate (an explicit
/// factorization); a residual verdict only reports the projection gap.
FactorizationReport car_factorize(const CoarseningJoint& j, const Density& f,
                                  const ProjectionOptions& opts = {},
                                  double slack_tol = 1e-6);

}  // namespace car
