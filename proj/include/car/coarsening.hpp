#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "car/density.hpp"

namespace car {

/// A joint base probability table over Y x X. The table is the single source
/// of truth: the coarsening map S, its adjoint S*, and the marginal base
/// measures Q0 (rows) and P0 (columns) are all derived views of it.
class CoarseningJoint {
 public:
  CoarseningJoint(BaseSpacePtr y_space, BaseSpacePtr x_space,
                  Eigen::MatrixXd table);

  const BaseSpace& y_space() const { return *y_space_; }
  const BaseSpace& x_space() const { return *x_space_; }
  const BaseSpacePtr& y_space_ptr() const { return y_space_; }
  const BaseSpacePtr& x_space_ptr() const { return x_space_; }
  /// Joint mass table, rows indexed by Y, columns by X.
  const Eigen::MatrixXd& table() const { return table_; }
  Eigen::Index y_size() const { return table_.rows(); }
  Eigen::Index x_size() const { return table_.cols(); }

  /// S as a |X| x |Y| matrix acting on Y-density coordinates:
  /// S[x][y] = table[y][x] / P0(x).
  Eigen::MatrixXd s_matrix() const;
  /// S* as a |Y| x |X| matrix acting on X-coordinates:
  /// S*[y][x] = table[y][x] / Q0(y).
  Eigen::MatrixXd s_star_matrix() const;

  /// Raw linear action of S on an arbitrary Y-coordinate vector (no density
  /// validation; used by the polytope machinery).
  Eigen::VectorXd apply_s(const Eigen::VectorXd& h_coords) const;
  Eigen::VectorXd apply_s_star(const Eigen::VectorXd& g_coords) const;

 private:
  BaseSpacePtr y_space_;
  BaseSpacePtr x_space_;
  Eigen::MatrixXd table_;
};

/// Diagnostics from validate_coarsening. All defects are nonnegative.
struct OperatorCheck {
  bool s_one_ok = false;
  bool s_star_one_ok = false;
  bool positivity_ok = false;
  double norm_estimate = 0.0;
  double max_defect = 0.0;
};

/// Builds a CoarseningJoint from a nonnegative mass table, renormalizing the
/// total mass to one. Rows (columns) with zero mass are rejected: silently
/// dropping support points would change the density spaces.
CoarseningJoint build_joint(Eigen::MatrixXd table,
                            std::vector<std::string> y_labels,
                            std::vector<std::string> x_labels);

/// S(h): conditional expectation of h(Y) given X. Returns a Density over X.
Density apply_S(const CoarseningJoint& j, const Density& h);

/// S*(g): conditional expectation of g(X) given Y, for nonnegative g.
Eigen::VectorXd apply_S_star(const CoarseningJoint& j,
                             const Eigen::VectorXd& g);

/// Checks S(1)=1, S*(1)=1, positivity and the operator norm on random
/// densities. Reports defects instead of throwing.
OperatorCheck validate_coarsening(const CoarseningJoint& j, int trials,
                                  std::uint64_t seed);

/// The CAR data density g * S(h). Requires S*(g) = 1 within 1e-8.
Density car_data_density(const CoarseningJoint& j, const Density& h,
                         const Eigen::VectorXd& g);

/// Changes the base measure to nu0[y][x] = g0[x] h0[y] table[y][x]; the
/// rebased joint describes the same CAR model relative to the new base.
CoarseningJoint rebase(const CoarseningJoint& j, const Density& h0,
                       const Eigen::VectorXd& g0);

/// Tolerance on ||S*(g) - 1||_inf accepted by car_data_density, rebase and
/// the samplers; looser than construction tolerances because g typically
/// arrives from an iterative solver.
inline constexpr double kAdjointTol = 1e-8;

}  // namespace car
