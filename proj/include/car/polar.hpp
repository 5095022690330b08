#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "car/coarsening.hpp"
#include "car/density.hpp"

namespace car {

/// Geometry of the polar set M° = {g >= 0 : S*(g) = 1} and of the span of
/// M = S(densities over Y).
struct PolarDescription {
  /// Columns form a basis of span(M) in X coordinates, orthonormal with
  /// respect to the P0-weighted inner product.
  Eigen::MatrixXd span_basis;
  /// |X| minus the rank of S*: the dimension of the affine solution set of
  /// S*(g) = 1 before positivity constraints.
  Eigen::Index affine_dim_m_polar = 0;
  /// Strictly positive solution of S*(g) = 1 maximizing its smallest
  /// coordinate, when one exists.
  std::optional<Eigen::VectorXd> interior_point;
  /// Whether S*(g) = 1, g >= 0 is solvable. The constant 1 always solves it.
  bool feasible = false;
};

struct Separator {
  /// Coordinate vector over X: <S(h), phi>_{P0} <= offset for every density
  /// h over Y, while the certified target pairs strictly above the offset.
  Eigen::VectorXd phi;
  double offset = 0.0;
  /// <target, phi>_{P0} - offset.
  double margin = 0.0;
};

/// Certificate for membership of a data density in M = S(simplex).
struct MembershipCert {
  enum class Verdict { kInside, kOutside };
  Verdict verdict = Verdict::kOutside;
  /// Preimage density over Y with S(witness) = target, inside case.
  std::optional<Density> witness_h;
  /// Separating functional, outside case.
  std::optional<Separator> separator;
  double tolerance = 0.0;
  /// ||S(witness) - target||_inf for the inside case.
  double defect = 0.0;
};

/// Outcome of the bipolar-equality decision M-bar = M°°.
struct BipolarVerdict {
  bool equal = false;
  /// Density in M°° certified outside M, when equal is false.
  std::optional<Density> witness;
  /// Lower bound on the KL divergence from the witness to every CAR data
  /// density: one quarter of the squared L1 distance to M.
  std::optional<double> kl_gap;
  std::string mode;  // "exact" | "randomized"
  Eigen::Index vertices_checked = 0;
  int directions = 0;
  std::uint64_t seed = 0;
  double membership_tol = 0.0;
  /// Randomized equal verdicts are only "no counterexample found".
  std::string note;
};

struct ExtensionParams {
  int directions = 1000;
  std::uint64_t seed = 1;
  double membership_tol = 1e-8;
};

/// Certified membership of k in M by LP feasibility: either a preimage
/// density or a separating functional.
MembershipCert membership_M(const CoarseningJoint& j, const Density& k,
                            double tol = 1e-8);

/// Describes M°: affine dimension, span of M, and the most-interior point.
PolarDescription polar_M(const CoarseningJoint& j);

/// Span part only: orthonormal basis of span{S(e_y / Q0(y))}.
PolarDescription bipolar_basis(const CoarseningJoint& j);

/// P0-weighted norm of the component of v orthogonal to span(M).
double span_residual(const CoarseningJoint& j, const PolarDescription& desc,
                     const Eigen::VectorXd& v);

/// Vertices of the polytope M°° = span(M) ∩ densities, as X-coordinate
/// columns. Requires |X| <= 20.
Eigen::MatrixXd bipolar_vertices(const CoarseningJoint& j);

/// Decides whether M-bar equals M°° (CAR untestable) or exhibits a witness
/// density in M°° \ M with a KL-gap certificate.
BipolarVerdict check_extension(const CoarseningJoint& j, bool exact,
                               const ExtensionParams& params = {});

/// The paper-side lower bound: a quarter of the squared L1 distance from the
/// witness to M, the distance computed by LP. Errors if the witness lies in
/// M or outside span(M).
double kl_gap_certificate(const CoarseningJoint& j, const Density& witness);

/// Minimum L1 distance from a density over X to M (an LP).
double l1_distance_to_M(const CoarseningJoint& j, const Eigen::VectorXd& k);

}  // namespace car
