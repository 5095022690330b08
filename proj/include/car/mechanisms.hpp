#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "car/coarsening.hpp"
#include "car/density.hpp"

namespace car {

/// Discretization and sampling parameters for the continuous mechanisms.
struct GridSpec {
  int k = 20;           // number of cells / histogram bins
  double truncation = 3.0;  // time horizon for binning
  double rate_y = 1.0;      // exponential rate of the variable of interest
  double rate_c = 1.0;      // exponential rate of the censoring variable

  void validate() const;
};

/// A batch of observed outcomes: indices into an X space for the finite
/// mechanisms, or raw real values for the continuous multiplicative sampler.
struct SampleBatch {
  std::vector<Eigen::Index> indices;
  std::vector<double> values;
  std::uint64_t seed = 0;
  Eigen::Index n = 0;

  bool is_real() const { return !values.empty() || indices.empty(); }
};

/// Current status observation (C, 1{Y <= C}) with Y, C cell-uniform on a
/// k-grid; ties count as delta = 1. The zero-mass outcome (k, 0) is dropped.
/// Outcomes are ordered (1,1),(1,0),(2,1),...,(k-1,0),(k,1).
CoarseningJoint current_status(int k);

/// Right censoring (Y ^ C, 1{Y <= C}) on a k-grid; the delta = 1 section of
/// the image reveals h pointwise. Outcome (k, 0) is dropped.
CoarseningJoint right_censored(int k);

/// Observe Y itself or the missing marker; each observation is missing with
/// base probability one half, independently of Y.
CoarseningJoint missing_data(const BaseSpacePtr& y_space);

/// The set-observation model on m points: observe A with y in A, base mass
/// 2^{1-m}/m per pair. Outcomes ordered by (size, lexicographic).
CoarseningJoint subset_coarsening(int m);

/// Degenerate coarsening with table Q0 x P0, so S(h) = 1 for every h.
CoarseningJoint product_coarsening(const BaseSpacePtr& y_space,
                                   const BaseSpacePtr& x_space);

/// Outcome labels/indices helpers for the current-status X space.
struct CurrentStatusLayout {
  int k = 0;
  Eigen::Index size() const { return 2 * k - 1; }
  Eigen::Index index(int c, int delta) const;
  int cell_of(Eigen::Index x_index) const;
  int delta_of(Eigen::Index x_index) const;

  /// Checks that a joint has the canonical current-status shape and returns
  /// the layout.
  static CurrentStatusLayout of(const CoarseningJoint& j);
};

/// A dependent (non-CAR) current-status alternative: the delta = 1 mass sits
/// uniformly on the cells at or below the midpoint, the delta = 0 mass
/// uniformly on the interior cells above it, so the product-cell populations
/// are exactly a1 = a2 = 1/2. Table is aligned with current_status(k).
Eigen::MatrixXd comonotone_current_status_table(int k);

/// Draws n observations from the CAR law g * S(h): Y ~ h Q0, then X | Y = y
/// with probability proportional to g(x) table[y][x].
SampleBatch sample_car(const CoarseningJoint& j, const Density& h,
                       const Eigen::VectorXd& g, Eigen::Index n,
                       std::uint64_t seed);

/// Draws n observations of X under an arbitrary nonnegative normalized
/// joint table over Y x X (rows Y, columns X).
SampleBatch sample_joint(const Eigen::MatrixXd& table, Eigen::Index n,
                         std::uint64_t seed);

/// Multiplicative censoring X = C * Y. Under CAR, Y and C are independent
/// exponentials and X has a decreasing density. The non-CAR alternative
/// concentrates C near 2/Y so X clusters near 2 (interior mode).
SampleBatch multiplicative_sampler(const GridSpec& spec, bool car,
                                   Eigen::Index n, std::uint64_t seed);

}  // namespace car
