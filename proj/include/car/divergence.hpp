#pragma once

#include <vector>

#include "car/density.hpp"

namespace car {

/// Indicator partition of a finite support: disjoint nonempty index blocks
/// covering every point.
struct Partition {
  std::vector<std::vector<Eigen::Index>> blocks;

  static Partition singletons(Eigen::Index n);
  static Partition whole(Eigen::Index n);

  void validate(Eigen::Index support_size) const;
};

/// KL(f || h) = sum_i w_i f_i log(f_i / h_i) with the conventions
/// 0 log(0/x) = 0 and x log(x/0) = +inf for x > 0.
double kl_divergence(const Density& f, const Density& h);

/// Weighted L1 distance sum_i w_i |f_i - h_i|; lies in [0, 2].
double l1_distance(const Density& f, const Density& h);

/// Coarsened KL over the blocks of an indicator partition:
/// sum_B -log(<h,1_B> / <f,1_B>) <f,1_B>. Refining the partition can only
/// increase the value; with singleton blocks it equals kl_divergence.
double kl_partition(const Density& f, const Density& h, const Partition& p);

}  // namespace car
