#pragma once

#include <cstdint>

#include "car/base_space.hpp"

namespace car {

/// Nonnegative coordinates integrating to one against a BaseSpace.
class Density {
 public:
  Density(BaseSpacePtr space, Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  const BaseSpace& space() const { return *space_; }
  const BaseSpacePtr& space_ptr() const { return space_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

 private:
  BaseSpacePtr space_;
  Eigen::VectorXd values_;
};

/// Rescales a nonnegative coordinate vector so it integrates to one.
Density make_density(const Eigen::VectorXd& raw, BaseSpacePtr space);

/// Strictly positive random density, deterministic in the seed.
/// Draws i.i.d. exponentials per point and normalizes, so the induced
/// point probabilities are symmetric Dirichlet.
Density sample_density(const BaseSpacePtr& space, std::uint64_t seed);

void require_same_space(const Density& a, const Density& b,
                        const char* where);

}  // namespace car
