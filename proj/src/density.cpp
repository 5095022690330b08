#include "car/density.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "car/random.hpp"

namespace car {

namespace {
constexpr double kMassTol = 1e-10;
}

Density::Density(BaseSpacePtr space, Eigen::VectorXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw std::invalid_argument("Density: null space");
  if (values_.size() != space_->size()) {
    throw std::invalid_argument("Density: values/space length mismatch");
  }
  if ((values_.array() < 0.0).any()) {
    throw std::invalid_argument("Density: negative coordinate");
  }
  const double mass = space_->integrate(values_);
  if (std::abs(mass - 1.0) > kMassTol) {
    throw std::invalid_argument("Density: total mass " + std::to_string(mass) +
                                " is not 1");
  }
}

Density make_density(const Eigen::VectorXd& raw, BaseSpacePtr space) {
  if (!space) throw std::invalid_argument("make_density: null space");
  if (raw.size() != space->size()) {
    throw std::invalid_argument("make_density: length mismatch");
  }
  if ((raw.array() < 0.0).any()) {
    throw std::invalid_argument("make_density: negative entry");
  }
  const double mass = space->integrate(raw);
  if (!(mass > 0.0)) {
    throw std::invalid_argument("make_density: total mass must be positive");
  }
  if (mass == 1.0) return Density(std::move(space), raw);
  return Density(std::move(space), raw / mass);
}

Density sample_density(const BaseSpacePtr& space, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = space->size();
  Eigen::VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) mass[i] = rng.exponential();
  mass /= mass.sum();
  // mass is a point probability vector; divide by the weights to get the
  // density coordinates.
  return make_density(mass.cwiseQuotient(space->weights()), space);
}

void require_same_space(const Density& a, const Density& b,
                        const char* where) {
  if (!a.space().same_as(b.space())) {
    throw std::invalid_argument(std::string(where) + ": space mismatch");
  }
}

}  // namespace car
