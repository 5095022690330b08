#include "car/base_space.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace car {

namespace {
constexpr double kWeightSumTol = 1e-12;
}

BaseSpace::BaseSpace(std::vector<std::string> labels, Eigen::VectorXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (static_cast<Eigen::Index>(labels_.size()) != weights_.size()) {
    throw std::invalid_argument("BaseSpace: labels/weights length mismatch");
  }
  if (weights_.size() == 0) {
    throw std::invalid_argument("BaseSpace: empty support");
  }
  if ((weights_.array() <= 0.0).any()) {
    throw std::invalid_argument("BaseSpace: weights must be strictly positive");
  }
  if (std::abs(weights_.sum() - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("BaseSpace: weights must sum to 1");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw std::invalid_argument("BaseSpace: duplicate label '" + l + "'");
    }
  }
}

BaseSpacePtr BaseSpace::make(std::vector<std::string> labels,
                             Eigen::VectorXd weights) {
  return std::make_shared<const BaseSpace>(std::move(labels),
                                           std::move(weights));
}

BaseSpacePtr BaseSpace::uniform(Eigen::Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    labels.push_back(std::to_string(i + 1));
  }
  return make(std::move(labels), Eigen::VectorXd::Constant(n, 1.0 / double(n)));
}

double BaseSpace::integrate(const Eigen::VectorXd& values) const {
  if (values.size() != weights_.size()) {
    throw std::invalid_argument("BaseSpace::integrate: size mismatch");
  }
  return weights_.dot(values);
}

bool BaseSpace::same_as(const BaseSpace& other) const {
  if (this == &other) return true;
  if (size() != other.size()) return false;
  if (labels_ != other.labels_) return false;
  return (weights_ - other.weights_).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace car
