#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace car {

/// Finite support with strictly positive base weights summing to one.
/// This is the discrete carrier of a base probability measure; densities
/// are always taken with respect to one of these.
class BaseSpace {
 public:
  BaseSpace(std::vector<std::string> labels, Eigen::VectorXd weights);

  static std::shared_ptr<const BaseSpace> make(std::vector<std::string> labels,
                                               Eigen::VectorXd weights);
  /// n equally weighted points labeled "1".."n".
  static std::shared_ptr<const BaseSpace> uniform(Eigen::Index n);

  Eigen::Index size() const { return weights_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(Eigen::Index i) const { return weights_[i]; }

  /// Integral of a coordinate vector against the base weights.
  double integrate(const Eigen::VectorXd& values) const;

  bool same_as(const BaseSpace& other) const;

 private:
  std::vector<std::string> labels_;
  Eigen::VectorXd weights_;
};

using BaseSpacePtr = std::shared_ptr<const BaseSpace>;

}  // namespace car
