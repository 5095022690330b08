#include "car/coarsening.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "car/random.hpp"

namespace car {

namespace {
constexpr double kTableTol = 1e-12;

void require_y_density(const CoarseningJoint& j, const Density& h,
                       const char* where) {
  if (!h.space().same_as(j.y_space())) {
    throw std::invalid_argument(std::string(where) +
                                ": density does not live on the Y space");
  }
}
}  // namespace

CoarseningJoint::CoarseningJoint(BaseSpacePtr y_space, BaseSpacePtr x_space,
                                 Eigen::MatrixXd table)
    : y_space_(std::move(y_space)),
      x_space_(std::move(x_space)),
      table_(std::move(table)) {
  if (!y_space_ || !x_space_) {
    throw std::invalid_argument("CoarseningJoint: null space");
  }
  if (table_.rows() != y_space_->size() || table_.cols() != x_space_->size()) {
    throw std::invalid_argument("CoarseningJoint: table shape mismatch");
  }
  if ((table_.array() < 0.0).any()) {
    throw std::invalid_argument("CoarseningJoint: negative mass");
  }
  if (std::abs(table_.sum() - 1.0) > kTableTol) {
    throw std::invalid_argument("CoarseningJoint: total mass is not 1");
  }
  const Eigen::VectorXd q0 = table_ * Eigen::VectorXd::Ones(table_.cols());
  const Eigen::VectorXd p0 =
      table_.transpose() * Eigen::VectorXd::Ones(table_.rows());
  if ((q0 - y_space_->weights()).cwiseAbs().maxCoeff() > kTableTol) {
    throw std::invalid_argument(
        "CoarseningJoint: row sums do not match the Y weights");
  }
  if ((p0 - x_space_->weights()).cwiseAbs().maxCoeff() > kTableTol) {
    throw std::invalid_argument(
        "CoarseningJoint: column sums do not match the X weights");
  }
}

Eigen::MatrixXd CoarseningJoint::s_matrix() const {
  return x_space_->weights().cwiseInverse().asDiagonal() * table_.transpose();
}

Eigen::MatrixXd CoarseningJoint::s_star_matrix() const {
  return y_space_->weights().cwiseInverse().asDiagonal() * table_;
}

Eigen::VectorXd CoarseningJoint::apply_s(const Eigen::VectorXd& h) const {
  if (h.size() != y_size()) {
    throw std::invalid_argument("apply_s: length mismatch");
  }
  return (table_.transpose() * h).cwiseQuotient(x_space_->weights());
}

Eigen::VectorXd CoarseningJoint::apply_s_star(const Eigen::VectorXd& g) const {
  if (g.size() != x_size()) {
    throw std::invalid_argument("apply_s_star: length mismatch");
  }
  return (table_ * g).cwiseQuotient(y_space_->weights());
}

CoarseningJoint build_joint(Eigen::MatrixXd table,
                            std::vector<std::string> y_labels,
                            std::vector<std::string> x_labels) {
  if (table.rows() != static_cast<Eigen::Index>(y_labels.size()) ||
      table.cols() != static_cast<Eigen::Index>(x_labels.size())) {
    throw std::invalid_argument("build_joint: label/table shape mismatch");
  }
  if ((table.array() < 0.0).any()) {
    throw std::invalid_argument("build_joint: negative entry");
  }
  const double total = table.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument("build_joint: total mass must be positive");
  }
  // Near-one totals are treated as exact so that file round-trips are
  // bit-stable.
  if (std::abs(total - 1.0) > kTableTol) table /= total;

  const Eigen::VectorXd q0 = table * Eigen::VectorXd::Ones(table.cols());
  const Eigen::VectorXd p0 =
      table.transpose() * Eigen::VectorXd::Ones(table.rows());
  if ((q0.array() <= 0.0).any()) {
    throw std::invalid_argument("build_joint: a Y point has no base mass");
  }
  if ((p0.array() <= 0.0).any()) {
    throw std::invalid_argument("build_joint: an X point has no base mass");
  }
  auto y_space = BaseSpace::make(std::move(y_labels), q0);
  auto x_space = BaseSpace::make(std::move(x_labels), p0);
  return CoarseningJoint(std::move(y_space), std::move(x_space),
                         std::move(table));
}

Density apply_S(const CoarseningJoint& j, const Density& h) {
  require_y_density(j, h, "apply_S");
  Eigen::VectorXd out = j.apply_s(h.values());
  // Positivity and unit mass are automatic; the Density constructor asserts
  // them.
  return Density(j.x_space_ptr(), std::move(out));
}

Eigen::VectorXd apply_S_star(const CoarseningJoint& j,
                             const Eigen::VectorXd& g) {
  if (g.size() != j.x_size()) {
    throw std::invalid_argument("apply_S_star: length mismatch");
  }
  if ((g.array() < 0.0).any()) {
    throw std::invalid_argument("apply_S_star: negative entry");
  }
  return j.apply_s_star(g);
}

OperatorCheck validate_coarsening(const CoarseningJoint& j, int trials,
                                  std::uint64_t seed) {
  OperatorCheck check;
  const Eigen::VectorXd s_one = j.apply_s(Eigen::VectorXd::Ones(j.y_size()));
  const Eigen::VectorXd s_star_one =
      j.apply_s_star(Eigen::VectorXd::Ones(j.x_size()));
  const double s_one_defect = (s_one.array() - 1.0).abs().maxCoeff();
  const double s_star_one_defect = (s_star_one.array() - 1.0).abs().maxCoeff();
  check.s_one_ok = s_one_defect <= 1e-12;
  check.s_star_one_ok = s_star_one_defect <= 1e-12;
  check.max_defect = std::max(s_one_defect, s_star_one_defect);

  check.positivity_ok = true;
  check.norm_estimate = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Density h = sample_density(j.y_space_ptr(), Rng::derive(seed, t));
    const Eigen::VectorXd image = j.apply_s(h.values());
    const double min_coord = image.minCoeff();
    if (min_coord < 0.0) {
      check.positivity_ok = false;
      check.max_defect = std::max(check.max_defect, -min_coord);
    }
    const double image_norm = j.x_space().integrate(image.cwiseAbs());
    const double h_norm = j.y_space().integrate(h.values().cwiseAbs());
    const double ratio = image_norm / h_norm;
    check.norm_estimate = std::max(check.norm_estimate, ratio);
    check.max_defect = std::max(check.max_defect, std::abs(ratio - 1.0));
  }
  return check;
}

Density car_data_density(const CoarseningJoint& j, const Density& h,
                         const Eigen::VectorXd& g) {
  require_y_density(j, h, "car_data_density");
  const Eigen::VectorXd slack =
      (apply_S_star(j, g).array() - 1.0).abs().matrix();
  if (slack.maxCoeff() > kAdjointTol) {
    throw std::invalid_argument(
        "car_data_density: g violates the adjoint constraint S*(g) = 1");
  }
  const Eigen::VectorXd f = g.cwiseProduct(j.apply_s(h.values()));
  // <g S(h), 1> = <h, S*(g)> = 1 up to the adjoint tolerance; renormalize
  // the residual away.
  return make_density(f, j.x_space_ptr());
}

CoarseningJoint rebase(const CoarseningJoint& j, const Density& h0,
                       const Eigen::VectorXd& g0) {
  require_y_density(j, h0, "rebase");
  const Eigen::VectorXd slack =
      (apply_S_star(j, g0).array() - 1.0).abs().matrix();
  if (slack.maxCoeff() > kAdjointTol) {
    throw std::invalid_argument(
        "rebase: g0 violates the adjoint constraint S*(g0) = 1");
  }
  Eigen::MatrixXd table =
      h0.values().asDiagonal() * j.table() * g0.asDiagonal();
  if ((table * Eigen::VectorXd::Ones(table.cols())).minCoeff() <= 0.0) {
    throw std::invalid_argument("rebase: a Y point loses all its mass");
  }
  if ((table.transpose() * Eigen::VectorXd::Ones(table.rows())).minCoeff() <=
      0.0) {
    throw std::invalid_argument("rebase: an X point loses all its mass");
  }
  return build_joint(std::move(table), j.y_space().labels(),
                     j.x_space().labels());
}

}  // namespace car
