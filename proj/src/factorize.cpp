#include "car/factorize.hpp"

#include <cmath>
#include <stdexcept>

namespace car {

namespace {

void require_positive_target(const Density& f, const char* where) {
  if (f.values().minCoeff() <= 0.0) {
    throw std::invalid_argument(
        std::string(where) +
        ": target must be strictly positive (smooth boundary targets first)");
  }
}

double kl_objective(const Eigen::VectorXd& p0, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& k) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    total += p0[i] * f[i] * std::log(f[i] / k[i]);
  }
  return total;
}

}  // namespace

void ProjectionOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("ProjectionOptions: tol <= 0");
  if (max_iter < 1) {
    throw std::invalid_argument("ProjectionOptions: max_iter < 1");
  }
  if (!(floor > 0.0 && floor < 1.0)) {
    throw std::invalid_argument("ProjectionOptions: floor out of (0,1)");
  }
}

Density em_step(const CoarseningJoint& j, const Density& f, const Density& h) {
  if (!f.space().same_as(j.x_space())) {
    throw std::invalid_argument("em_step: f does not live on the X space");
  }
  if (!h.space().same_as(j.y_space())) {
    throw std::invalid_argument("em_step: h does not live on the Y space");
  }
  const Eigen::VectorXd k = j.apply_s(h.values());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] <= 0.0 && f[i] > 0.0) {
      throw std::domain_error("em_step: S(h) vanishes where f is positive");
    }
  }
  const Eigen::VectorXd ratio = f.values().cwiseQuotient(k);
  Eigen::VectorXd next = h.values().cwiseProduct(j.apply_s_star(ratio));
  // <h',1>_{Q0} = <S(h), f/S(h)>_{P0} = 1: no renormalization needed.
  return Density(j.y_space_ptr(), std::move(next));
}

ProjectionResult kl_project(const CoarseningJoint& j, const Density& f,
                            const ProjectionOptions& opts) {
  opts.validate();
  if (!f.space().same_as(j.x_space())) {
    throw std::invalid_argument("kl_project: f does not live on the X space");
  }
  require_positive_target(f, "kl_project");

  const Eigen::MatrixXd s = j.s_matrix();
  const Eigen::MatrixXd s_star = j.s_star_matrix();
  const Eigen::VectorXd& p0 = j.x_space().weights();

  Eigen::VectorXd h =
      Eigen::VectorXd::Ones(j.y_size()).cwiseMax(opts.floor);
  Eigen::VectorXd k = s * h;
  double objective = kl_objective(p0, f.values(), k);

  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iter; ++iter) {
    const Eigen::VectorXd ratio = f.values().cwiseQuotient(k);
    h = h.cwiseProduct(s_star * ratio);
    k = s * h;
    const double next_objective = kl_objective(p0, f.values(), k);
    if (std::abs(objective - next_objective) < opts.tol) {
      objective = next_objective;
      ++iter;
      converged = true;
      break;
    }
    objective = next_objective;
  }

  ProjectionResult result{Density(j.y_space_ptr(), h), std::max(objective, 0.0),
                          iter, converged};
  return result;
}

FactorizationReport car_factorize(const CoarseningJoint& j, const Density& f,
                                  const ProjectionOptions& opts,
                                  double slack_tol) {
  ProjectionResult proj = kl_project(j, f, opts);
  Density k_star = apply_S(j, proj.h_star);
  Eigen::VectorXd g_star = f.values().cwiseQuotient(k_star.values());
  Eigen::VectorXd slack =
      Eigen::VectorXd::Ones(j.y_size()) - j.apply_s_star(g_star);

  FactorizationReport report{
      std::move(proj.h_star),
      std::move(k_star),
      std::move(g_star),
      proj.kl_value,
      std::move(slack),
      FactorizationReport::Verdict::kProjectionResidual,
      proj.iterations,
      proj.converged,
      slack_tol,
      0.0};
  if (report.slack.cwiseAbs().maxCoeff() <= slack_tol) {
    report.verdict = FactorizationReport::Verdict::kCompatible;
  }
  return report;
}

}  // namespace car
