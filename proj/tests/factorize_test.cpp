#include <doctest.h>

#include <cmath>

#include "car/divergence.hpp"
#include "car/factorize.hpp"
#include "car/mechanisms.hpp"
#include "car/polar.hpp"
#include "car/random.hpp"

using namespace car;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> entries) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v[i++] = e;
  return v;
}

ProjectionOptions tight() {
  ProjectionOptions opts;
  opts.tol = 1e-15;
  opts.max_iter = 300000;
  return opts;
}

CoarseningJoint random_positive_joint(Eigen::Index ny, Eigen::Index nx,
                                      std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd table(ny, nx);
  for (Eigen::Index r = 0; r < ny; ++r) {
    for (Eigen::Index c = 0; c < nx; ++c) table(r, c) = 0.05 + rng.uniform();
  }
  table /= table.sum();
  std::vector<std::string> yl, xl;
  for (Eigen::Index i = 0; i < ny; ++i) yl.push_back("y" + std::to_string(i));
  for (Eigen::Index i = 0; i < nx; ++i) xl.push_back("x" + std::to_string(i));
  return build_joint(std::move(table), yl, xl);
}

double kl_to_image(const CoarseningJoint& j, const Density& f,
                   const Eigen::VectorXd& h) {
  return kl_divergence(f, Density(j.x_space_ptr(), j.apply_s(h)));
}

// Brute-force minimum of KL(f || S(h)) over a grid of point probabilities.
double grid_projection_value(const CoarseningJoint& j, const Density& f,
                             int steps) {
  REQUIRE(j.y_size() == 3);
  const auto& q0 = j.y_space().weights();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    for (int l = 0; l + i <= steps; ++l) {
      Eigen::VectorXd h(3);
      h[0] = (double(i) / steps) / q0[0];
      h[1] = (double(l) / steps) / q0[1];
      h[2] = (double(steps - i - l) / steps) / q0[2];
      best = std::min(best, kl_to_image(j, f, h));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("em_step hand-computed update on the missing-data joint") {
  const CoarseningJoint miss =
      missing_data(BaseSpace::make({"a", "b"}, vec({0.5, 0.5})));
  const Density f(miss.x_space_ptr(), vec({1.2, 0.4, 1.2}));
  const Density h(miss.y_space_ptr(), vec({1.0, 1.0}));
  // S(h) = 1, so the ratio is f itself and
  // h'(a) = S*(f)(a) = 1.2, h'(b) = S*(f)(b) = (0.4 + 1.2)/2 = 0.8.
  const Density next = em_step(miss, f, h);
  CHECK(next.values().isApprox(vec({1.2, 0.8}), 1e-14));
  CHECK(miss.y_space().integrate(next.values()) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("em_step fixed points stay fixed") {
  const CoarseningJoint j = subset_coarsening(3);
  const Density h0 = sample_density(j.y_space_ptr(), 5);
  const Density f = apply_S(j, h0);
  // f = S(h0) makes the ratio 1 on the image, so h0 is a fixed point.
  const Density next = em_step(j, f, h0);
  CHECK((next.values() - h0.values()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(kl_divergence(f, apply_S(j, next)) <= 1e-14);
}

TEST_CASE("em_step rejects vanishing denominators") {
  const CoarseningJoint miss =
      missing_data(BaseSpace::make({"a", "b"}, vec({0.5, 0.5})));
  const Density f(miss.x_space_ptr(), vec({1.2, 0.4, 1.2}));
  const Density h(miss.y_space_ptr(), vec({0.0, 2.0}));  // S(h)(a) = 0
  CHECK_THROWS_AS(em_step(miss, f, h), std::domain_error);
}

TEST_CASE("kl_project recovers exact images") {
  const CoarseningJoint j = right_censored(4);
  const Density one(j.x_space_ptr(), Eigen::VectorXd::Ones(j.x_size()));
  const ProjectionResult at_one = kl_project(j, one, tight());
  CHECK(at_one.kl_value <= 1e-12);
  CHECK(at_one.converged);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Density h0 = sample_density(j.y_space_ptr(), Rng::derive(11, seed));
    const Density f = apply_S(j, h0);
    const ProjectionResult res = kl_project(j, f, tight());
    CHECK(res.kl_value < 1e-10);
  }
}

TEST_CASE("kl_project input validation and iteration cap") {
  const CoarseningJoint j = subset_coarsening(2);
  CHECK_THROWS_AS(
      kl_project(j, Density(j.x_space_ptr(), vec({4.0, 0.0, 0.0})), tight()),
      std::invalid_argument);

  ProjectionOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(kl_project(j, sample_density(j.x_space_ptr(), 3), bad),
                  std::invalid_argument);

  ProjectionOptions capped;
  capped.tol = 1e-18;
  capped.max_iter = 3;
  const ProjectionResult res =
      kl_project(j, sample_density(j.x_space_ptr(), 3), capped);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 3);
}

TEST_CASE("kl_project mixtures agree with the membership verdict") {
  const CoarseningJoint cs3 = current_status(3);
  const Eigen::VectorXd witness = cs3.apply_s(vec({1.0, -1.0, 3.0}));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(witness.size());
  for (double lambda : {0.99, 0.9, 0.1}) {
    const Density f(cs3.x_space_ptr(), lambda * witness + (1 - lambda) * ones);
    const ProjectionResult res = kl_project(cs3, f, tight());
    const bool inside =
        membership_M(cs3, f).verdict == MembershipCert::Verdict::kInside;
    if (inside) {
      CHECK(res.kl_value <= 1e-10);
    } else {
      CHECK(res.kl_value > 1e-4);
    }
  }
}

TEST_CASE("car_factorize on the missing-data closed form") {
  const CoarseningJoint miss =
      missing_data(BaseSpace::make({"a", "b"}, vec({0.5, 0.5})));
  const Density f(miss.x_space_ptr(), vec({1.2, 0.4, 1.2}));
  ProjectionOptions opts = tight();
  opts.tol = 1e-16;
  const FactorizationReport rep = car_factorize(miss, f, opts);
  CHECK(rep.verdict == FactorizationReport::Verdict::kCompatible);
  CHECK((rep.h_star.values() - vec({1.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((rep.g_star - vec({0.8, 0.8, 1.2})).cwiseAbs().maxCoeff() <= 1e-7);
  // KL(f || S(h*)) = 0.4 log(0.8) + 0.6 log(1.2): the projection distance is
  // positive even though f factors exactly, because g* carries mass.
  CHECK(rep.kl_value ==
        doctest::Approx(0.020135513550688863).epsilon(1e-8));
  CHECK(rep.slack.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("car_factorize is the identity on the uniform target") {
  for (const CoarseningJoint& j :
       {subset_coarsening(3), right_censored(5), current_status(4)}) {
    const Density one(j.x_space_ptr(), Eigen::VectorXd::Ones(j.x_size()));
    const FactorizationReport rep = car_factorize(j, one, tight());
    CHECK(rep.verdict == FactorizationReport::Verdict::kCompatible);
    CHECK((rep.h_star.values().array() - 1.0).abs().maxCoeff() <= 1e-7);
    CHECK((rep.g_star.array() - 1.0).abs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("car_factorize flags the smoothed witness as a residual") {
  const CoarseningJoint cs3 = current_status(3);
  const Eigen::VectorXd witness = cs3.apply_s(vec({1.0, -1.0, 3.0}));
  const Density f(cs3.x_space_ptr(),
                  0.99 * witness + 0.01 * Eigen::VectorXd::Ones(witness.size()));
  const FactorizationReport rep = car_factorize(cs3, f, tight());
  CHECK(rep.verdict == FactorizationReport::Verdict::kProjectionResidual);
  // Regression constant computed once from this implementation.
  CHECK(rep.kl_value == doctest::Approx(0.0784032091898).epsilon(1e-7));
}

TEST_CASE("EM objective is monotone and iterates stay normalized") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CoarseningJoint j =
        random_positive_joint(3, 5, Rng::derive(21, seed));
    const Density f = sample_density(j.x_space_ptr(), Rng::derive(22, seed));
    Density h(j.y_space_ptr(), Eigen::VectorXd::Ones(3));
    double objective = kl_divergence(f, apply_S(j, h));
    for (int t = 0; t < 50; ++t) {
      h = em_step(j, f, h);
      CHECK(std::abs(j.y_space().integrate(h.values()) - 1.0) <= 1e-12);
      const double next = kl_divergence(f, apply_S(j, h));
      CHECK(next <= objective + 1e-12);
      objective = next;
    }
  }
}

TEST_CASE("KKT slack signs and complementary slackness at convergence") {
  const CoarseningJoint j = subset_coarsening(3);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Density f = sample_density(j.x_space_ptr(), Rng::derive(31, seed));
    const FactorizationReport rep = car_factorize(j, f, tight());
    // S*(f / S(h*)) <= 1 + tol componentwise.
    CHECK(rep.slack.minCoeff() >= -1e-6);
    for (Eigen::Index y = 0; y < j.y_size(); ++y) {
      if (rep.h_star[y] > 1e-6) CHECK(std::abs(rep.slack[y]) <= 1e-6);
    }
    if (rep.verdict == FactorizationReport::Verdict::kCompatible) {
      const Eigen::VectorXd recon =
          rep.g_star.cwiseProduct(rep.k_star.values());
      CHECK(j.x_space().integrate((recon - f.values()).cwiseAbs()) < 1e-8);
      CHECK((j.apply_s_star(rep.g_star).array() - 1.0).abs().maxCoeff() <
            1e-6);
    }
  }
}

TEST_CASE("projection value matches the brute-force grid oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CoarseningJoint j =
        random_positive_joint(3, 3, Rng::derive(41, seed));
    const Density f = sample_density(j.x_space_ptr(), Rng::derive(42, seed));
    const ProjectionResult res = kl_project(j, f, tight());
    const double oracle = grid_projection_value(j, f, 200);
    CHECK(std::abs(res.kl_value - oracle) <= 2e-3);
    CHECK(res.kl_value <= oracle + 1e-12);  // the grid cannot beat the optimum
  }
}
