#include <doctest.h>

#include <cmath>

#include "car/random.hpp"
#include "car/simplex_lp.hpp"

using namespace car;

TEST_CASE("identity system is feasible with x = b") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd b(4);
  b << 0.5, 0.0, 2.0, 1.25;
  const lp::Feasibility f = lp::linear_feasible(a, b);
  CHECK(f.feasible);
  CHECK((f.x - b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(f.residual <= 1e-12);
}

TEST_CASE("negative right-hand side of a nonnegative row is infeasible") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 1.0;
  Eigen::VectorXd b(1);
  b << -1.0;
  const lp::Feasibility f = lp::linear_feasible(a, b);
  REQUIRE_FALSE(f.feasible);
  // Farkas: y'A <= 0 and y'b > 0; normalized this is y = -1.
  CHECK(f.farkas[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK((f.farkas.transpose() * a).maxCoeff() <= 1e-9);
  CHECK(f.farkas.dot(b) > 1e-9);
}

TEST_CASE("constructed feasible systems are reported feasible") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(Rng::derive(1234, seed));
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.uniform() * 4);
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng.uniform() * 5);
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) a(r, c) = rng.gaussian();
    }
    Eigen::VectorXd x0(n);
    for (Eigen::Index c = 0; c < n; ++c) x0[c] = rng.uniform();
    const Eigen::VectorXd b = a * x0;
    const lp::Feasibility f = lp::linear_feasible(a, b);
    REQUIRE(f.feasible);
    CHECK(f.residual <= 1e-8);
    CHECK(f.x.minCoeff() >= 0.0);
  }
}

TEST_CASE("infeasible systems come with a Farkas certificate") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(Rng::derive(77, seed));
    // x1 + x2 = small and x1 + x2 = large cannot both hold.
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 1.0, 1.0, 1.0;
    Eigen::VectorXd b(2);
    b << rng.uniform(), 2.0 + rng.uniform();
    const lp::Feasibility f = lp::linear_feasible(a, b);
    REQUIRE_FALSE(f.feasible);
    CHECK((f.farkas.transpose() * a).maxCoeff() <= 1e-9);
    CHECK(f.farkas.dot(b) > 1e-9);
  }
}

TEST_CASE("optimization agrees with a hand-solved LP") {
  // min -x1 - 2 x2 s.t. x1 + x2 + s1 = 4, x1 + 3 x2 + s2 = 6, x >= 0.
  // Optimum at (3, 1) with objective -5.
  Eigen::MatrixXd a(2, 4);
  a << 1, 1, 1, 0,  //
      1, 3, 0, 1;
  Eigen::VectorXd b(2);
  b << 4, 6;
  Eigen::VectorXd c(4);
  c << -1, -2, 0, 0;
  const lp::Result res = lp::solve(a, b, c);
  REQUIRE(res.status == lp::Status::kOptimal);
  CHECK(res.objective == doctest::Approx(-5.0).epsilon(1e-10));
  CHECK(res.x[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unbounded problems are detected") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, -1.0;
  Eigen::VectorXd b(1);
  b << 1.0;
  Eigen::VectorXd c(2);
  c << -1.0, 0.0;  // increase x1 (and x2) without bound
  const lp::Result res = lp::solve(a, b, c);
  CHECK(res.status == lp::Status::kUnbounded);
}

TEST_CASE("degenerate cycling-prone instances still terminate") {
  // Beale's classic cycling example for Dantzig pricing.
  Eigen::MatrixXd a(3, 7);
  a << 0.25, -8.0, -1.0, 9.0, 1, 0, 0,  //
      0.5, -12.0, -0.5, 3.0, 0, 1, 0,   //
      0.0, 0.0, 1.0, 0.0, 0, 0, 1;
  Eigen::VectorXd b(3);
  b << 0, 0, 1;
  Eigen::VectorXd c(7);
  c << -0.75, 150.0, -0.02, 6.0, 0, 0, 0;
  const lp::Result res = lp::solve(a, b, c);
  REQUIRE(res.status == lp::Status::kOptimal);
  CHECK(res.objective == doctest::Approx(-0.77).epsilon(1e-9));
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(lp::solve(Eigen::MatrixXd::Identity(2, 2),
                            Eigen::VectorXd::Ones(3),
                            Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
}
