#include "car/polar.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "car/random.hpp"
#include "car/simplex_lp.hpp"

namespace car {

namespace {

constexpr double kRankRelTol = 1e-9;
constexpr double kVertexDedupTol = 1e-7;

void require_x_density(const CoarseningJoint& j, const Density& k,
                       const char* where) {
  if (!k.space().same_as(j.x_space())) {
    throw std::invalid_argument(std::string(where) +
                                ": density does not live on the X space");
  }
}

// Orthonormal basis (w.r.t. the P0 inner product) of the column span of the
// S matrix, via SVD of the sqrt(P0)-scaled columns.
Eigen::MatrixXd span_basis_of(const CoarseningJoint& j) {
  const Eigen::VectorXd sqrt_p0 = j.x_space().weights().cwiseSqrt();
  const Eigen::MatrixXd scaled = sqrt_p0.asDiagonal() * j.s_matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double threshold = kRankRelTol * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++rank;
  }
  const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  return sqrt_p0.cwiseInverse().asDiagonal() * u;
}

Eigen::Index rank_of_s(const CoarseningJoint& j) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j.s_star_matrix());
  const auto& sv = svd.singularValues();
  const double threshold = kRankRelTol * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++rank;
  }
  return rank;
}

// Normalizes a nonnegative span point to unit P0 mass, clamping away the
// numerical negatives produced by the linear solves.
Eigen::VectorXd clamp_normalize(const CoarseningJoint& j, Eigen::VectorXd k) {
  k = k.cwiseMax(0.0);
  const double mass = j.x_space().integrate(k);
  if (!(mass > 0.0)) {
    throw std::runtime_error("bipolar vertex with zero mass");
  }
  return k / mass;
}

}  // namespace

MembershipCert membership_M(const CoarseningJoint& j, const Density& k,
                            double tol) {
  require_x_density(j, k, "membership_M");
  const Eigen::Index nx = j.x_size();
  const Eigen::Index ny = j.y_size();

  // Find h >= 0 with S h = k. The density normalization of h is implied by
  // S*(1) = 1 but carried as an explicit anchor row.
  Eigen::MatrixXd A(nx + 1, ny);
  A.topRows(nx) = j.s_matrix();
  A.row(nx) = j.y_space().weights().transpose();
  Eigen::VectorXd b(nx + 1);
  b.head(nx) = k.values();
  b[nx] = 1.0;

  const lp::Feasibility feas = lp::linear_feasible(A, b);

  MembershipCert cert;
  cert.tolerance = tol;
  if (feas.feasible) {
    Density witness = make_density(feas.x, j.y_space_ptr());
    const double defect =
        (j.apply_s(witness.values()) - k.values()).cwiseAbs().maxCoeff();
    if (defect > tol) {
      throw std::runtime_error(
          "membership_M: LP returned a feasible point that misses the target");
    }
    cert.verdict = MembershipCert::Verdict::kInside;
    cert.defect = defect;
    cert.witness_h = std::move(witness);
    return cert;
  }

  // Farkas dual (y, y0): y'S_col(y) + y0 Q0(y) <= eps for all y, while
  // y'k + y0 > 0. In the P0 inner product the separator is phi = y / P0 with
  // offset -y0.
  Separator sep;
  sep.phi = feas.farkas.head(nx).cwiseQuotient(j.x_space().weights());
  sep.offset = -feas.farkas[nx];
  sep.margin = j.x_space().integrate(k.values().cwiseProduct(sep.phi)) -
               sep.offset;
  cert.verdict = MembershipCert::Verdict::kOutside;
  cert.separator = std::move(sep);
  return cert;
}

PolarDescription bipolar_basis(const CoarseningJoint& j) {
  PolarDescription desc;
  desc.span_basis = span_basis_of(j);
  desc.affine_dim_m_polar = j.x_size() - rank_of_s(j);
  desc.feasible = true;
  return desc;
}

PolarDescription polar_M(const CoarseningJoint& j) {
  PolarDescription desc = bipolar_basis(j);

  // Maximize t subject to S* g = 1, g - t 1 - s = 0, all variables >= 0.
  // Any g in M° has P0-mean one, so the optimum is t = 1 attained by g = 1;
  // the LP is kept as the certifying route.
  const Eigen::Index nx = j.x_size();
  const Eigen::Index ny = j.y_size();
  const Eigen::Index nvar = nx + 1 + nx;  // g, t, slack
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ny + nx, nvar);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ny + nx);
  A.topLeftCorner(ny, nx) = j.s_star_matrix();
  b.head(ny).setOnes();
  A.bottomLeftCorner(nx, nx) = Eigen::MatrixXd::Identity(nx, nx);
  A.block(ny, nx, nx, 1) = -Eigen::VectorXd::Ones(nx);
  A.bottomRightCorner(nx, nx) = -Eigen::MatrixXd::Identity(nx, nx);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  c[nx] = -1.0;  // maximize t

  const lp::Result res = lp::solve(A, b, c);
  if (res.status == lp::Status::kOptimal && -res.objective > 1e-9) {
    desc.interior_point = res.x.head(nx);
  }
  return desc;
}

double span_residual(const CoarseningJoint& j, const PolarDescription& desc,
                     const Eigen::VectorXd& v) {
  const auto& p0 = j.x_space().weights();
  const Eigen::MatrixXd& basis = desc.span_basis;
  const Eigen::VectorXd coeffs =
      basis.transpose() * p0.cwiseProduct(v).matrix();
  const Eigen::VectorXd residual = v - basis * coeffs;
  return std::sqrt(p0.dot(residual.cwiseAbs2()));
}

Eigen::MatrixXd bipolar_vertices(const CoarseningJoint& j) {
  const Eigen::Index nx = j.x_size();
  if (nx > 20) {
    throw std::invalid_argument(
        "bipolar_vertices: exact mode supports |X| <= 20");
  }
  const Eigen::MatrixXd basis = span_basis_of(j);
  const Eigen::Index d = basis.cols();
  const Eigen::RowVectorXd mass_row =
      j.x_space().weights().transpose() * basis;

  std::vector<Eigen::VectorXd> vertices;
  auto push_unique = [&](const Eigen::VectorXd& k) {
    for (const auto& v : vertices) {
      if ((v - k).cwiseAbs().maxCoeff() < kVertexDedupTol) return;
    }
    vertices.push_back(k);
  };

  if (d == 1) {
    // The polytope is a single point.
    const double scale = mass_row[0];
    if (std::abs(scale) > 1e-14) {
      Eigen::VectorXd k = basis.col(0) / scale;
      if (k.minCoeff() > -1e-9) push_unique(clamp_normalize(j, k));
    }
  } else {
    // A vertex of span ∩ simplex is pinned by d-1 zero coordinates plus the
    // normalization; enumerate the candidate zero sets.
    std::vector<Eigen::Index> zero_set(static_cast<std::size_t>(d - 1));
    Eigen::MatrixXd system(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    rhs[d - 1] = 1.0;

    auto try_support = [&]() {
      for (Eigen::Index r = 0; r + 1 < d; ++r) {
        system.row(r) = basis.row(zero_set[static_cast<std::size_t>(r)]);
      }
      system.row(d - 1) = mass_row;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
      lu.setThreshold(1e-10);
      if (lu.rank() < d) return;
      const Eigen::VectorXd alpha = lu.solve(rhs);
      const Eigen::VectorXd k = basis * alpha;
      if (k.minCoeff() < -1e-9) return;
      if (std::abs(mass_row.dot(alpha) - 1.0) > 1e-8) return;
      push_unique(clamp_normalize(j, k));
    };

    // Lexicographic enumeration of (d-1)-subsets of the coordinates.
    for (Eigen::Index i = 0; i + 1 < d; ++i) zero_set[i] = i;
    while (true) {
      try_support();
      Eigen::Index pos = d - 2;
      while (pos >= 0 && zero_set[pos] == nx - (d - 1 - pos)) --pos;
      if (pos < 0) break;
      ++zero_set[pos];
      for (Eigen::Index q = pos + 1; q + 1 < d; ++q) {
        zero_set[q] = zero_set[q - 1] + 1;
      }
    }
  }

  Eigen::MatrixXd out(nx, static_cast<Eigen::Index>(vertices.size()));
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    out.col(c) = vertices[static_cast<std::size_t>(c)];
  }
  return out;
}

double l1_distance_to_M(const CoarseningJoint& j, const Eigen::VectorXd& k) {
  const Eigen::Index nx = j.x_size();
  const Eigen::Index ny = j.y_size();
  if (k.size() != nx) {
    throw std::invalid_argument("l1_distance_to_M: length mismatch");
  }
  // min sum_x P0(x) (u_x + v_x)  s.t.  S h + u - v = k, <h,1>_{Q0} = 1.
  const Eigen::Index nvar = ny + 2 * nx;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nx + 1, nvar);
  A.topLeftCorner(nx, ny) = j.s_matrix();
  A.block(0, ny, nx, nx) = Eigen::MatrixXd::Identity(nx, nx);
  A.block(0, ny + nx, nx, nx) = -Eigen::MatrixXd::Identity(nx, nx);
  A.row(nx).head(ny) = j.y_space().weights().transpose();
  Eigen::VectorXd b(nx + 1);
  b.head(nx) = k;
  b[nx] = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  c.segment(ny, nx) = j.x_space().weights();
  c.segment(ny + nx, nx) = j.x_space().weights();

  const lp::Result res = lp::solve(A, b, c);
  if (res.status != lp::Status::kOptimal) {
    throw std::runtime_error("l1_distance_to_M: LP failed");
  }
  return std::max(res.objective, 0.0);
}

double kl_gap_certificate(const CoarseningJoint& j, const Density& witness) {
  require_x_density(j, witness, "kl_gap_certificate");
  const PolarDescription desc = bipolar_basis(j);
  if (span_residual(j, desc, witness.values()) > 1e-8) {
    throw std::invalid_argument(
        "kl_gap_certificate: witness is not in span(M), hence not in the "
        "bipolar");
  }
  const double dist = l1_distance_to_M(j, witness.values());
  if (dist <= 1e-7) {
    throw std::invalid_argument(
        "kl_gap_certificate: witness lies in M; the gap would be zero");
  }
  return 0.25 * dist * dist;
}

namespace {

// Maximizes a random span direction over M°° and returns the optimal vertex.
Eigen::VectorXd maximize_over_bipolar(const CoarseningJoint& j,
                                      const Eigen::MatrixXd& basis,
                                      const Eigen::VectorXd& direction) {
  const Eigen::Index nx = j.x_size();
  const Eigen::Index d = basis.cols();
  // Variables: alpha+ (d), alpha- (d), slack s (nx).
  // Constraints: B(alpha+ - alpha-) - s = 0,  mass_row (alpha+ - alpha-) = 1.
  const Eigen::RowVectorXd mass_row =
      j.x_space().weights().transpose() * basis;
  const Eigen::Index nvar = 2 * d + nx;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nx + 1, nvar);
  A.topLeftCorner(nx, d) = basis;
  A.block(0, d, nx, d) = -basis;
  A.block(0, 2 * d, nx, nx) = -Eigen::MatrixXd::Identity(nx, nx);
  A.row(nx).head(d) = mass_row;
  A.row(nx).segment(d, d) = -mass_row;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nx + 1);
  b[nx] = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  c.head(d) = -direction;
  c.segment(d, d) = direction;

  const lp::Result res = lp::solve(A, b, c);
  if (res.status != lp::Status::kOptimal) {
    throw std::runtime_error("check_extension: direction LP failed");
  }
  const Eigen::VectorXd alpha = res.x.head(d) - res.x.segment(d, d);
  return basis * alpha;
}

}  // namespace

BipolarVerdict check_extension(const CoarseningJoint& j, bool exact,
                               const ExtensionParams& params) {
  BipolarVerdict verdict;
  verdict.membership_tol = params.membership_tol;

  auto consider = [&](const Eigen::VectorXd& candidate) -> bool {
    const Density k = make_density(candidate.cwiseMax(0.0), j.x_space_ptr());
    const MembershipCert cert = membership_M(j, k, params.membership_tol);
    if (cert.verdict == MembershipCert::Verdict::kInside) return false;
    verdict.equal = false;
    verdict.witness = k;
    verdict.kl_gap = kl_gap_certificate(j, k);
    return true;
  };

  if (exact) {
    verdict.mode = "exact";
    const Eigen::MatrixXd vertices = bipolar_vertices(j);
    verdict.vertices_checked = vertices.cols();
    verdict.equal = true;
    for (Eigen::Index c = 0; c < vertices.cols(); ++c) {
      if (consider(vertices.col(c))) break;
    }
    if (verdict.equal) {
      verdict.note = "all bipolar vertices lie in M";
    } else {
      verdict.note = "bipolar vertex outside M";
    }
    return verdict;
  }

  verdict.mode = "randomized";
  verdict.seed = params.seed;
  const Eigen::MatrixXd basis = span_basis_of(j);
  verdict.equal = true;
  int tried = 0;
  for (int i = 0; i < params.directions; ++i) {
    Rng rng(Rng::derive(params.seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd dir = rng.gaussian_vector(basis.cols());
    const double norm = dir.norm();
    if (norm < 1e-12) continue;
    dir /= norm;
    ++tried;
    const Eigen::VectorXd candidate = maximize_over_bipolar(j, basis, dir);
    if (consider(candidate)) break;
  }
  verdict.directions = tried;
  if (verdict.equal) {
    verdict.note = "no counterexample found in " + std::to_string(tried) +
                   " directions (not a proof of equality)";
  } else {
    verdict.note = "extreme point of the bipolar outside M";
  }
  return verdict;
}

}  // namespace car
