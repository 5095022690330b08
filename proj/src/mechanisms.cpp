#include "car/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "car/random.hpp"

namespace car {

namespace {

std::vector<std::string> numbered_labels(int n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::string status_label(int c, int delta) {
  return "(" + std::to_string(c) + "," + std::to_string(delta) + ")";
}

std::vector<std::string> status_labels(int k) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(2 * k - 1));
  for (int c = 1; c < k; ++c) {
    labels.push_back(status_label(c, 1));
    labels.push_back(status_label(c, 0));
  }
  labels.push_back(status_label(k, 1));
  return labels;
}

}  // namespace

void GridSpec::validate() const {
  if (k < 2) throw std::invalid_argument("GridSpec: k must be at least 2");
  if (!(truncation > 0.0)) {
    throw std::invalid_argument("GridSpec: truncation must be positive");
  }
  if (!(rate_y > 0.0 && rate_c > 0.0)) {
    throw std::invalid_argument("GridSpec: rates must be positive");
  }
}

Eigen::Index CurrentStatusLayout::index(int c, int delta) const {
  if (c < 1 || c > k || (delta != 0 && delta != 1) || (c == k && delta == 0)) {
    throw std::invalid_argument("CurrentStatusLayout: no such outcome");
  }
  return delta == 1 ? 2 * (c - 1) : 2 * (c - 1) + 1;
}

int CurrentStatusLayout::cell_of(Eigen::Index x_index) const {
  return static_cast<int>(x_index / 2) + 1;
}

int CurrentStatusLayout::delta_of(Eigen::Index x_index) const {
  return x_index % 2 == 0 ? 1 : 0;
}

CurrentStatusLayout CurrentStatusLayout::of(const CoarseningJoint& j) {
  const Eigen::Index nx = j.x_size();
  if (nx % 2 == 0) {
    throw std::invalid_argument(
        "current-status model expected (odd outcome count)");
  }
  const int k = static_cast<int>((nx + 1) / 2);
  if (j.y_size() != k || j.x_space().labels() != status_labels(k)) {
    throw std::invalid_argument("model is not a current_status(k) joint");
  }
  return CurrentStatusLayout{k};
}

CoarseningJoint current_status(int k) {
  if (k < 2) throw std::invalid_argument("current_status: k must be >= 2");
  const Eigen::Index nx = 2 * k - 1;
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(k, nx);
  const CurrentStatusLayout layout{k};
  const double cell = 1.0 / (double(k) * double(k));
  for (int y = 1; y <= k; ++y) {
    for (int c = 1; c <= k; ++c) {
      const int delta = y <= c ? 1 : 0;
      if (c == k && delta == 0) continue;  // impossible: y <= k always
      table(y - 1, layout.index(c, delta)) += cell;
    }
  }
  return build_joint(std::move(table), numbered_labels(k), status_labels(k));
}

CoarseningJoint right_censored(int k) {
  if (k < 2) throw std::invalid_argument("right_censored: k must be >= 2");
  const Eigen::Index nx = 2 * k - 1;
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(k, nx);
  const CurrentStatusLayout layout{k};  // same (t, delta) outcome layout
  const double cell = 1.0 / (double(k) * double(k));
  for (int y = 1; y <= k; ++y) {
    for (int c = 1; c <= k; ++c) {
      const int delta = y <= c ? 1 : 0;
      const int t = delta == 1 ? y : c;
      if (t == k && delta == 0) continue;  // zero-mass outcome
      table(y - 1, layout.index(t, delta)) += cell;
    }
  }
  return build_joint(std::move(table), numbered_labels(k), status_labels(k));
}

CoarseningJoint missing_data(const BaseSpacePtr& y_space) {
  const Eigen::Index n = y_space->size();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n, n + 1);
  for (Eigen::Index y = 0; y < n; ++y) {
    table(y, y) = 0.5 * y_space->weight(y);
    table(y, n) = 0.5 * y_space->weight(y);
  }
  std::vector<std::string> x_labels = y_space->labels();
  x_labels.push_back("†");  // the missing marker
  return build_joint(std::move(table), y_space->labels(), std::move(x_labels));
}

CoarseningJoint subset_coarsening(int m) {
  if (m < 2 || m > 12) {
    throw std::invalid_argument("subset_coarsening: m must be in [2, 12]");
  }
  // Nonempty subsets of {1..m}, ordered by (size, lexicographic on members).
  std::vector<unsigned> subsets;
  subsets.reserve((1u << m) - 1u);
  for (unsigned mask = 1; mask < (1u << m); ++mask) subsets.push_back(mask);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](unsigned a, unsigned b) {
                     const int ca = __builtin_popcount(a);
                     const int cb = __builtin_popcount(b);
                     if (ca != cb) return ca < cb;
                     // lexicographic on sorted member lists = numeric order
                     // of the reversed bit pattern; compare lowest set bits.
                     unsigned x = a;
                     unsigned y = b;
                     while (x && y) {
                       const unsigned lx = x & (~x + 1u);
                       const unsigned ly = y & (~y + 1u);
                       if (lx != ly) return lx < ly;
                       x ^= lx;
                       y ^= ly;
                     }
                     return x < y;
                   });

  const Eigen::Index nx = static_cast<Eigen::Index>(subsets.size());
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(m, nx);
  const double mass = std::ldexp(1.0, 1 - m) / double(m);  // 2^{1-m}/m
  std::vector<std::string> x_labels;
  x_labels.reserve(subsets.size());
  for (Eigen::Index a = 0; a < nx; ++a) {
    const unsigned mask = subsets[static_cast<std::size_t>(a)];
    std::string label = "{";
    for (int y = 0; y < m; ++y) {
      if (mask & (1u << y)) {
        if (label.size() > 1) label += ",";
        label += std::to_string(y + 1);
        table(y, a) = mass;
      }
    }
    label += "}";
    x_labels.push_back(std::move(label));
  }
  return build_joint(std::move(table), numbered_labels(m),
                     std::move(x_labels));
}

CoarseningJoint product_coarsening(const BaseSpacePtr& y_space,
                                   const BaseSpacePtr& x_space) {
  Eigen::MatrixXd table = y_space->weights() * x_space->weights().transpose();
  return build_joint(std::move(table), y_space->labels(), x_space->labels());
}

Eigen::MatrixXd comonotone_current_status_table(int k) {
  if (k < 4 || k % 2 != 0) {
    throw std::invalid_argument(
        "comonotone_current_status_table: k must be even and >= 4");
  }
  const CurrentStatusLayout layout{k};
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(k, layout.size());
  const int half = k / 2;
  // delta = 1 half: C at or below the midpoint, Y = C (tie counts as 1).
  for (int c = 1; c <= half; ++c) {
    table(c - 1, layout.index(c, 1)) = 0.5 / double(half);
  }
  // delta = 0 half: C above the midpoint with Y = k > C; the discrete
  // outcome (k, 0) does not exist, so the mass sits on the interior cells.
  for (int c = half + 1; c <= k - 1; ++c) {
    table(k - 1, layout.index(c, 0)) = 0.5 / double(half - 1);
  }
  return table;
}

SampleBatch sample_car(const CoarseningJoint& j, const Density& h,
                       const Eigen::VectorXd& g, Eigen::Index n,
                       std::uint64_t seed) {
  if (!h.space().same_as(j.y_space())) {
    throw std::invalid_argument("sample_car: h does not live on the Y space");
  }
  const Eigen::VectorXd adjoint = apply_S_star(j, g);
  if ((adjoint.array() - 1.0).abs().maxCoeff() > kAdjointTol) {
    throw std::invalid_argument("sample_car: S*(g) != 1");
  }

  // Cumulative masses: Y ~ h Q0; X | Y = y proportional to g(x) table[y][x].
  const Eigen::Index ny = j.y_size();
  Eigen::VectorXd y_cum = h.values().cwiseProduct(j.y_space().weights());
  for (Eigen::Index i = 1; i < ny; ++i) y_cum[i] += y_cum[i - 1];
  // One cumulative column per Y point.
  Eigen::MatrixXd x_cum = (j.table() * g.asDiagonal()).transpose();
  for (Eigen::Index r = 1; r < x_cum.rows(); ++r) {
    x_cum.row(r) += x_cum.row(r - 1);
  }

  SampleBatch batch;
  batch.seed = seed;
  batch.n = n;
  batch.indices.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index y = sample_cumulative(y_cum, rng.uniform());
    batch.indices.push_back(sample_cumulative(x_cum.col(y), rng.uniform()));
  }
  return batch;
}

SampleBatch sample_joint(const Eigen::MatrixXd& table, Eigen::Index n,
                         std::uint64_t seed) {
  if ((table.array() < 0.0).any()) {
    throw std::invalid_argument("sample_joint: negative entry");
  }
  const double total = table.sum();
  if (std::abs(total - 1.0) > 1e-8) {
    throw std::invalid_argument("sample_joint: table is not normalized");
  }
  // Only the X marginal matters for the record stream.
  Eigen::VectorXd x_cum = table.colwise().sum().transpose();
  for (Eigen::Index c = 1; c < x_cum.size(); ++c) x_cum[c] += x_cum[c - 1];

  SampleBatch batch;
  batch.seed = seed;
  batch.n = n;
  batch.indices.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    batch.indices.push_back(sample_cumulative(x_cum, rng.uniform()));
  }
  return batch;
}

SampleBatch multiplicative_sampler(const GridSpec& spec, bool car,
                                   Eigen::Index n, std::uint64_t seed) {
  spec.validate();
  SampleBatch batch;
  batch.seed = seed;
  batch.n = n;
  batch.values.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = rng.exponential(spec.rate_y);
    double x;
    if (car) {
      x = rng.exponential(spec.rate_c) * y;
    } else {
      // Dependent alternative: C = (2 / Y) V with lognormal V, so X = 2V has
      // an interior mode near 2 instead of a decreasing density.
      const double v = std::exp(0.25 * rng.gaussian());
      const double c = 2.0 * v / y;
      x = c * y;
    }
    batch.values.push_back(x);
  }
  return batch;
}

}  // namespace car
