#include "car/divergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace car {

Partition Partition::singletons(Eigen::Index n) {
  Partition p;
  p.blocks.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p.blocks.push_back({i});
  return p;
}

Partition Partition::whole(Eigen::Index n) {
  Partition p;
  p.blocks.emplace_back();
  for (Eigen::Index i = 0; i < n; ++i) p.blocks.front().push_back(i);
  return p;
}

void Partition::validate(Eigen::Index support_size) const {
  std::vector<char> seen(static_cast<std::size_t>(support_size), 0);
  Eigen::Index covered = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw std::invalid_argument("Partition: empty block");
    for (Eigen::Index i : block) {
      if (i < 0 || i >= support_size) {
        throw std::invalid_argument("Partition: index out of range");
      }
      if (seen[static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("Partition: blocks overlap");
      }
      seen[static_cast<std::size_t>(i)] = 1;
      ++covered;
    }
  }
  if (covered != support_size) {
    throw std::invalid_argument("Partition: blocks do not cover the support");
  }
}

double kl_divergence(const Density& f, const Density& h) {
  require_same_space(f, h, "kl_divergence");
  const auto& w = f.space().weights();
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double fi = f[i];
    if (fi == 0.0) continue;
    const double hi = h[i];
    if (hi == 0.0) return std::numeric_limits<double>::infinity();
    total += w[i] * fi * std::log(fi / hi);
  }
  return total < 0.0 ? 0.0 : total;
}

double l1_distance(const Density& f, const Density& h) {
  require_same_space(f, h, "l1_distance");
  return f.space().weights().dot(
      (f.values() - h.values()).cwiseAbs());
}

double kl_partition(const Density& f, const Density& h, const Partition& p) {
  require_same_space(f, h, "kl_partition");
  p.validate(f.size());
  const auto& w = f.space().weights();
  double total = 0.0;
  for (const auto& block : p.blocks) {
    double fmass = 0.0;
    double hmass = 0.0;
    for (Eigen::Index i : block) {
      fmass += w[i] * f[i];
      hmass += w[i] * h[i];
    }
    if (fmass == 0.0) continue;
    if (hmass == 0.0) return std::numeric_limits<double>::infinity();
    total += -std::log(hmass / fmass) * fmass;
  }
  return total;
}

}  // namespace car
