#include "car/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace car {

Eigen::Index sample_cumulative(const Eigen::Ref<const Eigen::VectorXd>& cumulative,
                               double u) {
  const Eigen::Index n = cumulative.size();
  if (n == 0) throw std::invalid_argument("sample_cumulative: empty vector");
  const double target = u * cumulative[n - 1];
  const double* begin = cumulative.data();
  const double* it = std::upper_bound(begin, begin + n, target);
  Eigen::Index idx = it - begin;
  return std::min(idx, n - 1);
}

}  // namespace car
