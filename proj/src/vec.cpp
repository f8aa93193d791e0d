#include "byzpg/vec.hpp"

#include <algorithm>
#include <stdexcept>

namespace byzpg {

ParamVector vec_mean(const std::vector<ParamVector>& vs) {
  if (vs.empty()) throw std::invalid_argument("vec_mean: empty input");
  ParamVector acc(vs[0].size(), 0.0);
  for (const auto& v : vs) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(vs.size());
  for (double& x : acc) x *= inv;
  return acc;
}

ParamVector vec_mean_indices(const std::vector<ParamVector>& vs, const std::vector<int>& idx) {
  if (idx.empty()) throw std::invalid_argument("vec_mean_indices: empty selection");
  ParamVector acc(vs[static_cast<std::size_t>(idx[0])].size(), 0.0);
  for (int j : idx) {
    const auto& v = vs[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(idx.size());
  for (double& x : acc) x *= inv;
  return acc;
}

double max_pairwise_distance(const std::vector<ParamVector>& vs, const std::vector<int>& idx) {
  double worst = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      worst = std::max(worst, vec_dist2(vs[static_cast<std::size_t>(idx[a])],
                                        vs[static_cast<std::size_t>(idx[b])]));
    }
  }
  return std::sqrt(worst);
}

bool vec_all_finite(const ParamVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace byzpg
