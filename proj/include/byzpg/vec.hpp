#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace byzpg {

/// Flat parameter vector; the unit exchanged between agents.
using ParamVector = std::vector<double>;

inline void vec_axpy(ParamVector& y, double a, const ParamVector& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline ParamVector vec_scaled(const ParamVector& x, double a) {
  ParamVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

inline double vec_dot(const ParamVector& a, const ParamVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double vec_dist2(const ParamVector& a, const ParamVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double vec_norm2(const ParamVector& a) { return vec_dot(a, a); }
inline double vec_norm(const ParamVector& a) { return std::sqrt(vec_norm2(a)); }
inline double vec_dist(const ParamVector& a, const ParamVector& b) { return std::sqrt(vec_dist2(a, b)); }

/// Mean over all vectors, accumulated in index order.
ParamVector vec_mean(const std::vector<ParamVector>& vs);

/// Mean over vs[i] for i in idx, accumulated in the order given by idx.
ParamVector vec_mean_indices(const std::vector<ParamVector>& vs, const std::vector<int>& idx);

/// Max pairwise Euclidean distance over vs[i] for i in idx.
double max_pairwise_distance(const std::vector<ParamVector>& vs, const std::vector<int>& idx);

bool vec_all_finite(const ParamVector& v);

}  // namespace byzpg
