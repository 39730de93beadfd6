#pragma once

// The embedding F -> (n^{-1/q} F(.))_n into a weak-L^q space over
// circle x N (commutative) and its matrix analogue, truncated at n_max.

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <vector>

#include "kclosed/circle_function.hpp"
#include "kclosed/common.hpp"
#include "kclosed/matrix.hpp"

namespace kclosed {

struct EmbeddingData {
  double sup = 0.0;         // sup over breakpoints of the truncated functional
  double t_at_sup = 0.0;
  double target = 0.0;      // the value the sup converges to
  double tail_bound = 0.0;  // contribution of n > n_max at t_at_sup
  double residual = 0.0;    // |sup - target| / target (0 when target = 0)
  long n_max = 0;
};

// S(t) = t^q sum_{n <= n_max} m{ n^{-1/q}|F| >= t } maximised over the
// breakpoints t = n^{-1/q}|F(z_k)|; the target is the integral of |F|^q.
inline EmbeddingData kq_embed(const CircleFunction& f, double q, long n_max) {
  require(q > 1.0 && std::isfinite(q), "kq_embed: q must lie in (1, inf)");
  require(n_max >= 1, "kq_embed: n_max must be >= 1");
  EmbeddingData out;
  out.n_max = n_max;
  std::map<double, double, std::greater<>> mass;  // distinct |F| values -> measure
  const double w = 1.0 / static_cast<double>(f.size());
  for (const auto& v : f.samples())
    if (std::abs(v) > 0.0) mass[std::abs(v)] += w;
  for (const auto& [v, m] : mass) out.target += m * std::pow(v, q);
  if (mass.empty()) return out;

  // Merge the decreasing sequences n^{-1/q} v_j, n = 1..n_max.
  struct Head {
    double t;
    long n;
    double v, m;
    bool operator<(const Head& o) const { return t < o.t; }
  };
  std::priority_queue<Head> heap;
  for (const auto& [v, m] : mass) heap.push({v, 1, v, m});
  double count = 0.0;
  while (!heap.empty()) {
    const double t = heap.top().t;
    while (!heap.empty() && heap.top().t >= t * (1.0 - 1e-14)) {
      Head h = heap.top();
      heap.pop();
      count += h.m;
      if (h.n < n_max) {
        ++h.n;
        h.t = h.v * std::pow(static_cast<double>(h.n), -1.0 / q);
        heap.push(h);
      }
    }
    const double s = std::pow(t, q) * count;
    if (s > out.sup) {
      out.sup = s;
      out.t_at_sup = t;
    }
  }
  for (const auto& [v, m] : mass) {
    const double full = std::floor(std::pow(v / out.t_at_sup, q) * (1.0 + 1e-14));
    out.tail_bound += m * std::max(0.0, full - static_cast<double>(n_max));
  }
  out.tail_bound *= std::pow(out.t_at_sup, q);
  out.residual = std::abs(out.sup - out.target) / out.target;
  return out;
}

// Weak-C_q quasi-norm sup_k (k+1)^{1/q} s_k of the sorted multiset
// { n^{-1/q} a_j(x) : n <= n_max }; the target is |x|_q.
inline EmbeddingData kq_embed_matrix(const MatrixOperator& x, double q, long n_max) {
  require(q > 1.0 && std::isfinite(q), "kq_embed_matrix: q must lie in (1, inf)");
  require(n_max >= 1, "kq_embed_matrix: n_max must be >= 1");
  EmbeddingData out;
  out.n_max = n_max;
  const SingularValues sv = singular_values(x);
  out.target = lp_of_values(sv.values, q);
  if (out.target == 0.0) return out;
  std::vector<double> all;
  all.reserve(sv.size() * static_cast<std::size_t>(n_max));
  for (Eigen::Index j = 0; j < sv.values.size(); ++j) {
    if (sv.values[j] <= 1e-12 * sv.values[0]) continue;
    for (long n = 1; n <= n_max; ++n) all.push_back(sv.values[j] * std::pow(static_cast<double>(n), -1.0 / q));
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  for (std::size_t k = 0; k < all.size(); ++k) {
    const double s = std::pow(static_cast<double>(k + 1), 1.0 / q) * all[k];
    if (s > out.sup) {
      out.sup = s;
      out.t_at_sup = all[k];
    }
  }
  // multiset entries dropped by the truncation that are >= the value at the sup
  for (Eigen::Index j = 0; j < sv.values.size(); ++j) {
    if (out.t_at_sup <= 0.0) break;
    const double full = std::floor(std::pow(sv.values[j] / out.t_at_sup, q) * (1.0 + 1e-14));
    out.tail_bound += std::max(0.0, full - static_cast<double>(n_max));
  }
  out.residual = std::abs(out.sup - out.target) / out.target;
  return out;
}

}  // namespace kclosed
