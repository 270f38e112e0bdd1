#pragma once

// Deliberately simple reference computations for tests. Nothing here shares
// code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "nashann/core.hpp"

namespace naive {

inline std::vector<double> utils(const std::vector<nashann::VectorId>& ids,
                                 const std::vector<double>& sims,
                                 const nashann::AttributeTable& attrs) {
  std::vector<double> u(attrs.num_attributes(), 0.0);
  for (auto id : ids) {
    for (auto a : attrs.attributes_of(id)) u[a] += sims[id];
  }
  return u;
}

// Product form for p == 0, power mean otherwise.
inline double welfare(const std::vector<double>& u, double p, double eta) {
  const double c = static_cast<double>(u.size());
  if (p == 0.0) {
    double prod = 1.0;
    for (double x : u) prod *= x + eta;
    return std::pow(prod, 1.0 / c);
  }
  double s = 0.0;
  for (double x : u) s += std::pow(x + eta, p);
  return std::pow(s / c, 1.0 / p);
}

// Best welfare over all k-subsets, by plain recursion.
inline double best_welfare(const std::vector<double>& sims,
                           const nashann::AttributeTable& attrs, std::size_t k,
                           double p, double eta) {
  std::vector<nashann::VectorId> cur;
  double best = -1.0;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      best = std::max(best, welfare(utils(cur, sims, attrs), p, eta));
      return;
    }
    for (std::size_t i = start; i < sims.size(); ++i) {
      cur.push_back(static_cast<nashann::VectorId>(i));
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return best;
}

// Ids sorted by score descending then id ascending, truncated to k.
inline std::vector<nashann::VectorId> sort_topk(const std::vector<double>& sims,
                                                std::vector<nashann::VectorId> ids,
                                                std::size_t k) {
  std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) {
    return sims[a] > sims[b] || (sims[a] == sims[b] && a < b);
  });
  if (ids.size() > k) ids.resize(k);
  return ids;
}

inline std::vector<double> score_all(const nashann::VectorSet& data,
                                     const std::vector<float>& q,
                                     const nashann::SimilarityFn& fn) {
  std::vector<double> s(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    s[i] = nashann::similarity(fn, q, data.row(i));
  }
  return s;
}

}  // namespace naive
