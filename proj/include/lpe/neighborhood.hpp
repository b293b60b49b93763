// Copyright 2026 The LPE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LPE_NEIGHBORHOOD_HPP_
#define LPE_NEIGHBORHOOD_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lpe/error.hpp"
#include "lpe/geometry.hpp"

namespace lpe {

/// K-th nearest neighbour radius of every training point (self excluded).
struct KnnStats {
  std::size_t k = 0;
  std::vector<double> radii;

  friend bool operator==(const KnnStats&, const KnnStats&) = default;
};

/// Degree of every training point in the epsilon-graph (self excluded,
/// boundary inclusive).
struct EpsStats {
  double epsilon = 0.0;
  std::vector<std::size_t> degrees;

  friend bool operator==(const EpsStats&, const EpsStats&) = default;
};

namespace detail {

inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be a positive finite number");
  }
}

// k is 1-based.
inline double kth_smallest(std::vector<double> values, std::size_t k) {
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

}  // namespace detail

inline KnnStats knn_radii(const DistanceMatrix& dm, std::size_t k) {
  const std::size_t n = dm.size();
  if (k < 1 || k + 1 > n) {
    throw ValidationError("k=" + std::to_string(k) + " must lie in [1, n-1] with n=" + std::to_string(n));
  }
  KnnStats stats{k, std::vector<double>(n)};
  std::vector<double> others(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dm.row(i);
    std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(i), others.begin());
    std::copy(row.begin() + static_cast<std::ptrdiff_t>(i) + 1, row.end(),
              others.begin() + static_cast<std::ptrdiff_t>(i));
    stats.radii[i] = detail::kth_smallest(others, k);
  }
  return stats;
}

inline EpsStats eps_degrees(const DistanceMatrix& dm, double epsilon) {
  detail::check_epsilon(epsilon);
  const std::size_t n = dm.size();
  EpsStats stats{epsilon, std::vector<std::size_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dm.row(i);
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && row[j] <= epsilon) ++count;
    }
    stats.degrees[i] = count;
  }
  return stats;
}

/// K-th smallest distance from a query to the n training points.
inline double query_radius(std::span<const double> query_dists, std::size_t k) {
  if (k < 1 || k > query_dists.size()) {
    throw ValidationError("k=" + std::to_string(k) + " must lie in [1, n] with n=" +
                          std::to_string(query_dists.size()));
  }
  return detail::kth_smallest({query_dists.begin(), query_dists.end()}, k);
}

/// Number of training points within epsilon of a query.
inline std::size_t query_degree(std::span<const double> query_dists, double epsilon) {
  detail::check_epsilon(epsilon);
  return static_cast<std::size_t>(
      std::count_if(query_dists.begin(), query_dists.end(), [&](double d) { return d <= epsilon; }));
}

}  // namespace lpe

#endif  // LPE_NEIGHBORHOOD_HPP_
