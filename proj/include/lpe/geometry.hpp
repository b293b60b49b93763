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

#ifndef LPE_GEOMETRY_HPP_
#define LPE_GEOMETRY_HPP_

/*
 Distance backends.

 Three kinds are supported:
   euclidean           plain L2
   weighted(w)         sqrt(sum_j w_j (x_j - y_j)^2)
   geodesic(k_geo)     shortest path over the symmetrized k_geo-NN graph,
                       Euclidean edge weights

 The geodesic graph joins i and j when either one is among the other's k_geo
 nearest neighbours (ties broken by ascending index). A disconnected graph is
 reported through DisconnectedGraphError; infinite distances never escape.

 Geodesic entries are clamped from below by the Euclidean entry. In exact
 arithmetic a path can never be shorter than the straight segment, so the
 clamp only removes rounding noise; it also makes geodesic(k_geo = n-1)
 coincide with the Euclidean matrix bit for bit.
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpe/dataset.hpp"
#include "lpe/error.hpp"

namespace lpe {

inline double euclidean_distance(PointView a, PointView b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

inline double weighted_distance(PointView a, PointView b, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += weights[j] * diff * diff;
  }
  return std::sqrt(sum);
}

/// Which distance function the pipeline uses.
class DistanceBackend {
 public:
  struct Euclidean {
    friend bool operator==(const Euclidean&, const Euclidean&) = default;
  };
  struct Weighted {
    std::vector<double> weights;
    friend bool operator==(const Weighted&, const Weighted&) = default;
  };
  struct Geodesic {
    std::size_t k_geo;
    friend bool operator==(const Geodesic&, const Geodesic&) = default;
  };
  using Kind = std::variant<Euclidean, Weighted, Geodesic>;

  DistanceBackend() = default;

  static DistanceBackend euclidean() { return DistanceBackend(Euclidean{}); }

  static DistanceBackend weighted(std::vector<double> weights) {
    bool any_positive = false;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("coordinate weights must be finite and nonnegative");
      }
      any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw ValidationError("weighted metric needs at least one positive weight");
    return DistanceBackend(Weighted{std::move(weights)});
  }

  static DistanceBackend geodesic(std::size_t k_geo) {
    if (k_geo < 1) throw ValidationError("geodesic neighbour count k_geo must be at least 1");
    return DistanceBackend(Geodesic{k_geo});
  }

  const Kind& kind() const { return kind_; }
  bool is_euclidean() const { return std::holds_alternative<Euclidean>(kind_); }
  bool is_weighted() const { return std::holds_alternative<Weighted>(kind_); }
  bool is_geodesic() const { return std::holds_alternative<Geodesic>(kind_); }

  const std::vector<double>& weights() const { return std::get<Weighted>(kind_).weights; }
  std::size_t k_geo() const { return std::get<Geodesic>(kind_).k_geo; }

  /// Checks the backend against a dataset of n points in dimension d.
  void validate(std::size_t n, std::size_t d) const {
    if (is_weighted() && weights().size() != d) {
      throw ValidationError("weight vector has " + std::to_string(weights().size()) +
                            " entries but data dimension is " + std::to_string(d));
    }
    if (is_geodesic() && k_geo() >= n) {
      throw ValidationError("geodesic k_geo=" + std::to_string(k_geo()) +
                            " must be smaller than the number of points n=" + std::to_string(n));
    }
  }

  /// Distance of the underlying point metric (Euclidean for geodesic).
  double base_distance(PointView a, PointView b) const {
    if (is_weighted()) return weighted_distance(a, b, weights());
    return euclidean_distance(a, b);
  }

  std::string name() const {
    if (is_weighted()) return "weighted";
    if (is_geodesic()) return "geodesic";
    return "euclidean";
  }

  friend bool operator==(const DistanceBackend&, const DistanceBackend&) = default;

 private:
  explicit DistanceBackend(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_ = Euclidean{};
};

/// Dense n x n symmetric distance matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  /// Sets d_ij and d_ji together.
  void set(std::size_t i, std::size_t j, double value) {
    values_[i * n_ + j] = value;
    values_[j * n_ + i] = value;
  }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

  double max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

namespace detail {

inline DistanceMatrix base_matrix(const Dataset& data, const DistanceBackend& backend) {
  const std::size_t n = data.size();
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dm.set(i, j, backend.base_distance(data[i], data[j]));
    }
  }
  return dm;
}

/// Indices of the k smallest entries of dists (skipping `skip`), ordered by
/// (distance, index).
inline std::vector<std::size_t> nearest_indices(std::span<const double> dists, std::size_t k,
                                                std::size_t skip) {
  std::vector<std::size_t> idx;
  idx.reserve(dists.size());
  for (std::size_t j = 0; j < dists.size(); ++j) {
    if (j != skip) idx.push_back(j);
  }
  k = std::min(k, idx.size());
  auto less = [&](std::size_t a, std::size_t b) {
    return dists[a] < dists[b] || (dists[a] == dists[b] && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), less);
  idx.resize(k);
  return idx;
}

struct Edge {
  std::size_t to;
  double weight;
};

using Adjacency = std::vector<std::vector<Edge>>;

/// Symmetrized k-NN graph over a base distance matrix.
inline Adjacency knn_graph(const DistanceMatrix& base, std::size_t k) {
  const std::size_t n = base.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : nearest_indices(base.row(i), k, i)) {
      edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Adjacency adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back({b, base(a, b)});
    adj[b].push_back({a, base(a, b)});
  }
  return adj;
}

inline std::vector<std::vector<std::size_t>> connected_components(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = true;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (const Edge& e : adj[comp[head]]) {
        if (!seen[e.to]) {
          seen[e.to] = true;
          comp.push_back(e.to);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

[[noreturn]] inline void throw_disconnected(std::vector<std::vector<std::size_t>> components,
                                            std::size_t k_geo) {
  std::string msg = "geodesic graph with k_geo=" + std::to_string(k_geo) + " is disconnected: " +
                    std::to_string(components.size()) + " components (";
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (c > 0) msg += "; ";
    if (c == 8) {
      msg += "...";
      break;
    }
    msg += "size " + std::to_string(components[c].size()) + " starting at point " +
           std::to_string(components[c].front());
  }
  msg += "); increase k_geo";
  throw DisconnectedGraphError(msg, std::move(components));
}

/// Single-source shortest paths; unreachable nodes stay at +inf.
inline std::vector<double> dijkstra(const Adjacency& adj, std::size_t source) {
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Edge& e : adj[u]) {
      const double cand = d + e.weight;
      if (cand < dist[e.to]) {
        dist[e.to] = cand;
        heap.emplace(cand, e.to);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// All pairwise distances under the backend.
inline DistanceMatrix pairwise_distances(const Dataset& data, const DistanceBackend& backend) {
  const std::size_t n = data.size();
  if (n < 2) throw ValidationError("pairwise distances need at least 2 points, got " + std::to_string(n));
  backend.validate(n, data.dim());

  DistanceMatrix base = detail::base_matrix(data, backend);
  if (!backend.is_geodesic()) return base;

  const detail::Adjacency adj = detail::knn_graph(base, backend.k_geo());
  auto components = detail::connected_components(adj);
  if (components.size() > 1) detail::throw_disconnected(std::move(components), backend.k_geo());

  DistanceMatrix geo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> dist = detail::dijkstra(adj, i);
    for (std::size_t j = i + 1; j < n; ++j) geo.set(i, j, std::max(dist[j], base(i, j)));
  }
  return geo;
}

/// Geodesic distances from a query to every training point, given the
/// training set's geodesic matrix. The query is linked to its k_geo
/// Euclidean-nearest training points and paths continue through the
/// training graph.
inline std::vector<double> geodesic_distances_to_set(PointView query, const Dataset& data,
                                                     const DistanceMatrix& training_geodesic,
                                                     std::size_t k_geo) {
  const std::size_t n = data.size();
  std::vector<double> direct(n);
  for (std::size_t i = 0; i < n; ++i) direct[i] = euclidean_distance(query, data[i]);
  const auto anchors = detail::nearest_indices(direct, k_geo, n);

  std::vector<double> out(n, std::numeric_limits<double>::infinity());
  for (std::size_t a : anchors) {
    const auto row = training_geodesic.row(a);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(out[i], direct[a] + row[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(out[i])) {
      throw ComputationError("training point " + std::to_string(i) +
                             " is unreachable from the query in the geodesic graph");
    }
    out[i] = std::max(out[i], direct[i]);
  }
  return out;
}

/// Distances from a query to each of the n data points. For the geodesic
/// kind this rebuilds the training graph; reuse NominalModel (which caches
/// the training matrix) when scoring many queries.
inline std::vector<double> distances_to_set(PointView query, const Dataset& data,
                                            const DistanceBackend& backend) {
  require_dim(query, data.dim());
  if (backend.is_geodesic()) {
    const DistanceMatrix geo = pairwise_distances(data, backend);
    return geodesic_distances_to_set(query, data, geo, backend.k_geo());
  }
  backend.validate(data.size(), data.dim());
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = backend.base_distance(query, data[i]);
  return out;
}

}  // namespace lpe

#endif  // LPE_GEOMETRY_HPP_
