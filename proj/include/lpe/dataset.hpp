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

#ifndef LPE_DATASET_HPP_
#define LPE_DATASET_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpe/error.hpp"

namespace lpe {

/// Owned coordinates of a single point.
using Point = std::vector<double>;

/// Read-only view of a point's coordinates.
using PointView = std::span<const double>;

/// Ground-truth label values.
inline constexpr int kNominal = +1;
inline constexpr int kAnomaly = -1;

/// Per-column min/max captured from a training set. Maps each column onto
/// [0, 1]; constant columns map to 0.5.
struct NormalizationRecord {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dim() const { return min.size(); }

  double apply(std::size_t column, double value) const {
    const double lo = min[column];
    const double hi = max[column];
    if (hi == lo) return 0.5;
    return (value - lo) / (hi - lo);
  }

  friend bool operator==(const NormalizationRecord&, const NormalizationRecord&) = default;
};

/// An ordered collection of n points of a fixed dimension d, stored
/// row-major, with optional {+1, -1} labels.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ValidationError("dataset dimension must be at least 1");
  }

  Dataset(std::size_t dim, std::vector<double> coords) : Dataset(dim) {
    if (coords.size() % dim != 0) {
      throw ValidationError("coordinate buffer of size " + std::to_string(coords.size()) +
                            " is not a multiple of dimension " + std::to_string(dim));
    }
    coords_ = std::move(coords);
    for (double v : coords_) check_finite(v);
  }

  /// Builds a dataset from a list of points; all points must share a dimension.
  static Dataset from_points(const std::vector<Point>& points) {
    if (points.empty()) throw ValidationError("cannot infer dimension from an empty point list");
    Dataset out(points.front().size());
    for (const auto& p : points) out.push_back(p);
    return out;
  }

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }

  PointView point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  PointView operator[](std::size_t i) const { return point(i); }

  std::span<double> mutable_point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  const std::vector<double>& coords() const { return coords_; }

  void push_back(PointView p) {
    if (labels_enabled_) throw ValidationError("labelled dataset requires a label for every point");
    append(p);
  }

  void push_back(PointView p, int label) {
    if (!labels_enabled_) {
      if (!empty()) throw ValidationError("cannot append a labelled point to an unlabelled dataset");
      labels_enabled_ = true;
    }
    check_label(label);
    append(p);
    labels_.push_back(label);
  }

  void push_back(std::initializer_list<double> p) { push_back(PointView(p.begin(), p.size())); }
  void push_back(std::initializer_list<double> p, int label) { push_back(PointView(p.begin(), p.size()), label); }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  bool has_labels() const { return labels_enabled_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_.at(i); }

  /// Attaches labels; values must be +1 or -1 and cover every point.
  void set_labels(std::vector<int> labels) {
    if (labels.size() != size()) {
      throw ValidationError("label count " + std::to_string(labels.size()) +
                            " does not match point count " + std::to_string(size()));
    }
    for (int l : labels) check_label(l);
    labels_ = std::move(labels);
    labels_enabled_ = true;
  }

  void clear_labels() {
    labels_.clear();
    labels_enabled_ = false;
  }

  /// Rows with the given indices, in the given order, labels carried along.
  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out(dim_);
    out.reserve(indices.size());
    out.name = name;
    out.normalization = normalization;
    out.label_mapping = label_mapping;
    for (std::size_t i : indices) {
      if (labels_enabled_)
        out.push_back(point(i), labels_[i]);
      else
        out.push_back(point(i));
    }
    out.labels_enabled_ = labels_enabled_;
    return out;
  }

  std::string name;
  /// Set when the coordinates were produced by normalize_unit_cube or
  /// apply_normalization.
  std::optional<NormalizationRecord> normalization;
  /// How raw label strings were mapped onto {+1, -1}, e.g. {"0", +1}.
  std::vector<std::pair<std::string, int>> label_mapping;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.dim_ == b.dim_ && a.coords_ == b.coords_ && a.labels_ == b.labels_ &&
           a.labels_enabled_ == b.labels_enabled_;
  }

 private:
  static void check_finite(double v) {
    if (!std::isfinite(v)) throw ValidationError("point coordinates must be finite");
  }

  static void check_label(int l) {
    if (l != kNominal && l != kAnomaly) {
      throw ValidationError("labels must be +1 or -1, got " + std::to_string(l));
    }
  }

  void append(PointView p) {
    if (p.size() != dim_) {
      throw ValidationError("point of dimension " + std::to_string(p.size()) +
                            " does not match dataset dimension " + std::to_string(dim_));
    }
    for (double v : p) check_finite(v);
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<int> labels_;
  bool labels_enabled_ = false;
};

inline void require_dim(PointView query, std::size_t dim) {
  if (query.size() != dim) {
    throw ValidationError("query dimension " + std::to_string(query.size()) +
                          " does not match data dimension " + std::to_string(dim));
  }
}

}  // namespace lpe

#endif  // LPE_DATASET_HPP_
