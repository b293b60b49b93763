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

#ifndef LPE_SCORING_HPP_
#define LPE_SCORING_HPP_

/*
 Localized p-value scores.

 Given nominal training points S = {x_1..x_n}:

   K-LPE   p_K(eta)   = (1/n) #{ i : R_S(eta) <= R_S(x_i) }
   eps-LPE p_eps(eta) = (1/n) #{ i : N_S(eta) >= N_S(x_i) }

 R_S is the distance to the K-th nearest neighbour (training points leave
 themselves out), N_S the number of points within epsilon (inclusive).
 A query is declared anomalous iff its score is <= alpha.

 When the anomaly mixing density f1 is known and not uniform the statistics
 become 1 / (R f1) and N / f1, both compared with >= so that a constant f1
 gives back the plain scores (see score_klpe_f1 / score_elpe_f1).

 The split-sample estimator computes the query statistic on S2 and the
 reference statistics inside S1 only, averaging over S1.

 All comparisons are inclusive exactly as in the formulas above, so ties
 favour "nominal". Scores are always count / n with the division done last.
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpe/dataset.hpp"
#include "lpe/density.hpp"
#include "lpe/error.hpp"
#include "lpe/geometry.hpp"
#include "lpe/neighborhood.hpp"

namespace lpe {

struct KnnMode {
  std::size_t k = 0;
  friend bool operator==(const KnnMode&, const KnnMode&) = default;
};

struct EpsMode {
  double epsilon = 0.0;
  friend bool operator==(const EpsMode&, const EpsMode&) = default;
};

using Mode = std::variant<KnnMode, EpsMode>;

/// round(n^{2/5}) clamped to [1, n-1].
inline std::size_t default_k(std::size_t n) {
  if (n < 2) throw ValidationError("default K needs at least 2 training points");
  const auto k = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 0.4)));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

enum class Decision { nominal, anomaly };

inline const char* to_string(Decision d) { return d == Decision::anomaly ? "anomaly" : "nominal"; }

/// Anomaly iff score <= alpha. alpha = 1 is accepted and flags every point.
inline Decision decide(double score, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("score must lie in [0, 1], got " + std::to_string(score));
  }
  return score <= alpha ? Decision::anomaly : Decision::nominal;
}

struct ScoreReport {
  double score = 0.0;
  Decision decision = Decision::nominal;
  double alpha = 0.0;
};

namespace detail {

inline void check_mode(const Mode& mode, std::size_t n) {
  if (const auto* knn = std::get_if<KnnMode>(&mode)) {
    if (knn->k < 1 || knn->k + 1 > n) {
      throw ValidationError("k=" + std::to_string(knn->k) + " must lie in [1, n-1] with n=" +
                            std::to_string(n));
    }
  } else {
    check_epsilon(std::get<EpsMode>(mode).epsilon);
  }
}

inline bool all_identical(const Dataset& data) {
  for (std::size_t i = 1; i < data.size(); ++i) {
    const auto a = data[0];
    const auto b = data[i];
    if (!std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return true;
}

inline double check_f1_value(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("f1 must be strictly positive at the ") + what);
  }
  return v;
}

inline double checked_f1(const DensitySpec& f1, PointView x, const char* what) {
  return check_f1_value(f1.pdf(x), what);
}

}  // namespace detail

/// Fitted nominal state: training points, backend, mode and the per-point
/// neighbourhood statistics. Immutable after fit; safe to score from
/// several threads.
class NominalModel {
 public:
  static NominalModel fit(Dataset training, DistanceBackend backend, std::optional<Mode> mode = std::nullopt,
                          std::optional<DensitySpec> f1_hint = std::nullopt) {
    const std::size_t n = training.size();
    if (n < 2) throw ValidationError("training set needs at least 2 points, got " + std::to_string(n));
    const Mode resolved = mode ? *mode : Mode{KnnMode{default_k(n)}};
    detail::check_mode(resolved, n);

    NominalModel m;
    DistanceMatrix dm = pairwise_distances(training, backend);
    if (const auto* knn = std::get_if<KnnMode>(&resolved)) {
      m.knn_ = knn_radii(dm, knn->k);
    } else {
      m.eps_ = eps_degrees(dm, std::get<EpsMode>(resolved).epsilon);
    }
    if (backend.is_geodesic()) m.geodesic_ = std::move(dm);

    if (f1_hint) {
      if (f1_hint->dim() != training.dim()) throw ValidationError("f1 hint dimension does not match training data");
      m.f1_train_.resize(n);
      for (std::size_t i = 0; i < n; ++i) m.f1_train_[i] = detail::checked_f1(*f1_hint, training[i], "training points");
    }
    if (detail::all_identical(training)) {
      m.warnings_.push_back("all training points are identical; every radius is zero and only queries "
                            "coinciding with them score above 0");
    }

    m.training_ = std::move(training);
    m.backend_ = std::move(backend);
    m.mode_ = resolved;
    m.f1_hint_ = std::move(f1_hint);
    return m;
  }

  const Dataset& training() const { return training_; }
  const DistanceBackend& backend() const { return backend_; }
  const Mode& mode() const { return mode_; }
  std::size_t size() const { return training_.size(); }
  std::size_t dim() const { return training_.dim(); }

  bool is_knn() const { return std::holds_alternative<KnnMode>(mode_); }
  std::size_t k() const { return std::get<KnnMode>(mode_).k; }
  double epsilon() const { return std::get<EpsMode>(mode_).epsilon; }

  const KnnStats& knn_stats() const {
    if (!knn_) throw ValidationError("model was not fit in knn mode");
    return *knn_;
  }
  const EpsStats& eps_stats() const {
    if (!eps_) throw ValidationError("model was not fit in eps mode");
    return *eps_;
  }

  const std::optional<DensitySpec>& f1_hint() const { return f1_hint_; }
  const std::vector<double>& f1_at_training() const { return f1_train_; }

  /// Non-fatal observations made during fit.
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Backend distances from a query to every training point.
  std::vector<double> query_distances(PointView query) const {
    require_dim(query, dim());
    if (geodesic_) return geodesic_distances_to_set(query, training_, *geodesic_, backend_.k_geo());
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = backend_.base_distance(query, training_[i]);
    return out;
  }

  /// Unweighted score in the model's mode.
  double score(PointView query) const;

  ScoreReport report(PointView query, double alpha) const {
    const double s = score(query);
    return {s, decide(s, alpha), alpha};
  }

 private:
  NominalModel() = default;

  Dataset training_;
  DistanceBackend backend_;
  Mode mode_;
  std::optional<KnnStats> knn_;
  std::optional<EpsStats> eps_;
  std::optional<DistanceMatrix> geodesic_;
  std::optional<DensitySpec> f1_hint_;
  std::vector<double> f1_train_;
  std::vector<std::string> warnings_;
};

inline NominalModel fit(Dataset training, DistanceBackend backend, std::optional<Mode> mode = std::nullopt,
                        std::optional<DensitySpec> f1_hint = std::nullopt) {
  return NominalModel::fit(std::move(training), std::move(backend), mode, std::move(f1_hint));
}

/// K-LPE score.
inline double score_klpe(const NominalModel& model, PointView query) {
  const KnnStats& stats = model.knn_stats();
  const double r = query_radius(model.query_distances(query), stats.k);
  std::size_t count = 0;
  for (double ri : stats.radii) {
    if (r <= ri) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(stats.radii.size());
}

/// eps-LPE score.
inline double score_elpe(const NominalModel& model, PointView query) {
  const EpsStats& stats = model.eps_stats();
  const std::size_t deg = query_degree(model.query_distances(query), stats.epsilon);
  std::size_t count = 0;
  for (std::size_t di : stats.degrees) {
    if (deg >= di) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(stats.degrees.size());
}

namespace detail {

inline double klpe_f1_count(const KnnStats& stats, double r, double f1q, const std::vector<double>& f1x) {
  const double q_stat = 1.0 / (r * f1q);
  std::size_t count = 0;
  for (std::size_t i = 0; i < stats.radii.size(); ++i) {
    if (q_stat >= 1.0 / (stats.radii[i] * f1x[i])) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(stats.radii.size());
}

inline double elpe_f1_count(const EpsStats& stats, std::size_t deg, double f1q, const std::vector<double>& f1x) {
  const double q_stat = static_cast<double>(deg) / f1q;
  std::size_t count = 0;
  for (std::size_t i = 0; i < stats.degrees.size(); ++i) {
    if (q_stat >= static_cast<double>(stats.degrees[i]) / f1x[i]) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(stats.degrees.size());
}

inline std::vector<double> f1_at(const Dataset& data, const std::function<double(PointView)>& f1) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = check_f1_value(f1(data[i]), "training points");
  return out;
}

}  // namespace detail

/// K-LPE with a known anomaly mixing density: counts training points with
/// 1/(R(x_i) f1(x_i)) <= 1/(R(eta) f1(eta)), the direction that reduces to
/// plain K-LPE for constant f1. A zero radius yields an infinite statistic,
/// which compares under ordinary IEEE rules (inf >= inf holds).
inline double score_klpe_f1(const NominalModel& model, PointView query) {
  if (!model.f1_hint()) throw ValidationError("model has no f1 hint");
  const KnnStats& stats = model.knn_stats();
  const double f1q = detail::checked_f1(*model.f1_hint(), query, "query");
  return detail::klpe_f1_count(stats, query_radius(model.query_distances(query), stats.k), f1q,
                               model.f1_at_training());
}

/// Same, with f1 given as an arbitrary positive function instead of the
/// model's hint. f1 is evaluated at every training point on each call.
inline double score_klpe_f1(const NominalModel& model, PointView query, const std::function<double(PointView)>& f1) {
  const KnnStats& stats = model.knn_stats();
  const double f1q = detail::check_f1_value(f1(query), "query");
  return detail::klpe_f1_count(stats, query_radius(model.query_distances(query), stats.k), f1q,
                               detail::f1_at(model.training(), f1));
}

/// eps-LPE with a known anomaly mixing density: compares N(eta)/f1(eta)
/// against N(x_i)/f1(x_i).
inline double score_elpe_f1(const NominalModel& model, PointView query) {
  if (!model.f1_hint()) throw ValidationError("model has no f1 hint");
  const EpsStats& stats = model.eps_stats();
  const double f1q = detail::checked_f1(*model.f1_hint(), query, "query");
  return detail::elpe_f1_count(stats, query_degree(model.query_distances(query), stats.epsilon), f1q,
                               model.f1_at_training());
}

inline double score_elpe_f1(const NominalModel& model, PointView query, const std::function<double(PointView)>& f1) {
  const EpsStats& stats = model.eps_stats();
  const double f1q = detail::check_f1_value(f1(query), "query");
  return detail::elpe_f1_count(stats, query_degree(model.query_distances(query), stats.epsilon), f1q,
                               detail::f1_at(model.training(), f1));
}

inline double NominalModel::score(PointView query) const {
  return is_knn() ? score_klpe(*this, query) : score_elpe(*this, query);
}

/// Split-sample model: reference statistics inside S1, query statistic on S2.
class SplitModel {
 public:
  static SplitModel fit(Dataset s1, Dataset s2, DistanceBackend backend, Mode mode) {
    if (s1.dim() != s2.dim()) throw ValidationError("split halves have different dimensions");
    if (s1.size() < 2 || s2.size() < 1) throw ValidationError("split halves need |S1| >= 2 and |S2| >= 1");
    if (const auto* knn = std::get_if<KnnMode>(&mode)) {
      const std::size_t limit = std::min(s1.size() - 1, s2.size());
      if (knn->k < 1 || knn->k > limit) {
        throw ValidationError("k=" + std::to_string(knn->k) + " must lie in [1, min(|S1|-1, |S2|)] = [1, " +
                              std::to_string(limit) + "]");
      }
    } else {
      detail::check_epsilon(std::get<EpsMode>(mode).epsilon);
    }
    SplitModel m;
    const DistanceMatrix ref = pairwise_distances(s1, backend);
    if (const auto* knn = std::get_if<KnnMode>(&mode)) {
      m.knn_ = knn_radii(ref, knn->k);
    } else {
      m.eps_ = eps_degrees(ref, std::get<EpsMode>(mode).epsilon);
    }
    if (backend.is_geodesic()) {
      backend.validate(s2.size(), s2.dim());
      m.s2_geodesic_ = pairwise_distances(s2, backend);
    }
    m.s1_ = std::move(s1);
    m.s2_ = std::move(s2);
    m.backend_ = std::move(backend);
    m.mode_ = mode;
    return m;
  }

  const Dataset& s1() const { return s1_; }
  const Dataset& s2() const { return s2_; }
  const Mode& mode() const { return mode_; }
  const DistanceBackend& backend() const { return backend_; }
  const std::optional<KnnStats>& knn_stats() const { return knn_; }
  const std::optional<EpsStats>& eps_stats() const { return eps_; }

  std::vector<double> query_distances(PointView query) const {
    require_dim(query, s2_.dim());
    if (s2_geodesic_) return geodesic_distances_to_set(query, s2_, *s2_geodesic_, backend_.k_geo());
    std::vector<double> out(s2_.size());
    for (std::size_t i = 0; i < s2_.size(); ++i) out[i] = backend_.base_distance(query, s2_[i]);
    return out;
  }

 private:
  SplitModel() = default;

  Dataset s1_;
  Dataset s2_;
  DistanceBackend backend_;
  Mode mode_;
  std::optional<KnnStats> knn_;
  std::optional<EpsStats> eps_;
  std::optional<DistanceMatrix> s2_geodesic_;
};

/// Split-sample LPE score, averaged over S1.
inline double score_split(const SplitModel& model, PointView query) {
  const auto dists = model.query_distances(query);
  std::size_t count = 0;
  std::size_t m = 0;
  if (const auto& knn = model.knn_stats()) {
    const double r = query_radius(dists, knn->k);
    for (double ri : knn->radii) {
      if (r <= ri) ++count;
    }
    m = knn->radii.size();
  } else {
    const EpsStats& eps = *model.eps_stats();
    const std::size_t deg = query_degree(dists, eps.epsilon);
    for (std::size_t di : eps.degrees) {
      if (deg >= di) ++count;
    }
    m = eps.degrees.size();
  }
  return static_cast<double>(count) / static_cast<double>(m);
}

}  // namespace lpe

#endif  // LPE_SCORING_HPP_
