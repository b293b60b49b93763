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

#ifndef LPE_EXPERIMENTS_HPP_
#define LPE_EXPERIMENTS_HPP_

// End-to-end recipes: normalize, fit, score, evaluate. Used by the CLI's
// reproduce command and by the acceptance suite.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpe/data.hpp"
#include "lpe/dataset.hpp"
#include "lpe/density.hpp"
#include "lpe/geometry.hpp"
#include "lpe/oracle.hpp"
#include "lpe/scoring.hpp"

namespace lpe {

/// Geodesic neighbour count used when none is given: max(K, 10).
inline std::size_t default_k_geo(const std::optional<Mode>& mode) {
  if (mode) {
    if (const auto* knn = std::get_if<KnnMode>(&*mode)) return std::max<std::size_t>(knn->k, 10);
  }
  return 10;
}

/// Fits on min-max normalized training data (when `normalize`); the record is
/// kept on the model's training set so queries can be mapped the same way.
inline NominalModel fit_pipeline(const Dataset& train, const DistanceBackend& backend, std::optional<Mode> mode,
                                 bool normalize = true) {
  if (!normalize) return fit(train, backend, mode);
  auto [scaled, record] = normalize_unit_cube(train);
  return fit(std::move(scaled), backend, mode);
}

/// Applies the model's stored normalization (if any) to raw queries.
inline Dataset prepare_queries(const NominalModel& model, const Dataset& queries,
                               std::size_t* out_of_range = nullptr) {
  if (queries.dim() != model.dim()) {
    throw ValidationError("test data has dimension " + std::to_string(queries.dim()) + " but the model has dimension " +
                          std::to_string(model.dim()));
  }
  if (const auto& rec = model.training().normalization) return apply_normalization(*rec, queries, out_of_range);
  if (out_of_range) *out_of_range = 0;
  return queries;
}

/// Scores every row of a raw test set, in order.
inline std::vector<double> score_all(const NominalModel& model, const Dataset& queries) {
  const Dataset q = prepare_queries(model, queries);
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = model.score(q[i]);
  return out;
}

struct LabelledScores {
  std::vector<double> nominal;
  std::vector<double> anomaly;
};

inline LabelledScores split_by_label(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ValidationError("score and label counts differ");
  LabelledScores out;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == kNominal ? out.nominal : out.anomaly).push_back(scores[i]);
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ValidationError("median of an empty vector");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct Evaluation {
  std::optional<RocTable> roc;  // empty when only one class is present
  std::optional<double> ks_nominal;
  std::optional<double> anomaly_median;
  std::vector<double> alphas;
  std::vector<double> fa;   // per alpha, nominal rows only
  std::vector<double> det;  // per alpha, anomaly rows only
};

inline Evaluation evaluate(const LabelledScores& s, const std::vector<double>& alphas) {
  Evaluation e;
  e.alphas = alphas;
  if (!s.nominal.empty() && !s.anomaly.empty()) e.roc = empirical_roc(s.nominal, s.anomaly);
  if (!s.nominal.empty()) e.ks_nominal = ks_uniformity(s.nominal);
  if (!s.anomaly.empty()) e.anomaly_median = median(s.anomaly);
  for (double a : alphas) {
    e.fa.push_back(s.nominal.empty() ? 0.0 : fa_calibration(s.nominal, a));
    e.det.push_back(s.anomaly.empty() ? 0.0 : detection_rate(s.anomaly, a));
  }
  return e;
}

// --- two-cluster illustration ---------------------------------------------------

struct Fig1Result {
  GeneratedData data;
  std::vector<double> scores;
  LabelledScores split;
  Evaluation eval;
  std::size_t k = 0;
  double alpha = 0.05;
  /// Fraction of test points whose LPE decision at alpha matches the exact
  /// density level-set decision (oracle p-value with uniform f1).
  double level_set_agreement = 0.0;
};

inline Fig1Result reproduce_fig1(std::uint64_t seed, std::size_t k = 6, double alpha = 0.05,
                                 std::size_t n_mc = 200000) {
  Fig1Result r;
  r.k = k;
  r.alpha = alpha;
  r.data = generate(presets::fig1(seed));
  const NominalModel model = fit_pipeline(r.data.train, DistanceBackend::euclidean(), Mode{KnnMode{k}});
  r.scores = score_all(model, r.data.test);
  r.split = split_by_label(r.scores, r.data.test.labels());
  r.eval = evaluate(r.split, {alpha});

  const auto exact = pvalue_oracle_batch(presets::fig1_nominal(), presets::fig1_anomaly(), r.data.test, n_mc, seed + 1);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if ((r.scores[i] <= alpha) == (exact[i] <= alpha)) ++agree;
  }
  r.level_set_agreement = static_cast<double>(agree) / static_cast<double>(exact.size());
  return r;
}

// --- calibration on the fig-1 mixture ---------------------------------------------

struct CalibrationTrial {
  std::size_t n_train = 0;
  std::size_t k = 0;
  double ks = 0.0;
  double anomaly_median = 0.0;
  std::vector<double> alphas;
  std::vector<double> fa;
};

/// Trains on n draws of the fig-1 mixture with K = round(n^{2/5}), scores
/// n_test nominal and n_test uniform draws over the unit square.
inline CalibrationTrial calibration_trial(std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                                          const std::vector<double>& alphas = {0.05, 0.08, 0.1}) {
  ExperimentSpec spec{presets::fig1_nominal(), presets::fig1_anomaly(), n_train, n_test, n_test, seed};
  const GeneratedData data = generate(spec);
  const NominalModel model = fit_pipeline(data.train, DistanceBackend::euclidean(), std::nullopt);
  const auto scores = score_all(model, data.test);
  const auto split = split_by_label(scores, data.test.labels());
  CalibrationTrial t;
  t.n_train = n_train;
  t.k = model.k();
  t.ks = ks_uniformity(split.nominal);
  t.anomaly_median = median(split.anomaly);
  t.alphas = alphas;
  for (double a : alphas) t.fa.push_back(fa_calibration(split.nominal, a));
  return t;
}

// --- clairvoyant comparison -------------------------------------------------------

struct ClairvoyantRow {
  std::size_t n_train = 0;
  std::vector<double> trial_auc;
  double mean_auc = 0.0;
  std::vector<double> mean_det;  // vertically averaged ROC on the fa grid
};

struct ClairvoyantStudy {
  std::size_t k = 6;
  std::size_t trials = 15;
  std::vector<double> fa_grid;
  std::vector<ClairvoyantRow> rows;
  RocTable clairvoyant;
  std::vector<double> clairvoyant_det;
};

inline ClairvoyantStudy reproduce_clairvoyant(std::uint64_t seed, const std::vector<std::size_t>& ns = {40, 160},
                                              std::size_t trials = 15, std::size_t k = 6,
                                              std::size_t n_test_each = 500, std::size_t n_mc = 1000000) {
  ClairvoyantStudy st;
  st.k = k;
  st.trials = trials;
  for (int i = 0; i <= 100; ++i) st.fa_grid.push_back(i / 100.0);
  for (std::size_t n : ns) {
    ClairvoyantRow row;
    row.n_train = n;
    row.mean_det.assign(st.fa_grid.size(), 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
      const GeneratedData data = generate(presets::clairvoyant(n, seed + 1000 * n + t, n_test_each));
      const NominalModel model = fit_pipeline(data.train, DistanceBackend::euclidean(), Mode{KnnMode{k}});
      const auto split = split_by_label(score_all(model, data.test), data.test.labels());
      const RocTable roc = empirical_roc(split.nominal, split.anomaly);
      row.trial_auc.push_back(roc.auc);
      for (std::size_t g = 0; g < st.fa_grid.size(); ++g) row.mean_det[g] += detection_at_fa(roc, st.fa_grid[g]);
    }
    double sum = 0.0;
    for (double a : row.trial_auc) sum += a;
    row.mean_auc = sum / static_cast<double>(trials);
    for (double& d : row.mean_det) d /= static_cast<double>(trials);
    st.rows.push_back(std::move(row));
  }
  st.clairvoyant = clairvoyant_roc(presets::clairvoyant_nominal(), presets::clairvoyant_anomaly(), n_mc, seed);
  for (double fa : st.fa_grid) st.clairvoyant_det.push_back(detection_at_fa(st.clairvoyant, fa));
  return st;
}

// --- K sweep ----------------------------------------------------------------------

struct SweepRow {
  std::size_t k = 0;
  double mean_auc = 0.0;
  std::vector<double> fa;  // per alpha, averaged over trials
  RocTable roc;            // first trial
};

struct Sweep {
  std::vector<double> alphas;
  std::vector<SweepRow> rows;
  double auc_spread() const {
    double lo = 1.0, hi = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, r.mean_auc);
      hi = std::max(hi, r.mean_auc);
    }
    return rows.empty() ? 0.0 : hi - lo;
  }
};

/// K-LPE over a list of K for fixed (train, test) pairs; AUC and false alarm
/// are averaged over the pairs.
inline Sweep k_sweep(const std::vector<GeneratedData>& trials, const std::vector<std::size_t>& ks,
                     const std::vector<double>& alphas, const DistanceBackend& backend = DistanceBackend::euclidean()) {
  if (trials.empty()) throw ValidationError("K sweep needs at least one train/test pair");
  Sweep sw;
  sw.alphas = alphas;
  for (std::size_t k : ks) {
    SweepRow row;
    row.k = k;
    row.fa.assign(alphas.size(), 0.0);
    for (std::size_t t = 0; t < trials.size(); ++t) {
      const NominalModel model = fit_pipeline(trials[t].train, backend, Mode{KnnMode{k}});
      const auto split = split_by_label(score_all(model, trials[t].test), trials[t].test.labels());
      RocTable roc = empirical_roc(split.nominal, split.anomaly);
      row.mean_auc += roc.auc;
      for (std::size_t a = 0; a < alphas.size(); ++a) row.fa[a] += fa_calibration(split.nominal, alphas[a]);
      if (t == 0) row.roc = std::move(roc);
    }
    row.mean_auc /= static_cast<double>(trials.size());
    for (double& f : row.fa) f /= static_cast<double>(trials.size());
    sw.rows.push_back(std::move(row));
  }
  return sw;
}

inline std::vector<GeneratedData> synthetic_banana_trials(std::uint64_t seed, std::size_t trials) {
  std::vector<GeneratedData> out;
  for (std::size_t t = 0; t < trials; ++t) out.push_back(generate(presets::banana(seed + t)));
  return out;
}

/// Random protocol split of a labelled dataset: n_train nominal rows for
/// training, then n_test_nominal further nominal rows and n_test_anomaly
/// anomalous rows for testing. Counts are capped by availability.
inline GeneratedData protocol_split(const Dataset& labelled, std::size_t n_train, std::size_t n_test_nominal,
                                    std::size_t n_test_anomaly, std::uint64_t seed) {
  if (!labelled.has_labels()) throw ValidationError("protocol split needs a labelled dataset");
  std::vector<std::size_t> nom, ano;
  for (std::size_t i = 0; i < labelled.size(); ++i) (labelled.label(i) == kNominal ? nom : ano).push_back(i);
  Rng rng = make_rng(seed, 30);
  std::shuffle(nom.begin(), nom.end(), rng);
  std::shuffle(ano.begin(), ano.end(), rng);
  if (nom.size() < n_train + 1) {
    throw ValidationError("dataset has " + std::to_string(nom.size()) + " nominal rows, need more than " +
                          std::to_string(n_train));
  }
  const std::span<const std::size_t> nview(nom);
  const std::size_t tn = std::min(n_test_nominal, nom.size() - n_train);
  const std::size_t ta = std::min(n_test_anomaly, ano.size());
  GeneratedData out;
  out.train = labelled.subset(nview.first(n_train));
  out.train.clear_labels();
  std::vector<std::size_t> test_idx(nview.begin() + static_cast<std::ptrdiff_t>(n_train),
                                    nview.begin() + static_cast<std::ptrdiff_t>(n_train + tn));
  test_idx.insert(test_idx.end(), ano.begin(), ano.begin() + static_cast<std::ptrdiff_t>(ta));
  out.test = labelled.subset(test_idx);
  return out;
}

// --- real data driven by a manifest -------------------------------------------

struct RealDataRun {
  std::string name;
  bool ran = false;
  std::string note;
  GeneratedData data;
  std::vector<double> scores;
  Evaluation eval;
  std::string backend;
  std::string mode;
};

/// Runs one manifest section. Recognised keys: file, header, label_col,
/// nominal_label, n_train, n_test_nominal, n_test_anomaly, mode (knn|eps),
/// k, epsilon, metric (euclidean|geodesic), kgeo, alpha (space separated).
inline RealDataRun run_manifest_entry(const Manifest::Section& sec, const std::filesystem::path& data_dir,
                                      std::uint64_t seed) {
  RealDataRun run;
  run.name = sec.name;
  const std::filesystem::path file = data_dir / sec.get("file");
  if (!std::filesystem::exists(file)) {
    run.note = "skipped: " + file.string() + " not found";
    return run;
  }
  CsvOptions opt;
  if (const auto* h = sec.find("header")) opt.header = (*h == "true" || *h == "1" || *h == "yes");
  opt.label_column = sec.get("label_col");
  if (const auto* nl = sec.find("nominal_label")) opt.nominal_label = *nl;
  const Dataset all = load_csv(file.string(), opt);

  run.data = protocol_split(all, sec.get_count("n_train"), sec.get_count("n_test_nominal"),
                            sec.get_count("n_test_anomaly"), seed);
  std::optional<Mode> mode;
  const std::string mode_name = sec.find("mode") ? sec.get("mode") : "knn";
  if (mode_name == "eps") {
    mode = EpsMode{sec.get_double("epsilon")};
    run.mode = "eps " + text::format_double(std::get<EpsMode>(*mode).epsilon);
  } else if (mode_name == "knn") {
    const std::size_t k = sec.find("k") ? sec.get_count("k") : default_k(run.data.train.size());
    mode = KnnMode{k};
    run.mode = "knn " + std::to_string(k);
  } else {
    throw ValidationError("manifest section [" + sec.name + "] has unknown mode '" + mode_name + "'");
  }
  const std::string metric = sec.find("metric") ? sec.get("metric") : "euclidean";
  DistanceBackend backend = DistanceBackend::euclidean();
  if (metric == "geodesic") {
    backend = DistanceBackend::geodesic(sec.find("kgeo") ? sec.get_count("kgeo") : default_k_geo(mode));
  } else if (metric != "euclidean") {
    throw ValidationError("manifest section [" + sec.name + "] has unsupported metric '" + metric + "'");
  }
  run.backend = backend.name();

  std::vector<double> alphas{0.05};
  if (const auto* a = sec.find("alpha")) {
    alphas.clear();
    for (auto w : text::words(*a)) {
      const auto v = text::parse_double(w);
      if (!v) throw ValidationError("manifest section [" + sec.name + "] has a bad alpha list");
      alphas.push_back(*v);
    }
  }
  const NominalModel model = fit_pipeline(run.data.train, backend, mode);
  run.scores = score_all(model, run.data.test);
  run.eval = evaluate(split_by_label(run.scores, run.data.test.labels()), alphas);
  run.ran = true;
  return run;
}

}  // namespace lpe

#endif  // LPE_EXPERIMENTS_HPP_
