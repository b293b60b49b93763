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

#ifndef LPE_ORACLE_HPP_
#define LPE_ORACLE_HPP_

// Ground truth for known densities (Monte-Carlo p-values, the clairvoyant
// likelihood-ratio ROC) and the evaluation statistics shared by every
// experiment: empirical ROC/AUC, KS distance to U[0,1], false-alarm rate.
//
// Everything runs on raw coordinates; only the LPE pipeline normalizes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpe/dataset.hpp"
#include "lpe/density.hpp"
#include "lpe/error.hpp"
#include "lpe/text.hpp"

namespace lpe {

/// log(f1(x) / f0(x)), +inf where only f1 is positive, -inf where only f0 is.
inline double log_likelihood_ratio(const DensitySpec& f0, const DensitySpec& f1, PointView x) {
  const double l0 = f0.log_pdf(x);
  const double l1 = f1.log_pdf(x);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  if (l0 == neg_inf && l1 == neg_inf) {
    throw ValidationError("likelihood ratio undefined: both f0 and f1 vanish at the point");
  }
  if (l0 == neg_inf) return std::numeric_limits<double>::infinity();
  if (l1 == neg_inf) return neg_inf;
  return l1 - l0;
}

struct PValueEstimate {
  double p = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_mc = 0;
};

/// Monte-Carlo estimate of P0{ x : f1(x)/f0(x) >= f1(eta)/f0(eta) }.
/// Returns exactly 0 when f0(eta) = 0 < f1(eta).
inline PValueEstimate pvalue_oracle(const DensitySpec& f0, const DensitySpec& f1, PointView eta,
                                    std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw ValidationError("n_mc must be positive");
  if (f0.dim() != f1.dim()) throw ValidationError("f0 and f1 dimensions differ");
  const double threshold = log_likelihood_ratio(f0, f1, eta);
  if (threshold == std::numeric_limits<double>::infinity()) return {0.0, 0.0, seed, n_mc};

  Rng rng = make_rng(seed);
  Point x(f0.dim());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    f0.sample(rng, x);
    if (log_likelihood_ratio(f0, f1, x) >= threshold) ++hits;
  }
  const double n = static_cast<double>(n_mc);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), seed, n_mc};
}

/// p-values for many points against one shared reference sample of n_mc
/// draws from f0. Cheaper than calling pvalue_oracle per point; values
/// are correlated through the shared sample.
inline std::vector<double> pvalue_oracle_batch(const DensitySpec& f0, const DensitySpec& f1, const Dataset& etas,
                                               std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw ValidationError("n_mc must be positive");
  Rng rng = make_rng(seed);
  std::vector<double> reference(n_mc);
  Point x(f0.dim());
  for (auto& r : reference) {
    f0.sample(rng, x);
    r = log_likelihood_ratio(f0, f1, x);
  }
  std::sort(reference.begin(), reference.end());
  std::vector<double> out(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double t = log_likelihood_ratio(f0, f1, etas[i]);
    if (t == std::numeric_limits<double>::infinity()) {
      out[i] = 0.0;
      continue;
    }
    const auto first = std::lower_bound(reference.begin(), reference.end(), t);
    out[i] = static_cast<double>(reference.end() - first) / static_cast<double>(n_mc);
  }
  return out;
}

struct RocRow {
  double threshold = 0.0;
  double fa = 0.0;   // fraction of nominal scores <= threshold
  double det = 0.0;  // fraction of anomaly scores <= threshold

  friend bool operator==(const RocRow&, const RocRow&) = default;
};

/// ROC sorted by threshold, with -inf / +inf sentinel rows at (0,0) and (1,1).
struct RocTable {
  std::vector<RocRow> rows;
  double auc = 0.0;
  std::size_t n_nominal = 0;
  std::size_t n_anomaly = 0;
};

/// Empirical ROC for "low score means anomaly". Ties between a nominal and an
/// anomaly score get half credit, so the AUC equals the Mann-Whitney
/// statistic P(anomaly < nominal) + P(tie) / 2 exactly.
inline RocTable empirical_roc(std::span<const double> nominal_scores, std::span<const double> anomaly_scores) {
  if (nominal_scores.empty() || anomaly_scores.empty()) {
    throw ValidationError("empirical ROC needs nonempty nominal and anomaly score sets");
  }
  std::vector<double> nom(nominal_scores.begin(), nominal_scores.end());
  std::vector<double> ano(anomaly_scores.begin(), anomaly_scores.end());
  for (double v : nom) if (std::isnan(v)) throw ValidationError("scores must not be NaN");
  for (double v : ano) if (std::isnan(v)) throw ValidationError("scores must not be NaN");
  std::sort(nom.begin(), nom.end());
  std::sort(ano.begin(), ano.end());

  const double n0 = static_cast<double>(nom.size());
  const double n1 = static_cast<double>(ano.size());
  const double inf = std::numeric_limits<double>::infinity();

  RocTable table;
  table.n_nominal = nom.size();
  table.n_anomaly = ano.size();
  table.rows.reserve(nom.size() + ano.size() + 2);
  table.rows.push_back({-inf, 0.0, 0.0});

  // Twice the trapezoid area in units of 1/(n0 n1); integer so the result
  // is exact.
  std::uint64_t twice_area = 0;
  std::size_t i = 0, j = 0;
  while (i < nom.size() || j < ano.size()) {
    double t;
    if (i == nom.size()) t = ano[j];
    else if (j == ano.size()) t = nom[i];
    else t = std::min(nom[i], ano[j]);
    const std::size_t i0 = i, j0 = j;
    while (i < nom.size() && nom[i] == t) ++i;
    while (j < ano.size() && ano[j] == t) ++j;
    twice_area += static_cast<std::uint64_t>(i - i0) * static_cast<std::uint64_t>(j + j0);
    table.rows.push_back({t, static_cast<double>(i) / n0, static_cast<double>(j) / n1});
  }
  table.rows.push_back({inf, 1.0, 1.0});
  table.auc = static_cast<double>(twice_area) / (2.0 * n0 * n1);
  return table;
}

/// ROC of the optimal likelihood-ratio detector, estimated from n_mc draws of
/// each density. Thresholds are on -log(f1/f0), so low still means anomaly.
inline RocTable clairvoyant_roc(const DensitySpec& f0, const DensitySpec& f1, std::size_t n_mc,
                                std::uint64_t seed) {
  if (n_mc < 2) throw ValidationError("clairvoyant ROC needs n_mc >= 2");
  if (f0.dim() != f1.dim()) throw ValidationError("f0 and f1 dimensions differ");
  Rng rng0 = make_rng(seed, 1);
  Rng rng1 = make_rng(seed, 2);
  std::vector<double> nom(n_mc), ano(n_mc);
  Point x(f0.dim());
  for (std::size_t i = 0; i < n_mc; ++i) {
    f0.sample(rng0, x);
    nom[i] = -log_likelihood_ratio(f0, f1, x);
  }
  for (std::size_t i = 0; i < n_mc; ++i) {
    f1.sample(rng1, x);
    ano[i] = -log_likelihood_ratio(f0, f1, x);
  }
  return empirical_roc(nom, ano);
}

/// Detection rate at a false-alarm level, linear between ROC rows.
inline double detection_at_fa(const RocTable& roc, double fa) {
  const auto& rows = roc.rows;
  if (rows.empty()) throw ValidationError("empty ROC table");
  if (fa <= rows.front().fa) return rows.front().det;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].fa > fa) {
      const RocRow& a = rows[r - 1];
      const RocRow& b = rows[r];
      const double w = (fa - a.fa) / (b.fa - a.fa);
      return a.det + w * (b.det - a.det);
    }
  }
  return rows.back().det;
}

/// Sup distance between the empirical CDF of the scores and U[0,1].
inline double ks_uniformity(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("KS statistic needs at least one score");
  std::vector<double> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = std::clamp(s[i], 0.0, 1.0);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

/// Asymptotic p-value of a one-sample KS statistic (Kolmogorov series with
/// Stephens' small-sample correction).
inline double ks_pvalue(double statistic, std::size_t n) {
  if (n == 0) throw ValidationError("KS p-value needs n >= 1");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Fraction of nominal scores flagged at level alpha (score <= alpha).
inline double fa_calibration(std::span<const double> nominal_scores, double alpha) {
  if (nominal_scores.empty()) throw ValidationError("false-alarm rate needs at least one nominal score");
  const auto hits = std::count_if(nominal_scores.begin(), nominal_scores.end(), [&](double s) { return s <= alpha; });
  return static_cast<double>(hits) / static_cast<double>(nominal_scores.size());
}

/// Fraction of anomaly scores flagged at level alpha.
inline double detection_rate(std::span<const double> anomaly_scores, double alpha) {
  if (anomaly_scores.empty()) throw ValidationError("detection rate needs at least one anomaly score");
  const auto hits = std::count_if(anomaly_scores.begin(), anomaly_scores.end(), [&](double s) { return s <= alpha; });
  return static_cast<double>(hits) / static_cast<double>(anomaly_scores.size());
}

// --- RocTable TSV ----------------------------------------------------------
//
//   # auc<TAB>0.75
//   # n_nominal<TAB>2
//   # n_anomaly<TAB>2
//   threshold<TAB>fa<TAB>det
//   -inf<TAB>0<TAB>0
//   ...

inline void write_roc_tsv(std::ostream& os, const RocTable& roc) {
  os << "# auc\t" << text::format_double(roc.auc) << '\n';
  os << "# n_nominal\t" << roc.n_nominal << '\n';
  os << "# n_anomaly\t" << roc.n_anomaly << '\n';
  os << "threshold\tfa\tdet\n";
  for (const auto& r : roc.rows) {
    os << text::format_double(r.threshold) << '\t' << text::format_double(r.fa) << '\t'
       << text::format_double(r.det) << '\n';
  }
}

inline RocTable read_roc_tsv(std::istream& is) {
  RocTable roc;
  std::string line;
  bool have_auc = false;
  bool in_rows = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto parts = text::words(t.substr(1));
      if (parts.size() == 2 && parts[0] == "auc") {
        const auto v = text::parse_double(parts[1]);
        if (!v) throw ValidationError("bad auc value on line " + std::to_string(line_no));
        roc.auc = *v;
        have_auc = true;
      } else if (parts.size() == 2 && (parts[0] == "n_nominal" || parts[0] == "n_anomaly")) {
        const auto v = text::parse_int(parts[1]);
        if (!v || *v < 0) throw ValidationError("bad count on line " + std::to_string(line_no));
        (parts[0] == "n_nominal" ? roc.n_nominal : roc.n_anomaly) = static_cast<std::size_t>(*v);
      }
      continue;
    }
    if (!in_rows) {
      if (t != "threshold\tfa\tdet") throw ValidationError("expected ROC column header on line " + std::to_string(line_no));
      in_rows = true;
      continue;
    }
    const auto cells = text::split(t, '\t');
    if (cells.size() != 3) throw ValidationError("ROC row on line " + std::to_string(line_no) + " needs 3 columns");
    const auto th = text::parse_double(cells[0]);
    const auto fa = text::parse_double(cells[1]);
    const auto det = text::parse_double(cells[2]);
    if (!th || !fa || !det) throw ValidationError("non-numeric ROC row on line " + std::to_string(line_no));
    roc.rows.push_back({*th, *fa, *det});
  }
  if (!have_auc) throw ValidationError("ROC table has no auc header line");
  return roc;
}

}  // namespace lpe

#endif  // LPE_ORACLE_HPP_
