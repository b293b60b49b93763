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

#ifndef LPE_DATA_HPP_
#define LPE_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpe/dataset.hpp"
#include "lpe/density.hpp"
#include "lpe/error.hpp"
#include "lpe/text.hpp"

namespace lpe {

// --- normalization -----------------------------------------------------------

inline NormalizationRecord fit_normalization(const Dataset& data) {
  if (data.empty()) throw ValidationError("cannot fit a normalization on an empty dataset");
  NormalizationRecord rec{Point(data[0].begin(), data[0].end()), Point(data[0].begin(), data[0].end())};
  for (std::size_t i = 1; i < data.size(); ++i) {
    const auto p = data[i];
    for (std::size_t j = 0; j < data.dim(); ++j) {
      rec.min[j] = std::min(rec.min[j], p[j]);
      rec.max[j] = std::max(rec.max[j], p[j]);
    }
  }
  return rec;
}

/// Maps data through a training record. Values are not clipped; the number
/// of coordinates that land outside [0, 1] is reported through out_of_range.
inline Dataset apply_normalization(const NormalizationRecord& rec, const Dataset& data,
                                   std::size_t* out_of_range = nullptr) {
  if (rec.dim() != data.dim()) {
    throw ValidationError("normalization record has dimension " + std::to_string(rec.dim()) +
                          " but data has dimension " + std::to_string(data.dim()));
  }
  Dataset out = data;
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto p = out.mutable_point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = rec.apply(j, p[j]);
      if (p[j] < 0.0 || p[j] > 1.0) ++flagged;
    }
  }
  out.normalization = rec;
  if (out_of_range) *out_of_range = flagged;
  return out;
}

/// Min-max scales every column of a training set onto [0, 1].
inline std::pair<Dataset, NormalizationRecord> normalize_unit_cube(const Dataset& data) {
  NormalizationRecord rec = fit_normalization(data);
  return {apply_normalization(rec, data), rec};
}

// --- synthetic experiments -----------------------------------------------------

struct ExperimentSpec {
  DensitySpec nominal;
  DensitySpec anomaly;
  std::size_t n_train = 0;
  std::size_t n_test_nominal = 0;
  std::size_t n_test_anomaly = 0;
  std::uint64_t seed = 0;
};

struct GeneratedData {
  Dataset train;
  Dataset test;  // nominal rows first (+1), then anomaly rows (-1)
};

/// Draws train/test sets; each block uses its own seed substream.
inline GeneratedData generate(const ExperimentSpec& spec) {
  if (!spec.nominal.valid() || !spec.anomaly.valid()) throw ValidationError("experiment densities are not set");
  if (spec.nominal.dim() != spec.anomaly.dim()) throw ValidationError("nominal and anomaly densities differ in dimension");
  if (spec.n_train == 0 || spec.n_test_nominal + spec.n_test_anomaly == 0) {
    throw ValidationError("experiment needs positive training and test counts");
  }
  Rng train_rng = make_rng(spec.seed, 10);
  Rng nominal_rng = make_rng(spec.seed, 11);
  Rng anomaly_rng = make_rng(spec.seed, 12);

  GeneratedData out;
  out.train = spec.nominal.sample(train_rng, spec.n_train);
  out.train.name = "train";
  out.test = Dataset(spec.nominal.dim());
  out.test.name = "test";
  out.test.reserve(spec.n_test_nominal + spec.n_test_anomaly);
  Point p(spec.nominal.dim());
  for (std::size_t i = 0; i < spec.n_test_nominal; ++i) {
    spec.nominal.sample(nominal_rng, p);
    out.test.push_back(p, kNominal);
  }
  for (std::size_t i = 0; i < spec.n_test_anomaly; ++i) {
    spec.anomaly.sample(anomaly_rng, p);
    out.test.push_back(p, kAnomaly);
  }
  return out;
}

namespace presets {

/// Two correlated 2D Gaussian clusters inside the unit square.
inline DensitySpec fig1_nominal() {
  return DensitySpec::mixture(
      {0.5, 0.5},
      {DensitySpec::gaussian({0.3, 0.35}, {{0.0049, 0.0025}, {0.0025, 0.0049}}),
       DensitySpec::gaussian({0.7, 0.65}, {{0.0036, -0.0012}, {-0.0012, 0.0064}})});
}

inline DensitySpec fig1_anomaly() { return DensitySpec::uniform_cube(2); }

/// 200 nominal training points, 150 test points split evenly between the
/// nominal mixture and the uniform square.
inline ExperimentSpec fig1(std::uint64_t seed) {
  return {fig1_nominal(), fig1_anomaly(), 200, 75, 75, seed};
}

/// f0 = 1/2 N([8,0], diag(1,9)) + 1/2 N([-8,0], diag(1,9)).
inline DensitySpec clairvoyant_nominal() {
  return DensitySpec::mixture({0.5, 0.5}, {DensitySpec::gaussian_diag({8.0, 0.0}, {1.0, 9.0}),
                                           DensitySpec::gaussian_diag({-8.0, 0.0}, {1.0, 9.0})});
}

/// f1 = N(0, 49 I).
inline DensitySpec clairvoyant_anomaly() { return DensitySpec::gaussian_diag({0.0, 0.0}, {49.0, 49.0}); }

inline ExperimentSpec clairvoyant(std::size_t n_train, std::uint64_t seed, std::size_t n_test_each = 500) {
  return {clairvoyant_nominal(), clairvoyant_anomaly(), n_train, n_test_each, n_test_each, seed};
}

/// Equal-weight chain of isotropic Gaussians along a circular arc; a smooth
/// stand-in for a banana-shaped class.
inline DensitySpec arc_density(double cx, double cy, double radius, double from_deg, double to_deg,
                               std::size_t pieces, double sigma) {
  std::vector<double> weights(pieces, 1.0 / static_cast<double>(pieces));
  // exact simplex for the mixture check
  weights.back() = 1.0 - std::accumulate(weights.begin(), weights.end() - 1, 0.0);
  std::vector<DensitySpec> comps;
  comps.reserve(pieces);
  for (std::size_t i = 0; i < pieces; ++i) {
    const double t = (from_deg + (to_deg - from_deg) * (static_cast<double>(i) + 0.5) / static_cast<double>(pieces)) *
                     std::numbers::pi / 180.0;
    comps.push_back(DensitySpec::gaussian_diag({cx + radius * std::cos(t), cy + radius * std::sin(t)},
                                               {sigma * sigma, sigma * sigma}));
  }
  return DensitySpec::mixture(std::move(weights), std::move(comps));
}

inline DensitySpec banana_nominal() { return arc_density(0.0, 0.0, 1.0, 10.0, 170.0, 12, 0.12); }
inline DensitySpec banana_anomaly() { return arc_density(1.0, 0.45, 1.0, 190.0, 350.0, 12, 0.12); }

/// Banana protocol sizes: 109 nominal training points, 108 nominal and 183
/// anomalous test points.
inline ExperimentSpec banana(std::uint64_t seed) {
  return {banana_nominal(), banana_anomaly(), 109, 108, 183, seed};
}

}  // namespace presets

// --- CSV -------------------------------------------------------------------

struct CsvOptions {
  bool header = false;
  /// Column holding the label, by header name or 0-based index.
  std::optional<std::string> label_column;
  /// Raw label value treated as nominal (+1); every other value becomes -1.
  /// Without it labels must already be +1/1 or -1.
  std::optional<std::string> nominal_label;
};

namespace detail {

inline std::size_t resolve_label_column(const std::optional<std::vector<std::string>>& names,
                                        const std::string& spec, std::size_t columns) {
  if (names) {
    const auto it = std::find(names->begin(), names->end(), spec);
    if (it != names->end()) return static_cast<std::size_t>(it - names->begin());
  }
  const auto idx = text::parse_int(spec);
  if (!idx || *idx < 0 || static_cast<std::size_t>(*idx) >= columns) {
    throw ValidationError("label column '" + spec + "' is neither a header name nor a column index below " +
                          std::to_string(columns));
  }
  return static_cast<std::size_t>(*idx);
}

inline int map_label(std::string_view raw, const CsvOptions& opt, std::size_t row) {
  if (opt.nominal_label) return raw == *opt.nominal_label ? kNominal : kAnomaly;
  const auto v = text::parse_double(raw);
  if (v && *v == 1.0) return kNominal;
  if (v && *v == -1.0) return kAnomaly;
  throw ValidationError("unknown label value '" + std::string(raw) + "' on row " + std::to_string(row) +
                        " without a label mapping (give a nominal label)");
}

}  // namespace detail

/// Parses comma-separated rows of numbers. Row numbers in errors are 1-based
/// line numbers of the input.
inline Dataset read_csv(std::istream& is, const CsvOptions& opt = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::vector<std::string>> names;
  std::optional<std::size_t> columns;
  std::optional<std::size_t> label_col;
  Dataset data;
  Point row;

  while (std::getline(is, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const auto cells = text::split(t, ',');
    if (opt.header && !names) {
      names.emplace();
      for (auto c : cells) names->emplace_back(text::trim(c));
      columns = cells.size();
      continue;
    }
    if (!columns) columns = cells.size();
    if (cells.size() != *columns) {
      throw ValidationError("ragged row " + std::to_string(line_no) + ": expected " + std::to_string(*columns) +
                            " columns, found " + std::to_string(cells.size()));
    }
    if (!label_col && opt.label_column) label_col = detail::resolve_label_column(names, *opt.label_column, *columns);
    if (data.dim() == 0) {
      const std::size_t d = *columns - (label_col ? 1 : 0);
      if (d == 0) throw ValidationError("file has no feature columns");
      data = Dataset(d);
    }
    row.clear();
    int label = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = text::trim(cells[c]);
      if (label_col && c == *label_col) {
        label = detail::map_label(cell, opt, line_no);
        continue;
      }
      const auto v = text::parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw ValidationError("non-numeric value '" + std::string(cell) + "' in row " + std::to_string(line_no) +
                              ", column " + std::to_string(c + 1));
      }
      row.push_back(*v);
    }
    if (label_col)
      data.push_back(row, label);
    else
      data.push_back(row);
  }
  if (data.dim() == 0) throw ValidationError("file contains no data rows");
  if (label_col) {
    if (opt.nominal_label)
      data.label_mapping = {{*opt.nominal_label, kNominal}, {"*", kAnomaly}};
    else
      data.label_mapping = {{"1", kNominal}, {"-1", kAnomaly}};
  }
  return data;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  Dataset data = read_csv(in, opt);
  data.name = path;
  return data;
}

/// Writes features (and a trailing label column when present).
inline void write_csv(std::ostream& os, const Dataset& data, bool header = false) {
  if (header) {
    for (std::size_t j = 0; j < data.dim(); ++j) os << (j ? "," : "") << 'x' << j;
    if (data.has_labels()) os << ",label";
    os << '\n';
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data[i];
    for (std::size_t j = 0; j < p.size(); ++j) os << (j ? "," : "") << text::format_double(p[j]);
    if (data.has_labels()) os << ',' << data.label(i);
    os << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& data, bool header = false) {
  std::ofstream out(path);
  if (!out) throw ComputationError("cannot write '" + path + "'");
  write_csv(out, data, header);
}

// --- splitting -----------------------------------------------------------------

struct SplitHalves {
  Dataset s1;
  Dataset s2;
};

/// Seeded shuffle then halve; S1 gets the extra point when n is odd.
inline SplitHalves split_train(const Dataset& data, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n < 4) throw ValidationError("split needs at least 4 points, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, 20);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t m1 = (n + 1) / 2;
  const std::span<const std::size_t> all(order);
  return {data.subset(all.first(m1)), data.subset(all.subspan(m1))};
}

// --- manifest --------------------------------------------------------------------

/// Plain key = value file grouped into [sections]; '#' starts a comment.
class Manifest {
 public:
  struct Section {
    std::string name;
    std::map<std::string, std::string> values;

    const std::string* find(const std::string& key) const {
      const auto it = values.find(key);
      return it == values.end() ? nullptr : &it->second;
    }

    const std::string& get(const std::string& key) const {
      if (const auto* v = find(key)) return *v;
      throw ValidationError("manifest section [" + name + "] is missing key '" + key + "'");
    }

    double get_double(const std::string& key) const {
      const auto v = text::parse_double(get(key));
      if (!v) throw ValidationError("manifest key '" + key + "' in [" + name + "] is not a number");
      return *v;
    }

    std::size_t get_count(const std::string& key) const {
      const auto v = text::parse_int(get(key));
      if (!v || *v < 0) throw ValidationError("manifest key '" + key + "' in [" + name + "] is not a count");
      return static_cast<std::size_t>(*v);
    }
  };

  static Manifest parse(std::istream& is) {
    Manifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      std::string_view t = line;
      if (const auto hash = t.find('#'); hash != std::string_view::npos) t = t.substr(0, hash);
      t = text::trim(t);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw ValidationError("unterminated section header on manifest line " + std::to_string(line_no));
        m.sections_.push_back({std::string(text::trim(t.substr(1, t.size() - 2))), {}});
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) throw ValidationError("expected key = value on manifest line " + std::to_string(line_no));
      if (m.sections_.empty()) m.sections_.push_back({"", {}});
      m.sections_.back().values[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
    }
    return m;
  }

  static Manifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest '" + path + "'");
    return parse(in);
  }

  const std::vector<Section>& sections() const { return sections_; }

  const Section* find(const std::string& name) const {
    for (const auto& s : sections_) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

 private:
  std::vector<Section> sections_;
};

}  // namespace lpe

#endif  // LPE_DATA_HPP_
