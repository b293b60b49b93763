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

#ifndef LPE_MODEL_IO_HPP_
#define LPE_MODEL_IO_HPP_

/*
 Flat text model file. Every real is written with 17 significant digits so a
 save/load cycle reproduces the model bit for bit.

   lpe-model 1
   dim 2
   n 3
   backend euclidean | backend weighted w_1 .. w_d | backend geodesic k_geo
   mode knn K | mode eps EPSILON
   normalization none | normalization min_1 .. min_d max_1 .. max_d
   points
   x_11 .. x_1d
   ...
   stats
   R(x_1) or N(x_1)
   ...
   end

 Loading refits the model from the stored points and rejects the file when
 the recomputed statistics differ from the stored ones.
*/

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lpe/dataset.hpp"
#include "lpe/error.hpp"
#include "lpe/geometry.hpp"
#include "lpe/scoring.hpp"
#include "lpe/text.hpp"

namespace lpe {

inline void write_model(std::ostream& os, const NominalModel& model) {
  using text::format_double;
  const Dataset& train = model.training();
  os << "lpe-model 1\n";
  os << "dim " << train.dim() << '\n';
  os << "n " << train.size() << '\n';
  os << "backend " << model.backend().name();
  if (model.backend().is_weighted()) {
    for (double w : model.backend().weights()) os << ' ' << format_double(w);
  } else if (model.backend().is_geodesic()) {
    os << ' ' << model.backend().k_geo();
  }
  os << '\n';
  if (model.is_knn())
    os << "mode knn " << model.k() << '\n';
  else
    os << "mode eps " << format_double(model.epsilon()) << '\n';
  os << "normalization";
  if (train.normalization) {
    for (double v : train.normalization->min) os << ' ' << format_double(v);
    for (double v : train.normalization->max) os << ' ' << format_double(v);
  } else {
    os << " none";
  }
  os << "\npoints\n";
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto p = train[i];
    for (std::size_t j = 0; j < p.size(); ++j) os << (j ? " " : "") << format_double(p[j]);
    os << '\n';
  }
  os << "stats\n";
  if (model.is_knn()) {
    for (double r : model.knn_stats().radii) os << format_double(r) << '\n';
  } else {
    for (std::size_t d : model.eps_stats().degrees) os << d << '\n';
  }
  os << "end\n";
}

inline void save_model(const std::string& path, const NominalModel& model) {
  std::ofstream out(path);
  if (!out) throw ComputationError("cannot write model file '" + path + "'");
  write_model(out, model);
  if (!out) throw ComputationError("failed while writing model file '" + path + "'");
}

namespace detail {

class ModelReader {
 public:
  explicit ModelReader(std::istream& is) : is_(is) {}

  std::vector<std::string_view> next() {
    while (std::getline(is_, line_)) {
      ++line_no_;
      auto w = text::words(line_);
      if (!w.empty()) return w;
    }
    fail("unexpected end of file");
  }

  std::vector<std::string_view> expect(std::string_view key, std::size_t min_words) {
    auto w = next();
    if (w.front() != key || w.size() < min_words) fail("expected '" + std::string(key) + "'");
    return w;
  }

  double number(std::string_view s) {
    const auto v = text::parse_double(s);
    if (!v) fail("bad number '" + std::string(s) + "'");
    return *v;
  }

  std::size_t count(std::string_view s) {
    const auto v = text::parse_int(s);
    if (!v || *v < 0) fail("bad count '" + std::string(s) + "'");
    return static_cast<std::size_t>(*v);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& is_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace detail

inline NominalModel read_model(std::istream& is) {
  detail::ModelReader r(is);
  auto w = r.expect("lpe-model", 2);
  if (w[1] != "1") r.fail("unsupported model format version '" + std::string(w[1]) + "'");
  const std::size_t d = r.count(r.expect("dim", 2)[1]);
  const std::size_t n = r.count(r.expect("n", 2)[1]);
  if (d == 0 || n < 2) r.fail("model needs dim >= 1 and n >= 2");

  w = r.expect("backend", 2);
  DistanceBackend backend;
  if (w[1] == "euclidean") {
    backend = DistanceBackend::euclidean();
  } else if (w[1] == "weighted") {
    if (w.size() != d + 2) r.fail("weighted backend needs " + std::to_string(d) + " weights");
    std::vector<double> weights;
    for (std::size_t j = 2; j < w.size(); ++j) weights.push_back(r.number(w[j]));
    backend = DistanceBackend::weighted(std::move(weights));
  } else if (w[1] == "geodesic") {
    if (w.size() != 3) r.fail("geodesic backend needs k_geo");
    backend = DistanceBackend::geodesic(r.count(w[2]));
  } else {
    r.fail("unknown backend '" + std::string(w[1]) + "'");
  }

  w = r.expect("mode", 3);
  Mode mode;
  if (w[1] == "knn")
    mode = KnnMode{r.count(w[2])};
  else if (w[1] == "eps")
    mode = EpsMode{r.number(w[2])};
  else
    r.fail("unknown mode '" + std::string(w[1]) + "'");

  w = r.expect("normalization", 2);
  std::optional<NormalizationRecord> norm;
  if (!(w.size() == 2 && w[1] == "none")) {
    if (w.size() != 2 * d + 1) r.fail("normalization needs " + std::to_string(2 * d) + " values");
    NormalizationRecord rec;
    for (std::size_t j = 0; j < d; ++j) rec.min.push_back(r.number(w[1 + j]));
    for (std::size_t j = 0; j < d; ++j) rec.max.push_back(r.number(w[1 + d + j]));
    norm = std::move(rec);
  }

  r.expect("points", 1);
  Dataset train(d);
  train.reserve(n);
  Point p(d);
  for (std::size_t i = 0; i < n; ++i) {
    w = r.next();
    if (w.size() != d) r.fail("point row needs " + std::to_string(d) + " coordinates");
    for (std::size_t j = 0; j < d; ++j) p[j] = r.number(w[j]);
    train.push_back(p);
  }
  train.normalization = norm;

  r.expect("stats", 1);
  std::vector<double> stored(n);
  for (std::size_t i = 0; i < n; ++i) {
    w = r.next();
    if (w.size() != 1) r.fail("stats row needs one value");
    stored[i] = r.number(w[0]);
  }
  r.expect("end", 1);

  NominalModel model = NominalModel::fit(std::move(train), std::move(backend), mode);
  bool same = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double recomputed = model.is_knn() ? model.knn_stats().radii[i]
                                             : static_cast<double>(model.eps_stats().degrees[i]);
    same = same && recomputed == stored[i];
  }
  if (!same) throw ValidationError("model file statistics do not match its training points");
  return model;
}

inline NominalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  return read_model(in);
}

}  // namespace lpe

#endif  // LPE_MODEL_IO_HPP_
