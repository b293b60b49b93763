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

// lpe: command-line front end.
//
//   lpe fit TRAIN.csv --mode knn --k auto --out DIR
//   lpe score DIR/model.lpe TEST.csv --alpha 0.05 --out DIR
//   lpe evaluate --scores DIR/scores.csv --alpha 0.05 --alpha 0.1 --out DIR
//   lpe generate --experiment fig1 --seed 1 --out DIR
//   lpe reproduce fig1|clairvoyant|banana-sweep|realdata --out DIR
//
// Exit codes: 0 success, 1 validation error, 2 runtime error,
// 3 reproduce skipped every recipe.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpe/lpe.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSkippedAll = 3;

const std::vector<std::string> kExperiments{"fig1", "clairvoyant", "banana-sweep", "realdata"};

struct CsvFlags {
  bool header = false;
  std::string label_col;
  std::string nominal_label;

  lpe::CsvOptions options() const {
    lpe::CsvOptions o;
    o.header = header;
    if (!label_col.empty()) o.label_column = label_col;
    if (!nominal_label.empty()) o.nominal_label = nominal_label;
    return o;
  }
};

void add_csv_flags(CLI::App* cmd, CsvFlags& f) {
  cmd->add_flag("--header", f.header, "First CSV row is a header");
  cmd->add_option("--label-col", f.label_col, "Label column (header name or 0-based index)");
  cmd->add_option("--nominal-label", f.nominal_label, "Raw label value treated as nominal");
}

/// Ordered key/value echo of every resolved parameter.
class ConfigEcho {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& kv : entries_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }

  void write(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw lpe::ComputationError("cannot write " + path.string());
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
  std::string out = "'";
  for (char c : s) out += (c == '\'' ? std::string("'\\''") : std::string(1, c));
  return out + "'";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw lpe::ComputationError("cannot create output directory " + dir.string() + ": " + ec.message());
}

/// Writes through a temporary file so a failure leaves no partial output.
template <class Fn>
void write_file(const fs::path& path, Fn&& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw lpe::ComputationError("cannot write " + path.string());
    body(out);
    if (!out) throw lpe::ComputationError("failed while writing " + path.string());
  }
  fs::rename(tmp, path);
}

std::vector<double> read_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lpe::ValidationError("cannot open weights file '" + path + "'");
  std::vector<double> w;
  std::string token;
  std::stringstream all;
  all << in.rdbuf();
  std::string content = all.str();
  for (char& c : content) {
    if (c == ',') c = ' ';
  }
  for (auto word : lpe::text::words(content)) {
    for (auto piece : lpe::text::split(word, '\n')) {
      if (lpe::text::trim(piece).empty()) continue;
      const auto v = lpe::text::parse_double(piece);
      if (!v) throw lpe::ValidationError("non-numeric weight '" + std::string(piece) + "' in " + path);
      w.push_back(*v);
    }
  }
  return w;
}

// --- fit ------------------------------------------------------------------------

struct FitArgs {
  std::string train;
  CsvFlags csv;
  std::string mode = "knn";
  std::string k = "auto";
  double epsilon = 0.0;
  std::string metric = "euclidean";
  std::size_t kgeo = 0;
  std::string weights;
  bool no_normalize = false;
  std::string out = "lpe_out";
};

int run_fit(const FitArgs& a) {
  lpe::Dataset train = lpe::load_csv(a.train, a.csv.options());
  if (train.has_labels()) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train.label(i) == lpe::kNominal) keep.push_back(i);
    }
    train = train.subset(keep);
    train.clear_labels();
  }
  const std::size_t n = train.size();

  std::optional<lpe::Mode> mode;
  if (a.mode == "knn") {
    std::size_t k = 0;
    if (a.k == "auto") {
      k = lpe::default_k(n);
    } else {
      const auto v = lpe::text::parse_int(a.k);
      if (!v || *v < 1) throw lpe::ValidationError("--k must be a positive integer or 'auto', got '" + a.k + "'");
      k = static_cast<std::size_t>(*v);
    }
    mode = lpe::KnnMode{k};
  } else if (a.mode == "eps") {
    if (!(a.epsilon > 0.0)) throw lpe::ValidationError("--mode eps needs a positive --epsilon");
    mode = lpe::EpsMode{a.epsilon};
  } else {
    throw lpe::ValidationError("--mode must be knn or eps, got '" + a.mode + "'");
  }

  lpe::DistanceBackend backend;
  if (a.metric == "euclidean") {
    backend = lpe::DistanceBackend::euclidean();
  } else if (a.metric == "weighted") {
    if (a.weights.empty()) throw lpe::ValidationError("--metric weighted needs --weights FILE");
    backend = lpe::DistanceBackend::weighted(read_weights(a.weights));
  } else if (a.metric == "geodesic") {
    backend = lpe::DistanceBackend::geodesic(a.kgeo > 0 ? a.kgeo : lpe::default_k_geo(mode));
  } else {
    throw lpe::ValidationError("--metric must be euclidean, weighted or geodesic, got '" + a.metric + "'");
  }

  const lpe::NominalModel model = lpe::fit_pipeline(train, backend, mode, !a.no_normalize);
  for (const auto& w : model.warnings()) std::cerr << "warning: " << w << '\n';

  const fs::path out(a.out);
  ensure_dir(out);
  write_file(out / "model.lpe", [&](std::ostream& os) { lpe::write_model(os, model); });

  ConfigEcho cfg;
  cfg.set("command", "fit");
  cfg.set("train", a.train);
  cfg.set("n_train", std::to_string(n));
  cfg.set("dim", std::to_string(train.dim()));
  cfg.set("header", a.csv.header ? "true" : "false");
  cfg.set("label_col", a.csv.label_col);
  cfg.set("nominal_label", a.csv.nominal_label);
  cfg.set("mode", a.mode);
  std::string rerun = "lpe fit " + quote(a.train) + " --mode " + a.mode;
  if (model.is_knn()) {
    cfg.set("k_requested", a.k);
    cfg.set("k", std::to_string(model.k()));
    rerun += " --k " + std::to_string(model.k());
  } else {
    cfg.set("epsilon", lpe::text::format_double(model.epsilon()));
    rerun += " --epsilon " + lpe::text::format_double(model.epsilon());
  }
  cfg.set("metric", backend.name());
  rerun += " --metric " + backend.name();
  if (backend.is_geodesic()) {
    cfg.set("kgeo", std::to_string(backend.k_geo()));
    rerun += " --kgeo " + std::to_string(backend.k_geo());
  }
  if (backend.is_weighted()) {
    cfg.set("weights", a.weights);
    rerun += " --weights " + quote(a.weights);
  }
  cfg.set("normalize", a.no_normalize ? "false" : "true");
  if (a.no_normalize) rerun += " --no-normalize";
  if (a.csv.header) rerun += " --header";
  if (!a.csv.label_col.empty()) rerun += " --label-col " + quote(a.csv.label_col);
  if (!a.csv.nominal_label.empty()) rerun += " --nominal-label " + quote(a.csv.nominal_label);
  rerun += " --out " + quote(a.out);
  cfg.set("out", a.out);
  cfg.set("rerun", rerun);
  cfg.write(out / "config.txt");

  std::cout << "fit " << n << " points, dim " << train.dim() << ", metric " << backend.name();
  if (model.is_knn())
    std::cout << ", resolved K=" << model.k();
  else
    std::cout << ", epsilon=" << lpe::text::format_double(model.epsilon());
  std::cout << " -> " << (out / "model.lpe").string() << '\n';
  return kExitOk;
}

// --- score ----------------------------------------------------------------------

struct ScoreArgs {
  std::string model;
  std::string test;
  CsvFlags csv;
  double alpha = 0.05;
  std::string out = "lpe_out";
};

int run_score(const ScoreArgs& a) {
  const lpe::NominalModel model = lpe::load_model(a.model);
  const lpe::Dataset test = lpe::load_csv(a.test, a.csv.options());
  if (test.dim() != model.dim()) {
    throw lpe::ValidationError("test data has dimension " + std::to_string(test.dim()) +
                               " but the model has dimension " + std::to_string(model.dim()));
  }
  std::size_t out_of_range = 0;
  const lpe::Dataset q = lpe::prepare_queries(model, test, &out_of_range);
  std::vector<lpe::ScoreReport> reports;
  reports.reserve(q.size());
  std::size_t anomalies = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    reports.push_back(model.report(q[i], a.alpha));
    if (reports.back().decision == lpe::Decision::anomaly) ++anomalies;
  }

  const fs::path out(a.out);
  ensure_dir(out);
  write_file(out / "scores.csv", [&](std::ostream& os) {
    os << "index,score,decision" << (test.has_labels() ? ",label" : "") << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) {
      os << i << ',' << lpe::text::format_double(reports[i].score) << ',' << lpe::to_string(reports[i].decision);
      if (test.has_labels()) os << ',' << test.label(i);
      os << '\n';
    }
  });

  ConfigEcho cfg;
  cfg.set("command", "score");
  cfg.set("model", a.model);
  cfg.set("test", a.test);
  cfg.set("alpha", lpe::text::format_double(a.alpha));
  cfg.set("header", a.csv.header ? "true" : "false");
  cfg.set("label_col", a.csv.label_col);
  cfg.set("nominal_label", a.csv.nominal_label);
  cfg.set("out", a.out);
  std::string rerun = "lpe score " + quote(a.model) + " " + quote(a.test) + " --alpha " +
                      lpe::text::format_double(a.alpha);
  if (a.csv.header) rerun += " --header";
  if (!a.csv.label_col.empty()) rerun += " --label-col " + quote(a.csv.label_col);
  if (!a.csv.nominal_label.empty()) rerun += " --nominal-label " + quote(a.csv.nominal_label);
  rerun += " --out " + quote(a.out);
  cfg.set("rerun", rerun);
  cfg.write(out / "score_config.txt");

  if (out_of_range > 0) {
    std::cerr << "note: " << out_of_range << " test coordinates fall outside the training range\n";
  }
  std::cout << "scored " << reports.size() << " points; anomaly fraction "
            << lpe::text::format_double(static_cast<double>(anomalies) / static_cast<double>(reports.size()))
            << " at alpha " << lpe::text::format_double(a.alpha) << '\n';
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------------

struct EvaluateArgs {
  std::string scores;
  std::string model;
  std::string test;
  CsvFlags csv;
  std::vector<double> alphas;
  std::string out = "lpe_out";
};

/// Reads a scores.csv written by `score` (needs its label column).
lpe::LabelledScores read_scores_file(const std::string& path, std::vector<double>& all, std::vector<int>& labels) {
  std::ifstream in(path);
  if (!in) throw lpe::ValidationError("cannot open scores file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw lpe::ValidationError("scores file '" + path + "' is empty");
  const auto head = lpe::text::split(lpe::text::trim(line), ',');
  std::optional<std::size_t> score_col, label_col;
  for (std::size_t c = 0; c < head.size(); ++c) {
    const auto h = lpe::text::trim(head[c]);
    if (h == "score") score_col = c;
    if (h == "label") label_col = c;
  }
  if (!score_col) throw lpe::ValidationError("scores file has no 'score' column");
  if (!label_col) throw lpe::ValidationError("scores file has no 'label' column; labels are required");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (lpe::text::trim(line).empty()) continue;
    const auto cells = lpe::text::split(lpe::text::trim(line), ',');
    if (cells.size() != head.size()) throw lpe::ValidationError("ragged row " + std::to_string(line_no) + " in scores file");
    const auto s = lpe::text::parse_double(cells[*score_col]);
    const auto l = lpe::text::parse_int(cells[*label_col]);
    if (!s || !l || (*l != 1 && *l != -1)) {
      throw lpe::ValidationError("bad score or label in row " + std::to_string(line_no));
    }
    all.push_back(*s);
    labels.push_back(static_cast<int>(*l));
  }
  if (all.empty()) throw lpe::ValidationError("scores file has no rows");
  return lpe::split_by_label(all, labels);
}

int run_evaluate(EvaluateArgs a) {
  if (a.alphas.empty()) a.alphas = {0.05};
  for (double al : a.alphas) {
    if (!(al > 0.0 && al <= 1.0)) throw lpe::ValidationError("--alpha values must lie in (0, 1]");
  }
  std::vector<double> scores;
  std::vector<int> labels;
  lpe::LabelledScores split;
  std::string source;
  if (!a.scores.empty()) {
    split = read_scores_file(a.scores, scores, labels);
    source = a.scores;
  } else if (!a.model.empty() && !a.test.empty()) {
    const lpe::NominalModel model = lpe::load_model(a.model);
    const lpe::Dataset test = lpe::load_csv(a.test, a.csv.options());
    if (!test.has_labels()) throw lpe::ValidationError("evaluate needs labels: give --label-col");
    scores = lpe::score_all(model, test);
    split = lpe::split_by_label(scores, test.labels());
    source = a.model + " + " + a.test;
  } else {
    throw lpe::ValidationError("evaluate needs --scores FILE or --model FILE --test FILE");
  }
  const lpe::Evaluation e = lpe::evaluate(split, a.alphas);

  const fs::path out(a.out);
  ensure_dir(out);
  if (e.roc) write_file(out / "roc.tsv", [&](std::ostream& os) { lpe::write_roc_tsv(os, *e.roc); });
  std::ostringstream rep;
  rep << "source " << source << '\n';
  rep << "nominal " << split.nominal.size() << '\n';
  rep << "anomaly " << split.anomaly.size() << '\n';
  if (e.roc)
    rep << "auc " << lpe::text::format_double(e.roc->auc) << '\n';
  else
    rep << "auc undefined (labels contain a single class)\n";
  if (e.ks_nominal) {
    rep << "ks_nominal_uniform " << lpe::text::format_double(*e.ks_nominal) << '\n';
    rep << "ks_pvalue " << lpe::text::format_double(lpe::ks_pvalue(*e.ks_nominal, split.nominal.size())) << '\n';
  }
  if (e.anomaly_median) rep << "anomaly_median " << lpe::text::format_double(*e.anomaly_median) << '\n';
  for (std::size_t i = 0; i < a.alphas.size(); ++i) {
    rep << "alpha " << lpe::text::format_double(a.alphas[i]);
    if (!split.nominal.empty()) rep << " fa " << lpe::text::format_double(e.fa[i]);
    if (!split.anomaly.empty()) {
      rep << " det " << lpe::text::format_double(e.det[i]) << " miss " << lpe::text::format_double(1.0 - e.det[i]);
    }
    rep << '\n';
  }
  write_file(out / "report.txt", [&](std::ostream& os) { os << rep.str(); });
  std::cout << rep.str();
  return kExitOk;
}

// --- generate ---------------------------------------------------------------------

struct GenerateArgs {
  std::string experiment = "fig1";
  std::uint64_t seed = 1;
  std::size_t n_train = 160;
  std::string out = "lpe_out";
};

int run_generate(const GenerateArgs& a) {
  lpe::ExperimentSpec spec;
  if (a.experiment == "fig1")
    spec = lpe::presets::fig1(a.seed);
  else if (a.experiment == "clairvoyant")
    spec = lpe::presets::clairvoyant(a.n_train, a.seed);
  else if (a.experiment == "banana")
    spec = lpe::presets::banana(a.seed);
  else
    throw lpe::ValidationError("unknown experiment '" + a.experiment + "'; valid: fig1, clairvoyant, banana");
  const lpe::GeneratedData data = lpe::generate(spec);
  const fs::path out(a.out);
  ensure_dir(out);
  write_file(out / "train.csv", [&](std::ostream& os) { lpe::write_csv(os, data.train, true); });
  write_file(out / "test.csv", [&](std::ostream& os) { lpe::write_csv(os, data.test, true); });
  ConfigEcho cfg;
  cfg.set("command", "generate");
  cfg.set("experiment", a.experiment);
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("n_train", std::to_string(spec.n_train));
  cfg.set("n_test_nominal", std::to_string(spec.n_test_nominal));
  cfg.set("n_test_anomaly", std::to_string(spec.n_test_anomaly));
  cfg.set("out", a.out);
  std::string rerun = "lpe generate --experiment " + a.experiment + " --seed " + std::to_string(a.seed);
  if (a.experiment == "clairvoyant") rerun += " --n-train " + std::to_string(a.n_train);
  cfg.set("rerun", rerun + " --out " + quote(a.out));
  cfg.write(out / "config.txt");
  std::cout << "wrote " << data.train.size() << " training and " << data.test.size() << " test points to "
            << out.string() << '\n';
  return kExitOk;
}

// --- reproduce --------------------------------------------------------------------

struct ReproduceArgs {
  std::string experiment;
  std::uint64_t seed = 1;
  std::string out = "lpe_out";
  std::string data_dir = "data";
  std::string manifest;
  std::size_t trials = 0;
  std::size_t n_mc = 1000000;
};

void write_scores_csv(const fs::path& path, const std::vector<double>& scores, const std::vector<int>& labels) {
  write_file(path, [&](std::ostream& os) {
    os << "index,score,label\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
      os << i << ',' << lpe::text::format_double(scores[i]) << ',' << labels[i] << '\n';
    }
  });
}

int reproduce_fig1(const ReproduceArgs& a, const fs::path& out, std::ostream& summary) {
  const lpe::Fig1Result r = lpe::reproduce_fig1(a.seed);
  write_file(out / "train.csv", [&](std::ostream& os) { lpe::write_csv(os, r.data.train, true); });
  write_file(out / "test.csv", [&](std::ostream& os) { lpe::write_csv(os, r.data.test, true); });
  write_scores_csv(out / "scores.csv", r.scores, r.data.test.labels());
  write_file(out / "roc.tsv", [&](std::ostream& os) { lpe::write_roc_tsv(os, *r.eval.roc); });
  summary << "experiment fig1\nseed " << a.seed << "\nk " << r.k << "\nalpha " << lpe::text::format_double(r.alpha)
          << "\nks_nominal " << lpe::text::format_double(*r.eval.ks_nominal) << "\nanomaly_median "
          << lpe::text::format_double(*r.eval.anomaly_median) << "\nauc " << lpe::text::format_double(r.eval.roc->auc)
          << "\nfa " << lpe::text::format_double(r.eval.fa[0]) << "\ndet " << lpe::text::format_double(r.eval.det[0])
          << "\nlevel_set_agreement " << lpe::text::format_double(r.level_set_agreement) << '\n';
  return kExitOk;
}

int reproduce_clairvoyant(const ReproduceArgs& a, const fs::path& out, std::ostream& summary) {
  const std::size_t trials = a.trials ? a.trials : 15;
  const lpe::ClairvoyantStudy st = lpe::reproduce_clairvoyant(a.seed, {40, 160}, trials, 6, 500, a.n_mc);
  write_file(out / "auc_vs_n.tsv", [&](std::ostream& os) {
    os << "n\tmean_auc";
    for (std::size_t t = 0; t < trials; ++t) os << "\ttrial" << t;
    os << '\n';
    for (const auto& row : st.rows) {
      os << row.n_train << '\t' << lpe::text::format_double(row.mean_auc);
      for (double v : row.trial_auc) os << '\t' << lpe::text::format_double(v);
      os << '\n';
    }
    os << "clairvoyant\t" << lpe::text::format_double(st.clairvoyant.auc) << '\n';
  });
  write_file(out / "mean_roc.tsv", [&](std::ostream& os) {
    os << "fa";
    for (const auto& row : st.rows) os << "\tdet_n" << row.n_train;
    os << "\tdet_clairvoyant\n";
    for (std::size_t g = 0; g < st.fa_grid.size(); ++g) {
      os << lpe::text::format_double(st.fa_grid[g]);
      for (const auto& row : st.rows) os << '\t' << lpe::text::format_double(row.mean_det[g]);
      os << '\t' << lpe::text::format_double(st.clairvoyant_det[g]) << '\n';
    }
  });
  summary << "experiment clairvoyant\nseed " << a.seed << "\nk " << st.k << "\ntrials " << trials << "\nn_mc "
          << a.n_mc << '\n';
  for (const auto& row : st.rows) summary << "mean_auc_n" << row.n_train << ' ' << lpe::text::format_double(row.mean_auc) << '\n';
  summary << "clairvoyant_auc " << lpe::text::format_double(st.clairvoyant.auc) << '\n';
  return kExitOk;
}

int reproduce_banana(const ReproduceArgs& a, const fs::path& out, std::ostream& summary) {
  std::vector<lpe::GeneratedData> trials;
  std::string source = "synthetic banana-like mixture";
  const fs::path manifest_path = a.manifest.empty() ? fs::path(a.data_dir) / "manifest.txt" : fs::path(a.manifest);
  if (fs::exists(manifest_path)) {
    const lpe::Manifest m = lpe::Manifest::load(manifest_path.string());
    if (const auto* sec = m.find("banana")) {
      const fs::path file = fs::path(a.data_dir) / sec->get("file");
      if (fs::exists(file)) {
        lpe::CsvOptions opt;
        if (const auto* h = sec->find("header")) opt.header = (*h == "true" || *h == "1" || *h == "yes");
        opt.label_column = sec->get("label_col");
        if (const auto* nl = sec->find("nominal_label")) opt.nominal_label = *nl;
        const lpe::Dataset all = lpe::load_csv(file.string(), opt);
        trials.push_back(lpe::protocol_split(all, sec->get_count("n_train"), sec->get_count("n_test_nominal"),
                                             sec->get_count("n_test_anomaly"), a.seed));
        source = file.string();
      } else {
        std::cerr << "note: " << file.string() << " not found; using the synthetic banana-like setup\n";
      }
    }
  }
  if (trials.empty()) trials = lpe::synthetic_banana_trials(a.seed, a.trials ? a.trials : 10);
  const std::vector<std::size_t> ks{2, 4, 6, 8, 10, 12};
  const lpe::Sweep sw = lpe::k_sweep(trials, ks, {0.05, 0.08});
  for (const auto& row : sw.rows) {
    write_file(out / ("roc_k" + std::to_string(row.k) + ".tsv"), [&](std::ostream& os) { lpe::write_roc_tsv(os, row.roc); });
  }
  write_file(out / "auc_vs_k.tsv", [&](std::ostream& os) {
    os << "k\tmean_auc\tfa_at_0.05\tfa_at_0.08\n";
    for (const auto& row : sw.rows) {
      os << row.k << '\t' << lpe::text::format_double(row.mean_auc) << '\t' << lpe::text::format_double(row.fa[0])
         << '\t' << lpe::text::format_double(row.fa[1]) << '\n';
    }
  });
  summary << "experiment banana-sweep\nsource " << source << "\nseed " << a.seed << "\ntrials " << trials.size()
          << "\nauc_spread " << lpe::text::format_double(sw.auc_spread()) << '\n';
  return kExitOk;
}

int reproduce_realdata(const ReproduceArgs& a, const fs::path& out, std::ostream& summary) {
  const fs::path manifest_path = a.manifest.empty() ? fs::path(a.data_dir) / "manifest.txt" : fs::path(a.manifest);
  if (!fs::exists(manifest_path)) {
    std::cerr << "skip: manifest " << manifest_path.string() << " not found\n";
    summary << "experiment realdata\nran 0\n";
    return kExitSkippedAll;
  }
  const lpe::Manifest m = lpe::Manifest::load(manifest_path.string());
  std::size_t ran = 0;
  summary << "experiment realdata\nseed " << a.seed << '\n';
  for (const auto& sec : m.sections()) {
    if (sec.name.empty() || sec.name == "banana") continue;
    const lpe::RealDataRun run = lpe::run_manifest_entry(sec, a.data_dir, a.seed);
    if (!run.ran) {
      std::cerr << "skip [" << sec.name << "]: " << run.note << '\n';
      summary << sec.name << " skipped\n";
      continue;
    }
    ++ran;
    write_scores_csv(out / (sec.name + "_scores.csv"), run.scores, run.data.test.labels());
    if (run.eval.roc) {
      write_file(out / (sec.name + "_roc.tsv"), [&](std::ostream& os) { lpe::write_roc_tsv(os, *run.eval.roc); });
    }
    summary << sec.name << " train " << run.data.train.size() << " test " << run.data.test.size() << " dim "
            << run.data.train.dim() << " " << run.mode << " metric " << run.backend;
    if (run.eval.roc) summary << " auc " << lpe::text::format_double(run.eval.roc->auc);
    for (std::size_t i = 0; i < run.eval.alphas.size(); ++i) {
      summary << " alpha " << lpe::text::format_double(run.eval.alphas[i]) << " fa "
              << lpe::text::format_double(run.eval.fa[i]) << " miss " << lpe::text::format_double(1.0 - run.eval.det[i]);
    }
    summary << '\n';
  }
  summary << "ran " << ran << '\n';
  return ran == 0 ? kExitSkippedAll : kExitOk;
}

int run_reproduce(const ReproduceArgs& a) {
  bool known = false;
  for (const auto& e : kExperiments) known = known || e == a.experiment;
  if (!known) {
    std::string valid;
    for (const auto& e : kExperiments) valid += (valid.empty() ? "" : ", ") + e;
    throw lpe::ValidationError("unknown experiment '" + a.experiment + "'; valid names: " + valid);
  }
  const fs::path out(a.out);
  ensure_dir(out);
  std::ostringstream summary;
  int code = kExitOk;
  if (a.experiment == "fig1") code = reproduce_fig1(a, out, summary);
  else if (a.experiment == "clairvoyant") code = reproduce_clairvoyant(a, out, summary);
  else if (a.experiment == "banana-sweep") code = reproduce_banana(a, out, summary);
  else code = reproduce_realdata(a, out, summary);

  write_file(out / "summary.txt", [&](std::ostream& os) { os << summary.str(); });
  ConfigEcho cfg;
  cfg.set("command", "reproduce");
  cfg.set("experiment", a.experiment);
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("data_dir", a.data_dir);
  cfg.set("manifest", a.manifest);
  cfg.set("trials", std::to_string(a.trials));
  cfg.set("n_mc", std::to_string(a.n_mc));
  cfg.set("out", a.out);
  std::string rerun = "lpe reproduce " + a.experiment + " --seed " + std::to_string(a.seed) + " --data-dir " +
                      quote(a.data_dir) + " --n-mc " + std::to_string(a.n_mc) + " --out " + quote(a.out);
  if (!a.manifest.empty()) rerun += " --manifest " + quote(a.manifest);
  if (a.trials) rerun += " --trials " + std::to_string(a.trials);
  cfg.set("rerun", rerun);
  cfg.write(out / "config.txt");
  std::cout << summary.str();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized p-value estimation anomaly detector"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a nominal model from training CSV");
  fit_cmd->add_option("train", fit.train, "Training CSV")->required();
  add_csv_flags(fit_cmd, fit.csv);
  fit_cmd->add_option("--mode", fit.mode, "knn or eps");
  fit_cmd->add_option("--k", fit.k, "Neighbour count or 'auto' (round(n^0.4))");
  fit_cmd->add_option("--epsilon", fit.epsilon, "Radius for eps mode");
  fit_cmd->add_option("--metric", fit.metric, "euclidean, weighted or geodesic");
  fit_cmd->add_option("--kgeo", fit.kgeo, "Geodesic graph neighbour count (default max(K,10))");
  fit_cmd->add_option("--weights", fit.weights, "File of per-coordinate weights for --metric weighted");
  fit_cmd->add_flag("--no-normalize", fit.no_normalize, "Skip min-max scaling to the unit cube");
  fit_cmd->add_option("--out", fit.out, "Output directory");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a test CSV against a fitted model");
  score_cmd->add_option("model", score.model, "Model file")->required();
  score_cmd->add_option("test", score.test, "Test CSV")->required();
  add_csv_flags(score_cmd, score.csv);
  score_cmd->add_option("--alpha", score.alpha, "Significance level");
  score_cmd->add_option("--out", score.out, "Output directory");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "ROC, KS uniformity and false-alarm report");
  eval_cmd->add_option("--scores", eval.scores, "scores.csv with a label column");
  eval_cmd->add_option("--model", eval.model, "Model file (with --test)");
  eval_cmd->add_option("--test", eval.test, "Labelled test CSV (with --model)");
  add_csv_flags(eval_cmd, eval.csv);
  eval_cmd->add_option("--alpha", eval.alphas, "Significance level (repeatable)");
  eval_cmd->add_option("--out", eval.out, "Output directory");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic train/test pair");
  gen_cmd->add_option("--experiment", gen.experiment, "fig1, clairvoyant or banana");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--n-train", gen.n_train, "Training size for the clairvoyant setup");
  gen_cmd->add_option("--out", gen.out, "Output directory");

  ReproduceArgs rep;
  auto* rep_cmd = app.add_subcommand("reproduce", "Run an experiment recipe end to end");
  rep_cmd->add_option("experiment", rep.experiment, "fig1, clairvoyant, banana-sweep or realdata")->required();
  rep_cmd->add_option("--seed", rep.seed, "Random seed");
  rep_cmd->add_option("--out", rep.out, "Output directory");
  rep_cmd->add_option("--data-dir", rep.data_dir, "Directory holding external datasets and manifest.txt");
  rep_cmd->add_option("--manifest", rep.manifest, "Manifest file (default DATA_DIR/manifest.txt)");
  rep_cmd->add_option("--trials", rep.trials, "Trial count override");
  rep_cmd->add_option("--n-mc", rep.n_mc, "Monte-Carlo sample size for oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*score_cmd) return run_score(score);
    if (*eval_cmd) return run_evaluate(eval);
    if (*gen_cmd) return run_generate(gen);
    if (*rep_cmd) return run_reproduce(rep);
  } catch (const lpe::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}
