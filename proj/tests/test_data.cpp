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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lpe/data.hpp"
#include "lpe/experiments.hpp"

namespace {

using lpe::Dataset;

TEST(Normalize, Examples) {
  const auto [scaled, rec] = lpe::normalize_unit_cube(Dataset::from_points({{2, 3}, {4, 3}, {6, 3}}));
  EXPECT_EQ(scaled[0][0], 0.0);
  EXPECT_EQ(scaled[1][0], 0.5);
  EXPECT_EQ(scaled[2][0], 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(scaled[i][1], 0.5);
  ASSERT_TRUE(scaled.normalization.has_value());

  std::size_t flagged = 0;
  const auto test = lpe::apply_normalization(rec, Dataset::from_points({{8, 3}}), &flagged);
  EXPECT_EQ(test[0][0], 1.5);
  EXPECT_EQ(flagged, 1u);
  EXPECT_THROW(lpe::apply_normalization(rec, Dataset::from_points({{1.0}})), lpe::ValidationError);
}

TEST(Normalize, TrainingSetLandsInCubeAndRecordReproducesIt) {
  lpe::Rng rng = lpe::make_rng(3);
  const auto raw = lpe::presets::clairvoyant_nominal().sample(rng, 500);
  const auto [scaled, rec] = lpe::normalize_unit_cube(raw);
  const auto again = lpe::apply_normalization(rec, raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_GE(scaled[i][j], 0.0);
      EXPECT_LE(scaled[i][j], 1.0);
      EXPECT_NEAR(again[i][j], scaled[i][j], 1e-12);
      EXPECT_NEAR(rec.min[j] + scaled[i][j] * (rec.max[j] - rec.min[j]), raw[i][j], 1e-12);
    }
  }
}

TEST(Csv, ReadsLabelsAndShape) {
  std::istringstream in("0.1,0.2,1\n0.3,0.4,1\n0.5,0.6,-1\n");
  lpe::CsvOptions opt;
  opt.label_column = "2";
  const auto d = lpe::read_csv(in, opt);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.labels(), (std::vector<int>{1, 1, -1}));
}

TEST(Csv, RaggedRowNamesTheLine) {
  std::istringstream in("1,2\n3,4\n5\n");
  try {
    lpe::read_csv(in);
    FAIL();
  } catch (const lpe::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, NonNumericCellNamesRowAndColumn) {
  std::istringstream in("a,b\n1,2\n3,x\n");
  lpe::CsvOptions opt;
  opt.header = true;
  try {
    lpe::read_csv(in, opt);
    FAIL();
  } catch (const lpe::ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(Csv, LabelMapping) {
  lpe::CsvOptions opt;
  opt.header = true;
  opt.label_column = "digit";
  opt.nominal_label = "0";
  std::istringstream in("digit,a,b\n0,1,2\n3,1,2\n7,1,2\n0,5,5\n");
  const auto d = lpe::read_csv(in, opt);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.labels(), (std::vector<int>{1, -1, -1, 1}));
  EXPECT_EQ(d[3][0], 5.0);

  lpe::CsvOptions strict;
  strict.label_column = "0";
  std::istringstream bad("2,1.0\n");
  EXPECT_THROW(lpe::read_csv(bad, strict), lpe::ValidationError);
  std::istringstream empty("");
  EXPECT_THROW(lpe::read_csv(empty), lpe::ValidationError);
}

TEST(Csv, RoundTripIsExact) {
  const auto data = lpe::generate(lpe::presets::fig1(4)).test;
  for (bool header : {false, true}) {
    std::stringstream ss;
    lpe::write_csv(ss, data, header);
    lpe::CsvOptions opt;
    opt.header = header;
    opt.label_column = header ? "label" : "2";
    const auto back = lpe::read_csv(ss, opt);
    EXPECT_EQ(back.coords(), data.coords());
    EXPECT_EQ(back.labels(), data.labels());
  }
}

TEST(SplitTrain, SizesAndDeterminism) {
  Dataset ten(1), eleven(1);
  for (int i = 0; i < 11; ++i) {
    if (i < 10) ten.push_back({static_cast<double>(i)});
    eleven.push_back({static_cast<double>(i)});
  }
  const auto a = lpe::split_train(ten, 1);
  EXPECT_EQ(a.s1.size(), 5u);
  EXPECT_EQ(a.s2.size(), 5u);
  const auto b = lpe::split_train(eleven, 1);
  EXPECT_EQ(b.s1.size(), 6u);
  EXPECT_EQ(b.s2.size(), 5u);
  const auto c = lpe::split_train(eleven, 1);
  EXPECT_EQ(b.s1, c.s1);
  EXPECT_EQ(b.s2, c.s2);
  // Disjoint blocks covering the data.
  std::vector<double> all(b.s1.coords());
  all.insert(all.end(), b.s2.coords().begin(), b.s2.coords().end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, eleven.coords());
  EXPECT_THROW(lpe::split_train(Dataset::from_points({{1}, {2}, {3}}), 1), lpe::ValidationError);
}

TEST(Generate, DeterministicPerSeed) {
  const auto a = lpe::generate(lpe::presets::fig1(11));
  const auto b = lpe::generate(lpe::presets::fig1(11));
  const auto c = lpe::generate(lpe::presets::fig1(12));
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
  EXPECT_EQ(a.train.size(), 200u);
  EXPECT_EQ(a.test.size(), 150u);
  EXPECT_EQ(a.test.label(0), lpe::kNominal);
  EXPECT_EQ(a.test.label(149), lpe::kAnomaly);
}

// Sample mean and covariance of 1e5 draws within 3 standard errors.
void check_moments(const lpe::DensitySpec& g, std::uint64_t seed) {
  const auto* gauss = g.as_gaussian();
  ASSERT_NE(gauss, nullptr);
  lpe::Rng rng = lpe::make_rng(seed);
  const std::size_t n = 100000, d = g.dim();
  const auto x = g.sample(rng, n);
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[i][j] / static_cast<double>(n);
  for (std::size_t a = 0; a < d; ++a) {
    const double se = std::sqrt(gauss->cov(a, a) / static_cast<double>(n));
    EXPECT_LE(std::abs(mean[a] - gauss->mean(a)), 3.0 * se);
    for (std::size_t b = 0; b < d; ++b) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += (x[i][a] - mean[a]) * (x[i][b] - mean[b]);
      c /= static_cast<double>(n - 1);
      const double se_c =
          std::sqrt((gauss->cov(a, a) * gauss->cov(b, b) + gauss->cov(a, b) * gauss->cov(a, b)) / static_cast<double>(n));
      EXPECT_LE(std::abs(c - gauss->cov(a, b)), 3.0 * se_c) << a << "," << b;
    }
  }
}

TEST(Generate, GaussianComponentMoments) {
  std::uint64_t seed = 100;
  for (const auto& mix : {lpe::presets::fig1_nominal(), lpe::presets::clairvoyant_nominal()}) {
    for (const auto& comp : mix.as_mixture()->components) check_moments(comp, seed++);
  }
  check_moments(lpe::presets::clairvoyant_anomaly(), seed);
}

TEST(Generate, UniformBoxMoments) {
  lpe::Rng rng = lpe::make_rng(5);
  const auto box = lpe::DensitySpec::uniform_box({-1.0, 2.0}, {1.0, 6.0});
  const auto x = box.sample(rng, 100000);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m0 += x[i][0] / 1e5;
    m1 += x[i][1] / 1e5;
  }
  EXPECT_LE(std::abs(m0 - 0.0), 3.0 * std::sqrt(4.0 / 12.0 / 1e5));
  EXPECT_LE(std::abs(m1 - 4.0), 3.0 * std::sqrt(16.0 / 12.0 / 1e5));
}

TEST(Manifest, ParsesSections) {
  std::istringstream in(
      "# datasets\n[wine]\nfile = wine.csv  # relative\nk=9\nalpha = 0.05 0.1\n\n[usps]\nmetric = geodesic\n");
  const auto m = lpe::Manifest::parse(in);
  ASSERT_EQ(m.sections().size(), 2u);
  const auto* wine = m.find("wine");
  ASSERT_NE(wine, nullptr);
  EXPECT_EQ(wine->get("file"), "wine.csv");
  EXPECT_EQ(wine->get_count("k"), 9u);
  EXPECT_EQ(wine->get("alpha"), "0.05 0.1");
  EXPECT_THROW(wine->get("missing"), lpe::ValidationError);
  EXPECT_EQ(m.find("usps")->get("metric"), "geodesic");
  EXPECT_EQ(m.find("banana"), nullptr);
  std::istringstream bad("[x\n");
  EXPECT_THROW(lpe::Manifest::parse(bad), lpe::ValidationError);
}

TEST(ProtocolSplit, CountsAndLabels) {
  Dataset all(1);
  for (int i = 0; i < 30; ++i) all.push_back({static_cast<double>(i)}, i < 20 ? lpe::kNominal : lpe::kAnomaly);
  const auto g = lpe::protocol_split(all, 12, 5, 7, 1);
  EXPECT_EQ(g.train.size(), 12u);
  EXPECT_FALSE(g.train.has_labels());
  EXPECT_EQ(g.test.size(), 12u);
  for (std::size_t i = 0; i < g.train.size(); ++i) EXPECT_LT(g.train[i][0], 20.0);
  EXPECT_THROW(lpe::protocol_split(all, 20, 5, 5, 1), lpe::ValidationError);
}

}  // namespace
