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
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "lpe/model_io.hpp"
#include "lpe/scoring.hpp"

namespace {

using lpe::Dataset;
using lpe::DistanceBackend;
using lpe::EpsMode;
using lpe::KnnMode;
using lpe::Mode;

Dataset line() { return Dataset::from_points({{0.1}, {0.2}, {0.9}}); }

std::vector<double> pt(double x) { return {x}; }

TEST(DefaultK, RoundedPowerRule) {
  EXPECT_EQ(lpe::default_k(200), 8u);
  EXPECT_EQ(lpe::default_k(400), 11u);
  EXPECT_EQ(lpe::default_k(2000), 21u);
  EXPECT_EQ(lpe::default_k(2), 1u);
  EXPECT_EQ(lpe::default_k(3), 2u);
}

TEST(Fit, DefaultsKFromSize) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(2);
  for (int i = 0; i < 200; ++i) d.push_back({u(rng), u(rng)});
  const auto m = lpe::fit(d, DistanceBackend::euclidean());
  EXPECT_TRUE(m.is_knn());
  EXPECT_EQ(m.k(), 8u);
}

TEST(Fit, StatsOnLine) {
  const auto m = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  const auto& r = m.knn_stats().radii;
  EXPECT_DOUBLE_EQ(r[0], 0.1);
  EXPECT_DOUBLE_EQ(r[1], 0.1);
  EXPECT_DOUBLE_EQ(r[2], 0.7);
}

TEST(Fit, RejectsBadInputs) {
  EXPECT_THROW(lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{3}}), lpe::ValidationError);
  EXPECT_THROW(lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{0}}), lpe::ValidationError);
  EXPECT_THROW(lpe::fit(line(), DistanceBackend::euclidean(), Mode{EpsMode{0.0}}), lpe::ValidationError);
  EXPECT_THROW(lpe::fit(Dataset::from_points({{1.0}}), DistanceBackend::euclidean()), lpe::ValidationError);
}

TEST(Fit, IdenticalPointsWarn) {
  const auto m = lpe::fit(Dataset::from_points({{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}}), DistanceBackend::euclidean(),
                          Mode{KnnMode{1}});
  ASSERT_EQ(m.warnings().size(), 1u);
  EXPECT_EQ(m.score(std::vector<double>{0.3, 0.3}), 1.0);
  EXPECT_EQ(m.score(std::vector<double>{0.3, 0.31}), 0.0);
}

TEST(ScoreKlpe, Examples) {
  const auto m = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  EXPECT_EQ(lpe::score_klpe(m, pt(0.5)), 1.0 / 3.0);
  EXPECT_EQ(lpe::score_klpe(m, pt(0.15)), 1.0);
  EXPECT_EQ(lpe::score_klpe(m, pt(100)), 0.0);
  EXPECT_EQ(m.score(pt(0.5)), 1.0 / 3.0);
  EXPECT_THROW(lpe::score_elpe(m, pt(0.5)), lpe::ValidationError);
  EXPECT_THROW(lpe::score_klpe(m, std::vector<double>{0.5, 0.5}), lpe::ValidationError);
}

TEST(ScoreElpe, Examples) {
  const auto m = lpe::fit(line(), DistanceBackend::euclidean(), Mode{EpsMode{0.15}});
  EXPECT_EQ(m.eps_stats().degrees, (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(lpe::score_elpe(m, pt(0.5)), 1.0 / 3.0);
  EXPECT_EQ(lpe::score_elpe(m, pt(0.15)), 1.0);
  EXPECT_EQ(lpe::score_elpe(m, pt(100)), 1.0 / 3.0);
}

TEST(ScoreF1, LinearWeightExamples) {
  const auto f1 = [](lpe::PointView x) { return x[0] + 1.0; };
  const auto mk = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  // Statistics: query 1/(0.3*1.5)=2.22; training 9.09, 8.33, 0.75. Only the
  // isolated point at 0.9 is less concentrated than the query.
  EXPECT_EQ(lpe::score_klpe_f1(mk, pt(0.5), f1), 1.0 / 3.0);
  EXPECT_EQ(lpe::score_klpe_f1(mk, pt(0.15), f1), 1.0);
  EXPECT_EQ(lpe::score_klpe_f1(mk, pt(100), f1), 0.0);
  const auto me = lpe::fit(line(), DistanceBackend::euclidean(), Mode{EpsMode{0.15}});
  // Statistics: query 0/1.5; training 1/1.1, 1/1.2, 0/1.9.
  EXPECT_EQ(lpe::score_elpe_f1(me, pt(0.5), f1), 1.0 / 3.0);
  const auto tiny = lpe::fit(line(), DistanceBackend::euclidean(), Mode{EpsMode{1e-6}});
  EXPECT_EQ(lpe::score_elpe_f1(tiny, pt(0.5), f1), 1.0);
}

TEST(ScoreF1, ConstantWeightReducesToPlainScore) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(2);
  for (int i = 0; i < 40; ++i) d.push_back({u(rng), u(rng)});
  const auto cube = lpe::DensitySpec::uniform_cube(2);
  const auto mk = lpe::fit(d, DistanceBackend::euclidean(), Mode{KnnMode{4}}, cube);
  const auto me = lpe::fit(d, DistanceBackend::euclidean(), Mode{EpsMode{0.2}}, cube);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> q{u(rng), u(rng)};
    EXPECT_EQ(lpe::score_klpe_f1(mk, q), lpe::score_klpe(mk, q));
    EXPECT_EQ(lpe::score_elpe_f1(me, q), lpe::score_elpe(me, q));
  }
}

TEST(ScoreF1, NonPositiveWeightIsAnError) {
  const auto mk = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  const auto vanishing = [](lpe::PointView x) { return x[0] > 0.4 ? 0.0 : 1.0; };
  EXPECT_THROW(lpe::score_klpe_f1(mk, pt(0.5), vanishing), lpe::ValidationError);
  EXPECT_THROW(lpe::score_klpe_f1(mk, pt(0.5)), lpe::ValidationError);  // no hint
  // Hint that vanishes at a training point fails at fit time.
  EXPECT_THROW(lpe::fit(Dataset::from_points({{0.5}, {2.0}}), DistanceBackend::euclidean(), Mode{KnnMode{1}},
                        lpe::DensitySpec::uniform_cube(1)),
               lpe::ValidationError);
}

TEST(ScoreSplit, Examples) {
  const auto m = lpe::SplitModel::fit(Dataset::from_points({{0.1}, {0.2}}), Dataset::from_points({{0.8}, {0.9}}),
                                      DistanceBackend::euclidean(), Mode{KnnMode{1}});
  EXPECT_EQ(lpe::score_split(m, pt(0.85)), 1.0);
  EXPECT_EQ(lpe::score_split(m, pt(100)), 0.0);
  EXPECT_EQ(lpe::score_split(m, pt(0.5)), 0.0);
  EXPECT_THROW(lpe::SplitModel::fit(Dataset::from_points({{0.1}, {0.2}}), Dataset::from_points({{0.8}, {0.9}}),
                                    DistanceBackend::euclidean(), Mode{KnnMode{2}}),
               lpe::ValidationError);
}

TEST(Decide, BoundaryIsInclusive) {
  EXPECT_EQ(lpe::decide(0.03, 0.05), lpe::Decision::anomaly);
  EXPECT_EQ(lpe::decide(0.05, 0.05), lpe::Decision::anomaly);
  EXPECT_EQ(lpe::decide(0.06, 0.05), lpe::Decision::nominal);
  EXPECT_EQ(lpe::decide(1.0, 1.0), lpe::Decision::anomaly);
  EXPECT_THROW(lpe::decide(0.5, 0.0), lpe::ValidationError);
  EXPECT_THROW(lpe::decide(0.5, 1.5), lpe::ValidationError);
  const auto m = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  const auto r = m.report(pt(0.5), 1.0 / 3.0);
  EXPECT_EQ(r.decision, lpe::Decision::anomaly);
  EXPECT_EQ(r.alpha, 1.0 / 3.0);
}

// Random instances against the double-loop reference.
TEST(ScoringProperty, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto f1 = [](lpe::PointView x) { return 0.5 + x[0]; };
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 7, d = 1 + rng() % 3;
    brute::Pts pts(n, std::vector<double>(d));
    for (auto& p : pts)
      for (auto& v : p) v = std::round(u(rng) * 8.0) / 8.0;  // coarse grid forces ties
    const Dataset data = Dataset::from_points(pts);
    std::vector<double> f1s;
    for (const auto& p : pts) f1s.push_back(0.5 + p[0]);
    const std::size_t k = 1 + rng() % (n - 1);
    const double eps = 0.05 + u(rng);
    const auto mk = lpe::fit(data, DistanceBackend::euclidean(), Mode{KnnMode{k}});
    const auto me = lpe::fit(data, DistanceBackend::euclidean(), Mode{EpsMode{eps}});
    for (int qi = 0; qi < 5; ++qi) {
      std::vector<double> q(d);
      for (auto& v : q) v = std::round(u(rng) * 8.0) / 8.0;
      EXPECT_EQ(lpe::score_klpe(mk, q), brute::klpe(pts, q, k));
      EXPECT_EQ(lpe::score_elpe(me, q), brute::elpe(pts, q, eps));
      EXPECT_EQ(lpe::score_klpe_f1(mk, q, f1), brute::klpe_f1(pts, f1s, q, 0.5 + q[0], k));
      EXPECT_EQ(lpe::score_elpe_f1(me, q, f1), brute::elpe_f1(pts, f1s, q, 0.5 + q[0], eps));
    }
  }
}

TEST(ScoringProperty, SplitMatchesBruteForce) {
  std::mt19937_64 rng(98);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n1 = 2 + rng() % 5, n2 = 1 + rng() % 5, d = 1 + rng() % 3;
    brute::Pts a(n1, std::vector<double>(d)), b(n2, std::vector<double>(d));
    for (auto* s : {&a, &b})
      for (auto& p : *s)
        for (auto& v : p) v = u(rng);
    const std::size_t k = 1 + rng() % std::min(n1 - 1, n2);
    const double eps = 0.05 + u(rng);
    const auto mk = lpe::SplitModel::fit(Dataset::from_points(a), Dataset::from_points(b),
                                         DistanceBackend::euclidean(), Mode{KnnMode{k}});
    const auto me = lpe::SplitModel::fit(Dataset::from_points(a), Dataset::from_points(b),
                                         DistanceBackend::euclidean(), Mode{EpsMode{eps}});
    std::vector<double> q(d);
    for (auto& v : q) v = u(rng);
    EXPECT_EQ(lpe::score_split(mk, q), brute::split_knn(a, b, q, k));
    EXPECT_EQ(lpe::score_split(me, q), brute::split_eps(a, b, q, eps));
  }
}

TEST(ScoringProperty, ScoresLieOnLattice) {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(2);
  for (int i = 0; i < 37; ++i) d.push_back({u(rng), u(rng)});
  const auto m = lpe::fit(d, DistanceBackend::euclidean(), Mode{KnnMode{5}});
  for (int i = 0; i < 200; ++i) {
    const double s = m.score(std::vector<double>{u(rng) * 1.4 - 0.2, u(rng) * 1.4 - 0.2});
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s, std::round(s * 37.0) / 37.0);
  }
}

TEST(ScoringProperty, DenserQueryNeverScoresLower) {
  std::mt19937_64 rng(96);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(2);
  for (int i = 0; i < 50; ++i) d.push_back({u(rng), u(rng)});
  const auto m = lpe::fit(d, DistanceBackend::euclidean(), Mode{KnnMode{3}});
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double ra = lpe::query_radius(m.query_distances(a), 3);
    const double rb = lpe::query_radius(m.query_distances(b), 3);
    if (ra <= rb) EXPECT_GE(m.score(a), m.score(b));
    else EXPECT_LE(m.score(a), m.score(b));
  }
}

TEST(ScoringProperty, HeldOutPointMatchesLeaveOneOutRank) {
  std::mt19937_64 rng(95);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  brute::Pts pts(20, std::vector<double>(2));
  for (auto& p : pts) p = {u(rng), u(rng)};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    brute::Pts rest;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != j) rest.push_back(pts[i]);
    const auto m = lpe::fit(Dataset::from_points(rest), DistanceBackend::euclidean(), Mode{KnnMode{3}});
    // Rank of R(x_j) among the radii of the remaining points.
    const double rj = brute::radius(rest, pts[j], 3);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (rj <= brute::radius(rest, rest[i], 3, i)) ++rank;
    EXPECT_EQ(m.score(pts[j]), static_cast<double>(rank) / static_cast<double>(rest.size()));
  }
}

TEST(ScoringProperty, ConcurrentScoringMatchesSequential) {
  std::mt19937_64 rng(94);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(3), queries(3);
  for (int i = 0; i < 60; ++i) d.push_back({u(rng), u(rng), u(rng)});
  for (int i = 0; i < 400; ++i) queries.push_back({u(rng), u(rng), u(rng)});
  const auto m = lpe::fit(d, DistanceBackend::geodesic(10), Mode{KnnMode{4}});
  std::vector<double> seq(queries.size()), par(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) seq[i] = m.score(queries[i]);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < queries.size(); i += 4) par[i] = m.score(queries[i]);
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(seq, par);
}

TEST(ModelIo, RoundTripIsExact) {
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(3);
  for (int i = 0; i < 30; ++i) d.push_back({u(rng), u(rng), u(rng)});
  for (const auto& [backend, mode] : std::vector<std::pair<DistanceBackend, Mode>>{
           {DistanceBackend::euclidean(), KnnMode{4}},
           {DistanceBackend::weighted({1.0, 0.5, 2.0}), EpsMode{0.3}},
           {DistanceBackend::geodesic(8), KnnMode{3}}}) {
    const auto m = lpe::fit(d, backend, mode);
    std::stringstream ss;
    lpe::write_model(ss, m);
    const std::string first = ss.str();
    const auto back = lpe::read_model(ss);
    std::stringstream again;
    lpe::write_model(again, back);
    EXPECT_EQ(first, again.str());
    EXPECT_EQ(back.training(), m.training());
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> q{u(rng), u(rng), u(rng)};
      EXPECT_EQ(back.score(q), m.score(q));
    }
  }
}

TEST(ModelIo, RejectsTamperedStats) {
  const auto m = lpe::fit(line(), DistanceBackend::euclidean(), Mode{KnnMode{1}});
  std::stringstream ss;
  lpe::write_model(ss, m);
  std::string text = ss.str();
  const auto pos = text.find("stats\n");
  text.replace(pos + 6, 1, "9");
  std::istringstream in(text);
  EXPECT_THROW(lpe::read_model(in), lpe::ValidationError);
  std::istringstream junk("not a model\n");
  EXPECT_THROW(lpe::read_model(junk), lpe::ValidationError);
}

}  // namespace
