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

// Reference implementations for tests. These work on raw coordinate vectors
// and enumerate every indicator term with plain loops; they share no code
// with the library beyond the caller-supplied f1 values.

#ifndef LPE_TESTS_BRUTE_FORCE_HPP_
#define LPE_TESTS_BRUTE_FORCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace brute {

using Pts = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// k-th smallest distance from x to the points of s, skipping index `skip`.
inline double radius(const Pts& s, const std::vector<double>& x, std::size_t k, std::size_t skip = SIZE_MAX) {
  std::vector<double> d;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j != skip) d.push_back(dist(x, s[j]));
  }
  std::sort(d.begin(), d.end());
  return d[k - 1];
}

inline std::size_t degree(const Pts& s, const std::vector<double>& x, double eps, std::size_t skip = SIZE_MAX) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j != skip && dist(x, s[j]) <= eps) ++c;
  }
  return c;
}

inline double klpe(const Pts& s, const std::vector<double>& q, std::size_t k) {
  const double rq = radius(s, q, k);
  std::size_t c = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (rq <= radius(s, s[i], k, i)) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s.size());
}

inline double elpe(const Pts& s, const std::vector<double>& q, double eps) {
  const std::size_t nq = degree(s, q, eps);
  std::size_t c = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (nq >= degree(s, s[i], eps, i)) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s.size());
}

// f1s[i] is f1 at s[i]; f1q is f1 at q.
inline double klpe_f1(const Pts& s, const std::vector<double>& f1s, const std::vector<double>& q, double f1q,
                      std::size_t k) {
  const double tq = 1.0 / (radius(s, q, k) * f1q);
  std::size_t c = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (tq >= 1.0 / (radius(s, s[i], k, i) * f1s[i])) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s.size());
}

inline double elpe_f1(const Pts& s, const std::vector<double>& f1s, const std::vector<double>& q, double f1q,
                      double eps) {
  const double tq = static_cast<double>(degree(s, q, eps)) / f1q;
  std::size_t c = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (tq >= static_cast<double>(degree(s, s[i], eps, i)) / f1s[i]) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s.size());
}

inline double split_knn(const Pts& s1, const Pts& s2, const std::vector<double>& q, std::size_t k) {
  const double rq = radius(s2, q, k);
  std::size_t c = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (rq <= radius(s1, s1[i], k, i)) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s1.size());
}

inline double split_eps(const Pts& s1, const Pts& s2, const std::vector<double>& q, double eps) {
  const std::size_t nq = degree(s2, q, eps);
  std::size_t c = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (nq >= degree(s1, s1[i], eps, i)) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(s1.size());
}

// Mann-Whitney AUC with half credit for ties; anomalies should score lower.
inline double mann_whitney(const std::vector<double>& nominal, const std::vector<double>& anomaly) {
  double wins = 0.0;
  for (double a : anomaly) {
    for (double b : nominal) {
      if (a < b)
        wins += 1.0;
      else if (a == b)
        wins += 0.5;
    }
  }
  return wins / (static_cast<double>(nominal.size()) * static_cast<double>(anomaly.size()));
}

// Floyd-Warshall over an explicit edge list; used to check shortest paths.
inline std::vector<std::vector<double>> floyd(std::size_t n,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                              const Pts& pts) {
  const double inf = HUGE_VAL;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (auto [a, b] : edges) {
    const double w = dist(pts[a], pts[b]);
    d[a][b] = std::min(d[a][b], w);
    d[b][a] = std::min(d[b][a], w);
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
  return d;
}

}  // namespace brute

#endif  // LPE_TESTS_BRUTE_FORCE_HPP_
