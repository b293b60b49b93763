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

#ifndef LPE_DENSITY_HPP_
#define LPE_DENSITY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lpe/dataset.hpp"
#include "lpe/error.hpp"

namespace lpe {

using Rng = std::mt19937_64;

/// Deterministic generator for substream `stream` of a run seeded with `seed`.
/// Distinct streams are decorrelated through std::seed_seq.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Analytic density used by the generators and the p-value oracle:
/// an axis-aligned uniform box, a Gaussian, or a finite mixture of those.
class DensitySpec {
 public:
  struct UniformBox {
    std::vector<double> lo;
    std::vector<double> hi;
    double log_density;
  };
  struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd chol;  // lower factor, cov = chol * chol^T
    double log_norm;
  };
  struct Mixture {
    std::vector<double> weights;
    std::vector<DensitySpec> components;
  };

  DensitySpec() = default;

  static DensitySpec uniform_cube(std::size_t d) {
    return uniform_box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
  }

  static DensitySpec uniform_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size()) throw ValidationError("uniform box bounds must share a nonzero dimension");
    double log_volume = 0.0;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (!(hi[j] > lo[j]) || !std::isfinite(lo[j]) || !std::isfinite(hi[j])) {
        throw ValidationError("uniform box needs finite lo < hi in every coordinate");
      }
      log_volume += std::log(hi[j] - lo[j]);
    }
    return DensitySpec(UniformBox{std::move(lo), std::move(hi), -log_volume});
  }

  static DensitySpec gaussian(std::vector<double> mean, const std::vector<std::vector<double>>& cov) {
    const std::size_t d = mean.size();
    if (d == 0 || cov.size() != d) throw ValidationError("gaussian covariance must be d x d with d = mean size");
    Gaussian g;
    g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(d));
    g.cov.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      if (cov[i].size() != d) throw ValidationError("gaussian covariance must be square");
      for (std::size_t j = 0; j < d; ++j) g.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i][j];
    }
    if ((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw ValidationError("gaussian covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
    if (llt.info() != Eigen::Success) throw ValidationError("gaussian covariance must be positive definite");
    g.chol = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < g.chol.rows(); ++i) {
      const double diag = g.chol(i, i);
      if (!(diag > 0.0)) throw ValidationError("gaussian covariance must be positive definite");
      log_det += 2.0 * std::log(diag);
    }
    g.log_norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
    return DensitySpec(std::move(g));
  }

  /// Gaussian with a diagonal covariance.
  static DensitySpec gaussian_diag(std::vector<double> mean, const std::vector<double>& variances) {
    std::vector<std::vector<double>> cov(variances.size(), std::vector<double>(variances.size(), 0.0));
    for (std::size_t i = 0; i < variances.size(); ++i) cov[i][i] = variances[i];
    return gaussian(std::move(mean), cov);
  }

  static DensitySpec mixture(std::vector<double> weights, std::vector<DensitySpec> components) {
    if (weights.empty() || weights.size() != components.size()) {
      throw ValidationError("mixture needs one weight per component and at least one component");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw ValidationError("mixture weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mixture weights must sum to 1");
    const std::size_t d = components.front().dim();
    for (const auto& c : components) {
      if (c.dim() != d) throw ValidationError("mixture components must share a dimension");
    }
    return DensitySpec(Mixture{std::move(weights), std::move(components)});
  }

  std::size_t dim() const {
    return std::visit(
        [](const auto& k) -> std::size_t {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformBox>) return k.lo.size();
          else if constexpr (std::is_same_v<T, Gaussian>) return static_cast<std::size_t>(k.mean.size());
          else if constexpr (std::is_same_v<T, Mixture>) return k.components.front().dim();
          else return 0;
        },
        kind_);
  }

  bool valid() const { return !std::holds_alternative<std::monostate>(kind_); }

  /// Natural log of the density; -inf outside the support.
  double log_pdf(PointView x) const {
    require_dim(x, dim());
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformBox>) {
            for (std::size_t j = 0; j < x.size(); ++j) {
              if (x[j] < k.lo[j] || x[j] > k.hi[j]) return -std::numeric_limits<double>::infinity();
            }
            return k.log_density;
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), k.mean.size()) - k.mean;
            k.chol.template triangularView<Eigen::Lower>().solveInPlace(diff);
            return k.log_norm - 0.5 * diff.squaredNorm();
          } else if constexpr (std::is_same_v<T, Mixture>) {
            // log-sum-exp over components
            std::vector<double> terms;
            terms.reserve(k.components.size());
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k.components.size(); ++c) {
              if (k.weights[c] == 0.0) continue;
              const double t = std::log(k.weights[c]) + k.components[c].log_pdf(x);
              terms.push_back(t);
              top = std::max(top, t);
            }
            if (!std::isfinite(top)) return top;
            double sum = 0.0;
            for (double t : terms) sum += std::exp(t - top);
            return top + std::log(sum);
          } else {
            throw ValidationError("density is not initialised");
          }
        },
        kind_);
  }

  double pdf(PointView x) const { return std::exp(log_pdf(x)); }

  /// Draws one point into `out` (size dim()).
  void sample(Rng& rng, std::span<double> out) const {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformBox>) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = k.lo[j] + (k.hi[j] - k.lo[j]) * unif(rng);
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            std::normal_distribution<double> normal(0.0, 1.0);
            Eigen::VectorXd z(k.mean.size());
            for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
            const Eigen::VectorXd x = k.mean + k.chol * z;
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = x(static_cast<Eigen::Index>(j));
          } else if constexpr (std::is_same_v<T, Mixture>) {
            std::discrete_distribution<std::size_t> pick(k.weights.begin(), k.weights.end());
            k.components[pick(rng)].sample(rng, out);
          } else {
            throw ValidationError("density is not initialised");
          }
        },
        kind_);
  }

  Point sample(Rng& rng) const {
    Point p(dim());
    sample(rng, p);
    return p;
  }

  Dataset sample(Rng& rng, std::size_t count) const {
    Dataset out(dim());
    out.reserve(count);
    Point p(dim());
    for (std::size_t i = 0; i < count; ++i) {
      sample(rng, p);
      out.push_back(p);
    }
    return out;
  }

  const UniformBox* as_uniform() const { return std::get_if<UniformBox>(&kind_); }
  const Gaussian* as_gaussian() const { return std::get_if<Gaussian>(&kind_); }
  const Mixture* as_mixture() const { return std::get_if<Mixture>(&kind_); }

 private:
  template <class K>
  explicit DensitySpec(K kind) : kind_(std::move(kind)) {}

  std::variant<std::monostate, UniformBox, Gaussian, Mixture> kind_;
};

}  // namespace lpe

#endif  // LPE_DENSITY_HPP_
