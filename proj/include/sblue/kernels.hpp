/*
 * Copyright 2026 the sblue authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sblue {

/// A point in the 2-D deployment region.
struct Location {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline double squared_distance(const Location& a, const Location& b) {
  const double d1 = a.x1 - b.x1;
  const double d2 = a.x2 - b.x2;
  return d1 * d1 + d2 * d2;
}

/// Squared-exponential kernel hyperparameters. `theta` is the signal
/// variance, so k(x, x) = theta. `jitter` is the base regularizer of the
/// Cholesky ladder, expressed relative to theta.
struct KernelConfig {
  double length_scale = 1.0;
  double theta = 1.0;
  double jitter = 1e-10;

  KernelConfig() = default;
  KernelConfig(double length_scale_, double theta_, double jitter_ = 1e-10)
      : length_scale(length_scale_), theta(theta_), jitter(jitter_) {
    validate();
  }

  void validate() const {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
      throw std::invalid_argument("KernelConfig: length_scale must be positive");
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("KernelConfig: theta must be positive");
    if (!(jitter >= 0.0) || !std::isfinite(jitter))
      throw std::invalid_argument("KernelConfig: jitter must be non-negative");
  }

  double max_jitter() const { return 1e-4 * theta; }
  double base_jitter() const { return jitter * theta; }
};

/// k(a, b) = theta * exp(-||a - b||^2 / (2 l^2)).
inline double sq_exp_kernel(const Location& a, const Location& b, const KernelConfig& cfg) {
  const double l = cfg.length_scale;
  return cfg.theta * std::exp(-squared_distance(a, b) / (2.0 * l * l));
}

/// Symmetric PSD mixing matrix B of cross-process scales. Entry (m, n)
/// multiplies the shared spatial kernel between modalities m and n.
struct Coregionalization {
  Eigen::MatrixXd B;

  explicit Coregionalization(Eigen::MatrixXd b) : B(std::move(b)) { validate(); }

  static Coregionalization identity(int m) {
    return Coregionalization(Eigen::MatrixXd::Identity(m, m));
  }

  int modality_count() const { return static_cast<int>(B.rows()); }

  void validate() const {
    if (B.rows() == 0 || B.rows() != B.cols())
      throw std::invalid_argument("Coregionalization: B must be square and non-empty");
    const double scale = B.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale))
      throw std::invalid_argument("Coregionalization: B must be finite");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument("Coregionalization: B must be symmetric");
    for (int i = 0; i < B.rows(); ++i)
      if (!(B(i, i) > 0.0))
        throw std::invalid_argument("Coregionalization: diagonal entries must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw std::invalid_argument("Coregionalization: B must be positive semi-definite");
  }
};

/// Joint covariance over a list of (location, modality) sites,
/// entry (i, j) = B(m_i, m_j) * k(x_i, x_j).
struct JointCovariance {
  Eigen::MatrixXd matrix;
  std::vector<Location> locations;
  std::vector<int> modalities;
};

inline JointCovariance build_joint_cov(const std::vector<Location>& locations,
                                       const std::vector<int>& modalities,
                                       const Coregionalization& coreg,
                                       const KernelConfig& cfg) {
  cfg.validate();
  const auto n = locations.size();
  if (n == 0) throw std::invalid_argument("build_joint_cov: need at least one location");
  if (modalities.size() != n)
    throw std::invalid_argument("build_joint_cov: locations/modalities size mismatch");
  const int m = coreg.modality_count();
  for (int mod : modalities)
    if (mod < 0 || mod >= m)
      throw std::invalid_argument("build_joint_cov: modality label outside B's dimension");

  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v =
          coreg.B(modalities[i], modalities[j]) * sq_exp_kernel(locations[i], locations[j], cfg);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return JointCovariance{std::move(k), locations, modalities};
}

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double epsilon = 0.0;  // the regularizer that was actually added to the diagonal
};

/// Cholesky of K + eps*I for the smallest eps in {0, base, 10*base, ...}
/// not exceeding max_jitter that factorizes.
inline CholeskyFactor cholesky_psd(const Eigen::MatrixXd& k, double base_jitter,
                                   double max_jitter) {
  if (k.rows() != k.cols() || k.rows() == 0)
    throw std::invalid_argument("cholesky_psd: matrix must be square and non-empty");
  const double scale = k.cwiseAbs().maxCoeff();
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("cholesky_psd: matrix must be symmetric");
  if (base_jitter < 0.0 || max_jitter < 0.0)
    throw std::invalid_argument("cholesky_psd: jitter bounds must be non-negative");

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k.rows(), k.cols());
  double eps = 0.0;
  while (true) {
    Eigen::LLT<Eigen::MatrixXd> llt(eps == 0.0 ? k : Eigen::MatrixXd(k + eps * eye));
    if (llt.info() == Eigen::Success) return CholeskyFactor{llt.matrixL(), eps};
    if (eps == 0.0) {
      if (base_jitter == 0.0) break;
      eps = base_jitter;
    } else {
      eps *= 10.0;
    }
    if (eps > max_jitter) break;
  }
  throw std::runtime_error("cholesky_psd: matrix remains indefinite at the maximum jitter");
}

inline CholeskyFactor cholesky_psd(const JointCovariance& k, const KernelConfig& cfg) {
  return cholesky_psd(k.matrix, cfg.base_jitter(), cfg.max_jitter());
}

}  // namespace sblue
