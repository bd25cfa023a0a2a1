// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_EDMD_HPP_
#define KOOPMAN_EDMD_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "koopman/errors.hpp"
#include "koopman/koopman_matrix.hpp"

namespace koopman {

/// Snapshot pairs (x_k, y_k), y_k observed T time units after x_k.
/// Stored column-wise: xs.col(k), ys.col(k).
struct SnapshotSet {
  Eigen::MatrixXd xs;
  Eigen::MatrixXd ys;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string model;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(xs.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(xs.cols()); }
};

struct MomentMatrices {
  Eigen::MatrixXd A;  ///< (1/N) sum psi(y) psi(x)^T
  Eigen::MatrixXd G;  ///< (1/N) sum psi(x) psi(x)^T
  std::size_t n_data = 0;
};

namespace detail {

inline void check_snapshots(const SnapshotSet& s, const Dictionary& dict) {
  if (s.size() == 0) throw ParameterError("snapshot set is empty");
  if (s.ys.rows() != s.xs.rows() || s.ys.cols() != s.xs.cols()) {
    throw DimensionError("snapshot x and y blocks differ in shape");
  }
  if (s.dimension() != dict.dimension()) {
    throw DimensionError("snapshot dimension " + std::to_string(s.dimension()) +
                         " does not match dictionary dimension " +
                         std::to_string(dict.dimension()));
  }
}

// Pairwise (cascade) summation of psi(y) psi(x)^T and psi(x) psi(x)^T over [lo, hi).
inline void accumulate_moments(const SnapshotSet& s, const Dictionary& dict, Eigen::Index lo,
                               Eigen::Index hi, Eigen::MatrixXd& A, Eigen::MatrixXd& G) {
  constexpr Eigen::Index kLeaf = 32;
  if (hi - lo <= kLeaf) {
    for (Eigen::Index k = lo; k < hi; ++k) {
      const Eigen::VectorXd px = dict.evaluate({s.xs.col(k).data(), s.dimension()});
      const Eigen::VectorXd py = dict.evaluate({s.ys.col(k).data(), s.dimension()});
      A.noalias() += py * px.transpose();
      G.noalias() += px * px.transpose();
    }
    return;
  }
  const Eigen::Index mid = lo + (hi - lo) / 2;
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  Eigen::MatrixXd G2 = Eigen::MatrixXd::Zero(G.rows(), G.cols());
  accumulate_moments(s, dict, lo, mid, A, G);
  accumulate_moments(s, dict, mid, hi, A2, G2);
  A += A2;
  G += G2;
}

}  // namespace detail

inline MomentMatrices build_moments(const SnapshotSet& snapshots, const Dictionary& dict) {
  detail::check_snapshots(snapshots, dict);
  const auto n = static_cast<Eigen::Index>(dict.size());
  MomentMatrices mm{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), snapshots.size()};
  detail::accumulate_moments(snapshots, dict, 0, static_cast<Eigen::Index>(snapshots.size()),
                             mm.A, mm.G);
  const double inv = 1.0 / static_cast<double>(snapshots.size());
  mm.A *= inv;
  mm.G *= inv;
  return mm;
}

/// Moore-Penrose pseudo-inverse, discarding singular values below rel_tol * sigma_max.
inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) throw DegenerateGram("Gram matrix is zero");
  const double cutoff = rel_tol * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline constexpr double kDefaultSvdTolerance = 1e-10;

/// K~ = A G^+, so that psi(y) ~ K~ psi(x) in the least-squares sense.
inline KoopmanMatrix estimate_koopman(const MomentMatrices& mm, const Dictionary& dict, double T,
                                      double svd_tol = kDefaultSvdTolerance) {
  return {dict, T, mm.A * pseudo_inverse(mm.G, svd_tol)};
}

inline KoopmanMatrix estimate_koopman(const SnapshotSet& snapshots, const Dictionary& dict,
                                      double svd_tol = kDefaultSvdTolerance) {
  return estimate_koopman(build_moments(snapshots, dict), dict, snapshots.T, svd_tol);
}

/// J(K) = sum_k || psi(y_k) - K~ psi(x_k) ||^2
inline double residual(const SnapshotSet& snapshots, const Dictionary& dict,
                       const KoopmanMatrix& km) {
  detail::check_snapshots(snapshots, dict);
  if (km.entries.rows() != static_cast<Eigen::Index>(dict.size()) ||
      km.entries.cols() != static_cast<Eigen::Index>(dict.size())) {
    throw DimensionError("Koopman matrix does not match the dictionary size");
  }
  double j = 0.0;
  for (Eigen::Index k = 0; k < snapshots.xs.cols(); ++k) {
    const Eigen::VectorXd px = dict.evaluate({snapshots.xs.col(k).data(), snapshots.dimension()});
    const Eigen::VectorXd py = dict.evaluate({snapshots.ys.col(k).data(), snapshots.dimension()});
    j += (py - km.entries * px).squaredNorm();
  }
  return j;
}

}  // namespace koopman

#endif  // KOOPMAN_EDMD_HPP_
