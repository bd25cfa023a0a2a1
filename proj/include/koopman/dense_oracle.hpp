// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_DENSE_ORACLE_HPP_
#define KOOPMAN_DENSE_ORACLE_HPP_

// Dense reference computations on a degree-truncated monomial basis. These
// solve the resolvent exactly (LU) instead of using the approximate hop
// weights, and are only practical for small truncations.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/sequence.hpp"

namespace koopman {

/// Matrix of L restricted to `basis`: entry (row s', col s) = [L]_{s's}.
inline Eigen::MatrixXd dense_generator(const AdjointOperator& op,
                                       const std::vector<MultiIndex>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) L(r, c) = op.matrix_element(basis[c], basis[r]);
  }
  return L;
}

/// Exact [(I - (T/M) L)^{-1}]^M restricted to `basis`, read at (s_f, s_i).
inline double dense_resolvent_element(const AdjointOperator& op,
                                      const std::vector<MultiIndex>& basis, const MultiIndex& s_i,
                                      const MultiIndex& s_f, double T, int M) {
  auto locate = [&](const MultiIndex& n) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i] == n) return static_cast<Eigen::Index>(i);
    }
    throw DimensionError("state " + to_string(n) + " is outside the truncated basis");
  };
  const Eigen::Index i = locate(s_i);
  const Eigen::Index f = locate(s_f);
  const Eigen::MatrixXd L = dense_generator(op, basis);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(L.rows(), L.cols()) - (T / M) * L;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd v = Eigen::VectorXd::Unit(L.rows(), i);
  for (int k = 0; k < M; ++k) v = lu.solve(v);
  return v(f);
}

inline Sequence dense_resolvent_sequence(const AdjointOperator& op,
                                         const std::vector<MultiIndex>& basis,
                                         const MultiIndex& s_i, const MultiIndex& s_f, double T,
                                         int m_min, int m_max) {
  Sequence out;
  for (int M = m_min + 1; M <= m_max; ++M) {
    out.push_back({M, dense_resolvent_element(op, basis, s_i, s_f, T, M)});
  }
  return out;
}

}  // namespace koopman

#endif  // KOOPMAN_DENSE_ORACLE_HPP_
