// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_KOOPMAN_MATRIX_HPP_
#define KOOPMAN_KOOPMAN_MATRIX_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/extrapolation.hpp"
#include "koopman/generator.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/parallel.hpp"
#include "koopman/resolvent.hpp"

namespace koopman {

/// Monomial dictionary psi_s(x) = x^{alpha_s} for all |alpha_s| <= max_degree.
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::size_t dimension, unsigned max_degree)
      : dim_(dimension), max_degree_(max_degree), entries_(monomials_up_to(dimension, max_degree)) {}

  std::size_t dimension() const noexcept { return dim_; }
  unsigned max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<MultiIndex>& entries() const noexcept { return entries_; }
  const MultiIndex& operator[](std::size_t i) const { return entries_[i]; }

  std::optional<std::size_t> index_of(const MultiIndex& a) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i] == a) return i;
    }
    return std::nullopt;
  }

  /// psi(x) with powers built incrementally per coordinate.
  Eigen::VectorXd evaluate(std::span<const double> x) const {
    if (x.size() != dim_) {
      throw DimensionError("point has dimension " + std::to_string(x.size()) +
                           ", dictionary has " + std::to_string(dim_));
    }
    std::vector<std::vector<double>> pw(dim_, std::vector<double>(max_degree_ + 1, 1.0));
    for (std::size_t d = 0; d < dim_; ++d) {
      for (unsigned e = 1; e <= max_degree_; ++e) pw[d][e] = pw[d][e - 1] * x[d];
    }
    Eigen::VectorXd psi(static_cast<Eigen::Index>(entries_.size()));
    for (std::size_t s = 0; s < entries_.size(); ++s) {
      double v = 1.0;
      for (std::size_t d = 0; d < dim_; ++d) v *= pw[d][entries_[s][d]];
      psi(static_cast<Eigen::Index>(s)) = v;
    }
    return psi;
  }

 private:
  std::size_t dim_ = 0;
  unsigned max_degree_ = 0;
  std::vector<MultiIndex> entries_;
};

inline Dictionary build_dictionary(std::size_t dimension, unsigned max_degree) {
  return Dictionary(dimension, max_degree);
}

/// K~ on a monomial dictionary: entries(alpha, n) is the coefficient of x^n
/// in E[X(T)^alpha | X(0) = x]. Rows evolve observables, columns expand them.
struct KoopmanMatrix {
  Dictionary dictionary;
  double T = 0.0;
  Eigen::MatrixXd entries;
};

/// One Koopman-matrix element P_alpha(n, T) via the resolvent chain and extrapolation.
inline double koopman_element(const AdjointOperator& op, const MultiIndex& alpha,
                              const MultiIndex& n, const ResolventParams& rp,
                              const ExtrapolationParams& ep = {}) {
  ep.validate();
  return extrapolate(element_sequence(op, alpha, n, rp), ep).value;
}

/// Full dictionary block. Each row shares one dual-state graph; rows are
/// distributed over `threads` workers and stored in dictionary order.
inline KoopmanMatrix koopman_matrix(const AdjointOperator& op, const Dictionary& dict,
                                    const ResolventParams& rp, const ExtrapolationParams& ep = {},
                                    unsigned threads = 1) {
  if (dict.dimension() != op.dimension()) {
    throw DimensionError("dictionary dimension does not match the generator");
  }
  rp.validate();
  ep.validate();
  KoopmanMatrix km{dict, rp.T, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dict.size()),
                                                     static_cast<Eigen::Index>(dict.size()))};
  parallel_for(dict.size(), threads, [&](std::size_t row) {
    const auto seqs = element_sequences(op, dict[row], dict.entries(), rp);
    for (std::size_t col = 0; col < dict.size(); ++col) {
      km.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          extrapolate(seqs[col], ep).value;
    }
  });
  return km;
}

/// a^T K~ psi(x): the observable sum_s a_s x^{alpha_s} advanced by T, evaluated at x.
inline double predict_observable(const KoopmanMatrix& km, std::span<const double> coeffs,
                                 std::span<const double> x) {
  if (coeffs.size() != km.dictionary.size()) {
    throw DimensionError("coefficient vector has length " + std::to_string(coeffs.size()) +
                         ", dictionary has " + std::to_string(km.dictionary.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> a(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return a.dot(km.entries * km.dictionary.evaluate(x));
}

}  // namespace koopman

#endif  // KOOPMAN_KOOPMAN_MATRIX_HPP_
