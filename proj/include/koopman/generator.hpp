// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_GENERATOR_HPP_
#define KOOPMAN_GENERATOR_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/polynomial.hpp"

namespace koopman {

/// dX = a(X) dt + B(X) dW with polynomial, time-independent coefficients.
///
/// `diffusion` is D rows by W columns (W independent Wiener processes).
/// Explicit time dependence has to be folded into an extra state variable
/// before a system is built.
struct SdeSystem {
  std::size_t dimension = 0;
  std::vector<Polynomial> drift;
  std::vector<std::vector<Polynomial>> diffusion;
  std::map<std::string, double> parameters;

  std::size_t noise_dimension() const noexcept {
    return diffusion.empty() ? 0 : diffusion.front().size();
  }

  void validate() const {
    if (dimension == 0) throw DimensionError("system dimension must be positive");
    if (drift.size() != dimension) {
      throw DimensionError("drift has " + std::to_string(drift.size()) + " components, expected " +
                           std::to_string(dimension));
    }
    if (diffusion.size() != dimension) {
      throw DimensionError("diffusion has " + std::to_string(diffusion.size()) +
                           " rows, expected " + std::to_string(dimension));
    }
    for (const auto& p : drift) {
      if (p.dimension() != dimension) throw DimensionError("drift polynomial dimension mismatch");
    }
    for (const auto& row : diffusion) {
      if (row.size() != noise_dimension()) throw DimensionError("ragged diffusion matrix");
      for (const auto& p : row) {
        if (p.dimension() != dimension) {
          throw DimensionError("diffusion polynomial dimension mismatch");
        }
      }
    }
  }
};

/// Rewrites the system in shifted coordinates x~ = x - xc.
inline SdeSystem shift_origin(const SdeSystem& sde, std::span<const double> xc) {
  sde.validate();
  if (xc.size() != sde.dimension) {
    throw DimensionError("origin shift has dimension " + std::to_string(xc.size()) +
                         ", system has " + std::to_string(sde.dimension));
  }
  SdeSystem out = sde;
  for (auto& p : out.drift) p = substitute_shift(p, xc);
  for (auto& row : out.diffusion) {
    for (auto& p : row) p = substitute_shift(p, xc);
  }
  return out;
}

/// One expanded summand c x^m d^k of the adjoint generator.
struct AdjointTerm {
  double c = 0.0;
  MultiIndex m;
  MultiIndex k;

  /// State change v = m - k.
  std::vector<int> shift() const {
    std::vector<int> v(m.size());
    for (std::size_t d = 0; d < m.size(); ++d) v[d] = static_cast<int>(m[d]) - static_cast<int>(k[d]);
    return v;
  }

  /// gamma(n) = c prod_d n_d!/(n_d - k_d)!
  double gamma(const MultiIndex& n) const {
    double g = c;
    for (std::size_t d = 0; d < n.size(); ++d) {
      if (k[d] > n[d]) return 0.0;
      g *= falling_factorial(n[d], k[d]);
    }
    return g;
  }

  friend bool operator==(const AdjointTerm&, const AdjointTerm&) = default;
};

/// A transition of the dual process out of a fixed state.
struct Transition {
  MultiIndex target;
  double rate = 0.0;
};

/// Backward generator L^dagger = sum_r c_r x^{m_r} d^{k_r} as a finite term table.
///
/// Terms sharing (m, k) are merged and zero coefficients dropped, so the table
/// is canonical. The operator is immutable once built.
class AdjointOperator {
 public:
  AdjointOperator() = default;

  AdjointOperator(std::size_t dimension, std::vector<AdjointTerm> terms) : dim_(dimension) {
    std::map<std::pair<MultiIndex, MultiIndex>, double, PairLess> merged;
    for (auto& t : terms) {
      if (t.m.size() != dim_ || t.k.size() != dim_) {
        throw DimensionError("adjoint term dimension mismatch");
      }
      merged[{t.m, t.k}] += t.c;
    }
    for (auto& [mk, c] : merged) {
      if (c != 0.0) terms_.push_back({c, mk.first, mk.second});
    }
    for (const auto& t : terms_) {
      const auto v = t.shift();
      int sum = 0;
      for (int x : v) sum += x;
      max_degree_drop_ = std::max<std::uint64_t>(max_degree_drop_, sum < 0 ? std::uint64_t(-sum) : 0);
      max_degree_rise_ = std::max<std::uint64_t>(max_degree_rise_, sum > 0 ? std::uint64_t(sum) : 0);
    }
  }

  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<AdjointTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Largest total-degree decrease a single term can produce.
  std::uint64_t max_degree_drop() const noexcept { return max_degree_drop_; }
  std::uint64_t max_degree_rise() const noexcept { return max_degree_rise_; }

  /// [L]_{row,col} = sum over terms with n_row - n_col = v_r of gamma_r(n_col).
  double matrix_element(const MultiIndex& n_col, const MultiIndex& n_row) const {
    check(n_col);
    check(n_row);
    double sum = 0.0;
    for (const auto& t : terms_) {
      bool match = true;
      for (std::size_t d = 0; d < dim_ && match; ++d) {
        match = std::int64_t{n_row[d]} - std::int64_t{n_col[d]} ==
                std::int64_t{t.m[d]} - std::int64_t{t.k[d]};
      }
      if (match) sum += t.gamma(n_col);
    }
    return sum;
  }

  double diagonal(const MultiIndex& n) const { return matrix_element(n, n); }

  /// Nonzero transitions out of n, merged per target, in term order.
  /// Includes the diagonal entry when it is nonzero.
  std::vector<Transition> successors(const MultiIndex& n) const {
    check(n);
    std::vector<Transition> out;
    std::vector<MultiIndex::value_type> e(dim_);
    for (const auto& t : terms_) {
      const double g = t.gamma(n);
      if (g == 0.0) continue;
      for (std::size_t d = 0; d < dim_; ++d) e[d] = n[d] - t.k[d] + t.m[d];
      MultiIndex target(e);
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const Transition& tr) { return tr.target == target; });
      if (it == out.end()) {
        out.push_back({std::move(target), g});
      } else {
        it->rate += g;
      }
    }
    std::erase_if(out, [](const Transition& tr) { return tr.rate == 0.0; });
    return out;
  }

 private:
  struct PairLess {
    bool operator()(const std::pair<MultiIndex, MultiIndex>& a,
                    const std::pair<MultiIndex, MultiIndex>& b) const {
      GradedLexLess less;
      if (less(a.second, b.second)) return true;
      if (less(b.second, a.second)) return false;
      return less(a.first, b.first);
    }
  };

  void check(const MultiIndex& n) const {
    if (n.size() != dim_) {
      throw DimensionError("state " + to_string(n) + " does not match generator dimension " +
                           std::to_string(dim_));
    }
  }

  std::size_t dim_ = 0;
  std::vector<AdjointTerm> terms_;
  std::uint64_t max_degree_drop_ = 0;
  std::uint64_t max_degree_rise_ = 0;
};

/// Expands sum_i a_i d_i + 1/2 sum_{i,j} [B B^T]_ij d_i d_j into ladder terms.
inline AdjointOperator build_adjoint(const SdeSystem& sde) {
  sde.validate();
  const std::size_t dim = sde.dimension;
  std::vector<AdjointTerm> terms;
  for (std::size_t i = 0; i < dim; ++i) {
    const MultiIndex k = MultiIndex::unit(dim, i);
    for (const auto& [m, c] : sde.drift[i].terms()) terms.push_back({c, m, k});
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Polynomial bbt(dim);
      for (std::size_t w = 0; w < sde.noise_dimension(); ++w) {
        bbt += sde.diffusion[i][w] * sde.diffusion[j][w];
      }
      if (bbt.is_zero()) continue;
      std::vector<MultiIndex::value_type> ke(dim, 0);
      ke[i] += 1;
      ke[j] += 1;
      const MultiIndex k(ke);
      for (const auto& [m, c] : bbt.terms()) terms.push_back({0.5 * c, m, k});
    }
  }
  return AdjointOperator(dim, std::move(terms));
}

}  // namespace koopman

#endif  // KOOPMAN_GENERATOR_HPP_
