// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_MULTI_INDEX_HPP_
#define KOOPMAN_MULTI_INDEX_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "koopman/errors.hpp"

namespace koopman {

/// Exponent vector n = (n_1, ..., n_D) of the monomial x^n.
///
/// A MultiIndex doubles as the label of the basis ket |n> = x^n and of a
/// dictionary entry. Entries are capped at `max_exponent`; factorial-type
/// weights are always evaluated as floating-point falling factorials, so the
/// cap only guards against nonsense input.
class MultiIndex {
 public:
  using value_type = std::uint32_t;
  static constexpr value_type max_exponent = value_type{1} << 16;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension) : exps_(dimension, 0) {}
  MultiIndex(std::initializer_list<value_type> exps) : exps_(exps) { validate(); }
  explicit MultiIndex(std::vector<value_type> exps) : exps_(std::move(exps)) { validate(); }

  /// Unit vector 1_d of the given dimension.
  static MultiIndex unit(std::size_t dimension, std::size_t d) {
    if (d >= dimension) {
      throw DimensionError("unit index " + std::to_string(d) + " out of range for dimension " +
                           std::to_string(dimension));
    }
    MultiIndex r(dimension);
    r.exps_[d] = 1;
    return r;
  }

  std::size_t size() const noexcept { return exps_.size(); }
  value_type operator[](std::size_t d) const { return exps_[d]; }
  auto begin() const noexcept { return exps_.begin(); }
  auto end() const noexcept { return exps_.end(); }
  std::span<const value_type> exponents() const noexcept { return exps_; }

  /// |n| = n_1 + ... + n_D.
  std::uint64_t total_degree() const noexcept {
    return std::accumulate(exps_.begin(), exps_.end(), std::uint64_t{0});
  }

  bool is_zero() const noexcept {
    return std::all_of(exps_.begin(), exps_.end(), [](value_type e) { return e == 0; });
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  /// n shifted by a signed vector; std::nullopt when any entry would go negative.
  std::optional<MultiIndex> shifted(std::span<const int> delta) const {
    if (delta.size() != exps_.size()) {
      throw DimensionError("shift vector has dimension " + std::to_string(delta.size()) +
                           ", multi-index has " + std::to_string(exps_.size()));
    }
    MultiIndex r(*this);
    for (std::size_t d = 0; d < exps_.size(); ++d) {
      const std::int64_t e = std::int64_t{exps_[d]} + delta[d];
      if (e < 0) return std::nullopt;
      r.exps_[d] = static_cast<value_type>(e);
    }
    r.validate();
    return r;
  }

 private:
  friend MultiIndex multiply_by_coordinate(const MultiIndex& n, std::size_t d);

  void validate() const {
    for (value_type e : exps_) {
      if (e > max_exponent) {
        throw ParameterError("exponent " + std::to_string(e) + " exceeds cap " +
                             std::to_string(max_exponent));
      }
    }
  }

  std::vector<value_type> exps_;
};

inline void require_same_dimension(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) {
    throw DimensionError("multi-index dimensions differ: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

/// Graded lexicographic order: total degree first, then larger leading
/// exponents first, e.g. (0,0) < (1,0) < (0,1) < (2,0) < (1,1) < (0,2).
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const auto da = a.total_degree();
    const auto db = b.total_degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& n) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto e : n) {
      h ^= e;
      h *= 0x100000001b3ULL;
    }
    h ^= n.size();
    return static_cast<std::size_t>(h);
  }
};

/// Renders n as "[n_1 n_2 ... n_D]".
inline std::string to_string(const MultiIndex& n) {
  std::string s = "[";
  for (std::size_t d = 0; d < n.size(); ++d) {
    if (d) s += ' ';
    s += std::to_string(n[d]);
  }
  return s + "]";
}

/// n!/(n-k)! evaluated multiplicatively; zero when k > n.
inline double falling_factorial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::uint64_t i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

/// n! = n_1! n_2! ... n_D!
inline double factorial(const MultiIndex& n) noexcept {
  double r = 1.0;
  for (auto e : n) r *= falling_factorial(e, e);
  return r;
}

/// x_d |n> = |n + 1_d>.  `d` is zero-based.
inline MultiIndex multiply_by_coordinate(const MultiIndex& n, std::size_t d) {
  if (d >= n.size()) {
    throw DimensionError("coordinate " + std::to_string(d) + " out of range for dimension " +
                         std::to_string(n.size()));
  }
  MultiIndex r(n);
  r.exps_[d] += 1;
  r.validate();
  return r;
}

/// Result of x^m d^k acting on a monomial ket.
struct LadderAction {
  double factor = 0.0;
  std::optional<MultiIndex> target;  ///< empty iff the ket is annihilated

  bool annihilated() const noexcept { return !target.has_value(); }
};

/// x^m (d/dx)^k |n> = prod_d n_d!/(n_d - k_d)! |n - k + m>, or zero when some k_d > n_d.
inline LadderAction apply_ladder(const MultiIndex& n, const MultiIndex& m, const MultiIndex& k) {
  require_same_dimension(n, m);
  require_same_dimension(n, k);
  double factor = 1.0;
  std::vector<MultiIndex::value_type> out(n.size());
  for (std::size_t d = 0; d < n.size(); ++d) {
    if (k[d] > n[d]) return {};
    factor *= falling_factorial(n[d], k[d]);
    out[d] = n[d] - k[d] + m[d];
  }
  return {factor, MultiIndex(std::move(out))};
}

/// <n_row | n_col> = n! when the indices agree, zero otherwise.
inline double pairing(const MultiIndex& n_row, const MultiIndex& n_col) {
  require_same_dimension(n_row, n_col);
  return n_row == n_col ? factorial(n_col) : 0.0;
}

/// All multi-indices of dimension D with total degree <= max_degree, graded lexicographic.
inline std::vector<MultiIndex> monomials_up_to(std::size_t dimension, unsigned max_degree) {
  if (dimension == 0) throw DimensionError("dimension must be positive");
  std::vector<MultiIndex> out;
  std::vector<MultiIndex::value_type> e(dimension);
  for (unsigned deg = 0; deg <= max_degree; ++deg) {
    // Enumerate compositions of `deg` with the leading exponent largest first.
    auto rec = [&](auto&& self, std::size_t d, unsigned left) -> void {
      if (d + 1 == dimension) {
        e[d] = left;
        out.emplace_back(e);
        return;
      }
      for (unsigned v = left + 1; v-- > 0;) {
        e[d] = v;
        self(self, d + 1, left - v);
      }
    };
    rec(rec, 0, deg);
  }
  return out;
}

}  // namespace koopman

template <>
struct std::hash<koopman::MultiIndex> : koopman::MultiIndexHash {};

#endif  // KOOPMAN_MULTI_INDEX_HPP_
