// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_POLYNOMIAL_HPP_
#define KOOPMAN_POLYNOMIAL_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/multi_index.hpp"

namespace koopman {

/// Sparse real polynomial in D variables, sum_m c_m x^m.
///
/// Terms are kept in graded lexicographic order and zero coefficients are
/// never stored, so two polynomials are equal iff their term maps are equal.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dimension) : dim_(dimension) {}

  static Polynomial constant(std::size_t dimension, double c) {
    Polynomial p(dimension);
    p.add_term(MultiIndex(dimension), c);
    return p;
  }

  /// The coordinate function x_d (zero-based d).
  static Polynomial coordinate(std::size_t dimension, std::size_t d) {
    Polynomial p(dimension);
    p.add_term(MultiIndex::unit(dimension, d), 1.0);
    return p;
  }

  static Polynomial monomial(const MultiIndex& m, double c = 1.0) {
    Polynomial p(m.size());
    p.add_term(m, c);
    return p;
  }

  std::size_t dimension() const noexcept { return dim_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  double coefficient(const MultiIndex& m) const {
    check(m);
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// Adds c x^m, dropping the term if the sum cancels exactly.
  Polynomial& add_term(const MultiIndex& m, double c) {
    check(m);
    if (c == 0.0) return *this;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
    return *this;
  }

  std::uint64_t degree() const noexcept {
    return terms_.empty() ? 0 : terms_.rbegin()->first.total_degree();
  }

  double evaluate(std::span<const double> x) const {
    if (x.size() != dim_) {
      throw DimensionError("evaluation point has dimension " + std::to_string(x.size()) +
                           ", polynomial has " + std::to_string(dim_));
    }
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
      double v = c;
      for (std::size_t d = 0; d < dim_; ++d) v *= std::pow(x[d], static_cast<double>(m[d]));
      sum += v;
    }
    return sum;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_dimension(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_dimension(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_dimension(b);
    Polynomial r(a.dim_);
    std::vector<MultiIndex::value_type> e(a.dim_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (std::size_t d = 0; d < a.dim_; ++d) e[d] = ma[d] + mb[d];
        r.add_term(MultiIndex(e), ca * cb);
      }
    }
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Largest absolute coefficient difference; used for approximate comparisons.
  friend double max_abs_difference(const Polynomial& a, const Polynomial& b) {
    a.require_dimension(b);
    double worst = 0.0;
    for (const auto& [m, c] : a.terms_) worst = std::max(worst, std::abs(c - b.coefficient(m)));
    for (const auto& [m, c] : b.terms_) worst = std::max(worst, std::abs(c - a.coefficient(m)));
    return worst;
  }

 private:
  void check(const MultiIndex& m) const {
    if (m.size() != dim_) {
      throw DimensionError("monomial " + to_string(m) + " does not match polynomial dimension " +
                           std::to_string(dim_));
    }
  }
  void require_dimension(const Polynomial& o) const {
    if (o.dim_ != dim_) {
      throw DimensionError("polynomial dimensions differ: " + std::to_string(dim_) + " vs " +
                           std::to_string(o.dim_));
    }
  }

  std::size_t dim_ = 0;
  TermMap terms_;
};

inline Polynomial pow(const Polynomial& p, unsigned e) {
  Polynomial r = Polynomial::constant(p.dimension(), 1.0);
  Polynomial base = p;
  while (e) {
    if (e & 1u) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

/// p(x + c): every x_d is replaced by (x_d + c_d) and the result re-expanded.
inline Polynomial substitute_shift(const Polynomial& p, std::span<const double> c) {
  const std::size_t dim = p.dimension();
  if (c.size() != dim) {
    throw DimensionError("shift has dimension " + std::to_string(c.size()) +
                         ", polynomial has " + std::to_string(dim));
  }
  // (x_d + c_d)^e for each d, expanded lazily.
  std::vector<std::vector<Polynomial>> powers(dim);
  auto power_of = [&](std::size_t d, unsigned e) -> const Polynomial& {
    auto& cache = powers[d];
    if (cache.empty()) cache.push_back(Polynomial::constant(dim, 1.0));
    const Polynomial lin = Polynomial::coordinate(dim, d) + Polynomial::constant(dim, c[d]);
    while (cache.size() <= e) cache.push_back(cache.back() * lin);
    return cache[e];
  };
  Polynomial out(dim);
  for (const auto& [m, coeff] : p.terms()) {
    Polynomial term = Polynomial::constant(dim, coeff);
    for (std::size_t d = 0; d < dim; ++d) {
      if (m[d]) term = term * power_of(d, m[d]);
    }
    out += term;
  }
  return out;
}

}  // namespace koopman

#endif  // KOOPMAN_POLYNOMIAL_HPP_
