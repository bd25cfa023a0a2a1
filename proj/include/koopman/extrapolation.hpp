// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_EXTRAPOLATION_HPP_
#define KOOPMAN_EXTRAPOLATION_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/sequence.hpp"

namespace koopman {

struct ExtrapolationParams {
  int n_diff = 3;          ///< highest tableau level
  double epsilon = 1e-5;   ///< regularizer in the level weights

  void validate() const {
    if (n_diff < 1) throw ParameterError("n_diff must be at least 1");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  }
};

/// Intercept at 1/M = 0 of the secant through consecutive points (1/M, zeta_M):
///
///   zeta'_M = zeta_M - (zeta_M - zeta_{M-1}) / (1/M - 1/(M-1)) * (1/M)
///
/// The result starts at the second input point.
inline Sequence difference_step(std::span<const SequencePoint> zeta) {
  if (zeta.size() < 2) throw ParameterError("difference step needs at least two points");
  Sequence out;
  out.reserve(zeta.size() - 1);
  for (std::size_t j = 1; j < zeta.size(); ++j) {
    const int m = zeta[j].m;
    if (zeta[j - 1].m != m - 1) {
      throw ParameterError("sequence indices must be consecutive integers (got " +
                           std::to_string(zeta[j - 1].m) + ", " + std::to_string(m) + ")");
    }
    const double inv = 1.0 / m;
    const double slope = (zeta[j].value - zeta[j - 1].value) / (inv - 1.0 / (m - 1));
    out.push_back({m, zeta[j].value - slope * inv});
  }
  return out;
}

struct ExtrapolationResult {
  double value = 0.0;
  std::vector<Sequence> tableau;  ///< levels 0..n_diff, each one point shorter than the last
  std::vector<double> weights;    ///< w^(1)..w^(n_diff)
};

/// Weighted combination of the last entries of tableau levels 1..n_diff.
///
/// w^(i) = 1 / (|zeta^(i)_last - zeta^(i)_second-to-last| + epsilon); level 0 is
/// built but never enters the average.
inline ExtrapolationResult extrapolate(std::span<const SequencePoint> zeta0,
                                       const ExtrapolationParams& params = {}) {
  params.validate();
  const auto need = static_cast<std::size_t>(params.n_diff) + 2;
  if (zeta0.size() < need) {
    throw ParameterError("extrapolation with n_diff = " + std::to_string(params.n_diff) +
                         " needs at least " + std::to_string(need) + " points, got " +
                         std::to_string(zeta0.size()));
  }
  ExtrapolationResult r;
  r.tableau.emplace_back(zeta0.begin(), zeta0.end());
  for (int i = 0; i < params.n_diff; ++i) r.tableau.push_back(difference_step(r.tableau.back()));

  // Averaged as offsets from the level-1 value so agreeing levels reproduce it exactly.
  const double anchor = r.tableau[1].back().value;
  double num = 0.0;
  double den = 0.0;
  for (int i = 1; i <= params.n_diff; ++i) {
    const Sequence& level = r.tableau[i];
    const double last = level.back().value;
    const double prev = level[level.size() - 2].value;
    const double w = 1.0 / (std::abs(last - prev) + params.epsilon);
    r.weights.push_back(w);
    num += w * (last - anchor);
    den += w;
  }
  r.value = anchor + num / den;
  return r;
}

}  // namespace koopman

#endif  // KOOPMAN_EXTRAPOLATION_HPP_
