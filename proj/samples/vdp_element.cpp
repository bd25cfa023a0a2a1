// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

// E[x1(T)^2] for the noisy van der Pol oscillator started at the origin,
// computed without simulation and printed next to the extrapolation tableau.

#include <cstdio>

#include "koopman/koopman.hpp"

int main() {
  using namespace koopman;

  const double eps = 1.0, nu11 = 0.5, nu22 = 0.5;
  SdeSystem vdp;
  vdp.dimension = 2;
  vdp.drift = {Polynomial::monomial({0, 1}),
               Polynomial::monomial({0, 1}, eps) + Polynomial::monomial({2, 1}, -eps) +
                   Polynomial::monomial({1, 0}, -1.0)};
  vdp.diffusion = {{Polynomial::constant(2, nu11), Polynomial(2)},
                   {Polynomial(2), Polynomial::constant(2, nu22)}};

  const AdjointOperator op = build_adjoint(vdp);
  ResolventParams rp;
  rp.T = 1.0;
  const Sequence seq = element_sequence(op, {2, 0}, {0, 0}, rp);
  const ExtrapolationResult r = extrapolate(seq);

  std::printf("%4s %14s %14s\n", "M", "zeta0", "zeta3");
  for (std::size_t i = 3; i < seq.size(); i += 6) {
    std::printf("%4d %14.8f %14.8f\n", seq[i].m, seq[i].value, r.tableau[3][i - 3].value);
  }
  std::printf("[2 0] -> [0 0] at T = 1: %.6f\n", r.value);
  return 0;
}
