// Shared systems for the tests.

#ifndef KOOPMAN_TESTS_TEST_MODELS_HPP_
#define KOOPMAN_TESTS_TEST_MODELS_HPP_

#include <random>
#include <vector>

#include "koopman/generator.hpp"
#include "koopman/polynomial.hpp"

namespace koopman::testing {

// dX = -gamma X dt + sigma dW
inline SdeSystem ou(double gamma = 1.0, double sigma = 0.5) {
  SdeSystem s;
  s.dimension = 1;
  s.drift = {Polynomial::monomial({1}, -gamma)};
  s.diffusion = {{Polynomial::constant(1, sigma)}};
  return s;
}

// Noisy van der Pol oscillator in unshifted coordinates.
inline SdeSystem vdp(double eps = 1.0, double nu11 = 0.5, double nu22 = 0.5) {
  SdeSystem s;
  s.dimension = 2;
  s.drift = {Polynomial::monomial({0, 1}),
             Polynomial::monomial({0, 1}, eps) + Polynomial::monomial({2, 1}, -eps) +
                 Polynomial::monomial({1, 0}, -1.0)};
  s.diffusion = {{Polynomial::constant(2, nu11), Polynomial(2)},
                 {Polynomial(2), Polynomial::constant(2, nu22)}};
  return s;
}

// dx = a x dt, no noise.
inline SdeSystem linear(double a) {
  SdeSystem s;
  s.dimension = 1;
  s.drift = {Polynomial::monomial({1}, a)};
  s.diffusion = {{Polynomial(1)}};
  return s;
}

// Random polynomial of total degree <= max_degree with coefficients in [-1, 1].
inline Polynomial random_polynomial(std::size_t dim, unsigned max_degree, std::mt19937_64& rng,
                                    double density = 0.7) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  Polynomial p(dim);
  for (const auto& m : monomials_up_to(dim, max_degree)) {
    if (keep(rng)) p.add_term(m, coeff(rng));
  }
  return p;
}

// Random SDE with polynomial drift and diffusion of degree <= 2 (square noise).
inline SdeSystem random_sde(std::size_t dim, std::mt19937_64& rng) {
  SdeSystem s;
  s.dimension = dim;
  for (std::size_t i = 0; i < dim; ++i) s.drift.push_back(random_polynomial(dim, 2, rng));
  for (std::size_t i = 0; i < dim; ++i) {
    s.diffusion.emplace_back();
    for (std::size_t j = 0; j < dim; ++j) s.diffusion.back().push_back(random_polynomial(dim, 1, rng, 0.5));
  }
  return s;
}

}  // namespace koopman::testing

#endif  // KOOPMAN_TESTS_TEST_MODELS_HPP_
