// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_SIMULATOR_HPP_
#define KOOPMAN_SIMULATOR_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "koopman/edmd.hpp"
#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/parallel.hpp"

namespace koopman {

// Random streams
// --------------
// Every path owns a std::mt19937_64 seeded with splitmix64(seed, stream), so
// results depend only on (seed, stream) and never on thread scheduling.
// Uniforms take the top 53 bits; normals use the Marsaglia polar method,
// which is exact and needs no inverse CDF. std::normal_distribution is not
// used because its algorithm differs between standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on (-1, 1).
  double symmetric_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0;
  }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = symmetric_uniform();
      v = symmetric_uniform();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SimulationConfig {
  double dt = 1e-3;
  double t_end = 5.0;
  double T = 0.1;           ///< snapshot lag and Monte Carlo horizon
  std::size_t n_samples = 1000;
  std::size_t n_repeats = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Number of dt steps in `span`; throws unless span is an integer multiple of dt.
  std::size_t steps_for(double span, const char* what) const {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(span >= 0.0)) throw ParameterError(std::string(what) + " must be non-negative");
    const double ratio = span / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw ParameterError(std::string(what) + " is not an integer multiple of dt");
    }
    return static_cast<std::size_t>(rounded);
  }
};

/// Coefficient functions flattened for fast repeated evaluation.
class CompiledSde {
 public:
  explicit CompiledSde(const SdeSystem& sde) : dim_(sde.dimension), noise_(sde.noise_dimension()) {
    sde.validate();
    for (const auto& p : sde.drift) drift_.push_back(compile(p));
    for (const auto& row : sde.diffusion) {
      for (const auto& p : row) diffusion_.push_back(compile(p));
    }
    max_degree_ = 0;
    for (const auto& p : sde.drift) max_degree_ = std::max<unsigned>(max_degree_, static_cast<unsigned>(p.degree()));
    for (const auto& row : sde.diffusion) {
      for (const auto& p : row) max_degree_ = std::max<unsigned>(max_degree_, static_cast<unsigned>(p.degree()));
    }
    powers_.resize(dim_ * (max_degree_ + 1));
  }

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t noise_dimension() const noexcept { return noise_; }

  /// x <- x + a(x) dt + B(x) sqrt(dt) xi
  void step(std::span<double> x, double dt, std::span<const double> xi) {
    const std::size_t stride = max_degree_ + 1;
    for (std::size_t d = 0; d < dim_; ++d) {
      double* pw = &powers_[d * stride];
      pw[0] = 1.0;
      for (std::size_t e = 1; e < stride; ++e) pw[e] = pw[e - 1] * x[d];
    }
    const double sq = std::sqrt(dt);
    scratch_.assign(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      double inc = eval(drift_[i]) * dt;
      for (std::size_t w = 0; w < noise_; ++w) {
        const auto& p = diffusion_[i * noise_ + w];
        if (!p.coeff.empty()) inc += eval(p) * sq * xi[w];
      }
      scratch_[i] = inc;
    }
    for (std::size_t i = 0; i < dim_; ++i) x[i] += scratch_[i];
  }

 private:
  struct Flat {
    std::vector<double> coeff;
    std::vector<unsigned> exps;  // coeff.size() * dim
  };

  Flat compile(const Polynomial& p) const {
    Flat f;
    for (const auto& [m, c] : p.terms()) {
      f.coeff.push_back(c);
      for (auto e : m) f.exps.push_back(e);
    }
    return f;
  }

  double eval(const Flat& f) const {
    const std::size_t stride = max_degree_ + 1;
    double sum = 0.0;
    for (std::size_t t = 0; t < f.coeff.size(); ++t) {
      double v = f.coeff[t];
      for (std::size_t d = 0; d < dim_; ++d) v *= powers_[d * stride + f.exps[t * dim_ + d]];
      sum += v;
    }
    return sum;
  }

  std::size_t dim_;
  std::size_t noise_;
  unsigned max_degree_ = 0;
  std::vector<Flat> drift_;
  std::vector<Flat> diffusion_;
  std::vector<double> powers_;
  std::vector<double> scratch_;
};

inline void check_finite(std::span<const double> x, std::size_t step) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DivergenceError(step, "Euler-Maruyama path left the finite range");
  }
}

/// One Euler-Maruyama step: x + a(x) dt + B(x) sqrt(dt) noise.
inline std::vector<double> em_step(const SdeSystem& sde, std::span<const double> x, double dt,
                                   std::span<const double> noise) {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (x.size() != sde.dimension) throw DimensionError("state dimension mismatch");
  if (noise.size() != sde.noise_dimension()) throw DimensionError("noise dimension mismatch");
  CompiledSde c(sde);
  std::vector<double> out(x.begin(), x.end());
  c.step(out, dt, noise);
  check_finite(out, 1);
  return out;
}

struct PathPoint {
  double t = 0.0;
  std::vector<double> x;
};

namespace detail {

// Advances x by `steps` steps drawing noise from `rng`; `offset` numbers the steps for diagnostics.
inline void advance(CompiledSde& c, std::span<double> x, double dt, std::size_t steps,
                    NormalStream& rng, std::vector<double>& xi, std::size_t offset = 0) {
  for (std::size_t s = 0; s < steps; ++s) {
    for (double& v : xi) v = rng();
    c.step(x, dt, xi);
    check_finite(x, offset + s + 1);
  }
}

}  // namespace detail

/// States at t = 0, dt, ..., t_end for the path with the given stream index.
inline std::vector<PathPoint> sample_path(const SdeSystem& sde, std::span<const double> x0,
                                          const SimulationConfig& cfg, std::uint64_t stream = 0) {
  if (x0.size() != sde.dimension) throw DimensionError("initial state dimension mismatch");
  const std::size_t steps = cfg.steps_for(cfg.t_end, "t_end");
  CompiledSde c(sde);
  NormalStream rng(cfg.seed, stream);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> xi(c.noise_dimension());
  std::vector<PathPoint> out;
  out.reserve(steps + 1);
  out.push_back({0.0, x});
  for (std::size_t s = 0; s < steps; ++s) {
    detail::advance(c, x, cfg.dt, 1, rng, xi, s);
    out.push_back({static_cast<double>(s + 1) * cfg.dt, x});
  }
  return out;
}

/// Pairs (x(kT), x((k+1)T)) for k < t_end/T along one path per initial state.
/// Path p uses random stream `first_stream + p`.
inline SnapshotSet snapshot_pairs(const SdeSystem& sde, const std::vector<std::vector<double>>& x0s,
                                  const SimulationConfig& cfg, std::uint64_t first_stream = 0) {
  const std::size_t lag = cfg.steps_for(cfg.T, "T");
  if (lag == 0) throw ParameterError("T must be at least one step");
  const double ratio = cfg.t_end / cfg.T;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || ratio < 1.0) {
    throw ParameterError("t_end must be a positive integer multiple of T");
  }
  const auto per_path = static_cast<std::size_t>(std::round(ratio));
  const std::size_t dim = sde.dimension;
  for (const auto& x0 : x0s) {
    if (x0.size() != dim) throw DimensionError("initial state dimension mismatch");
  }
  SnapshotSet out;
  out.T = cfg.T;
  out.dt = cfg.dt;
  out.seed = cfg.seed;
  const auto total = static_cast<Eigen::Index>(x0s.size() * per_path);
  out.xs.resize(static_cast<Eigen::Index>(dim), total);
  out.ys.resize(static_cast<Eigen::Index>(dim), total);

  const CompiledSde prototype(sde);
  parallel_for(x0s.size(), cfg.threads, [&](std::size_t p) {
    CompiledSde c = prototype;
    NormalStream rng(cfg.seed, first_stream + p);
    std::vector<double> x = x0s[p];
    std::vector<double> xi(c.noise_dimension());
    for (std::size_t k = 0; k < per_path; ++k) {
      const auto col = static_cast<Eigen::Index>(p * per_path + k);
      for (std::size_t d = 0; d < dim; ++d) out.xs(static_cast<Eigen::Index>(d), col) = x[d];
      detail::advance(c, x, cfg.dt, lag, rng, xi, k * lag);
      for (std::size_t d = 0; d < dim; ++d) out.ys(static_cast<Eigen::Index>(d), col) = x[d];
    }
  });
  return out;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation of the batch means
};

/// n_repeats batches of n_samples paths to time T; per batch the sample mean of
/// X(T)^alpha, then mean and standard deviation across batches.
inline MonteCarloEstimate mc_expectation(const SdeSystem& sde, std::span<const double> x0,
                                         const MultiIndex& alpha, const SimulationConfig& cfg) {
  if (cfg.n_samples == 0 || cfg.n_repeats == 0) {
    throw ParameterError("n_samples and n_repeats must be positive");
  }
  if (x0.size() != sde.dimension || alpha.size() != sde.dimension) {
    throw DimensionError("initial state / exponent dimension mismatch");
  }
  const std::size_t steps = cfg.steps_for(cfg.T, "T");
  const CompiledSde prototype(sde);
  std::vector<double> batch_mean(cfg.n_repeats);
  parallel_for(cfg.n_repeats, cfg.threads, [&](std::size_t b) {
    CompiledSde c = prototype;
    std::vector<double> xi(c.noise_dimension());
    std::vector<double> x(x0.size());
    double mean = 0.0;
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
      NormalStream rng(cfg.seed, b * cfg.n_samples + s);
      x.assign(x0.begin(), x0.end());
      detail::advance(c, x, cfg.dt, steps, rng, xi);
      double v = 1.0;
      for (std::size_t d = 0; d < x.size(); ++d) v *= std::pow(x[d], static_cast<double>(alpha[d]));
      mean += (v - mean) / static_cast<double>(s + 1);
    }
    batch_mean[b] = mean;
  });
  // Welford over batches: identical batch means give exactly zero spread.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t b = 0; b < batch_mean.size(); ++b) {
    const double delta = batch_mean[b] - mean;
    mean += delta / static_cast<double>(b + 1);
    m2 += delta * (batch_mean[b] - mean);
  }
  const double var = batch_mean.size() > 1 ? m2 / static_cast<double>(batch_mean.size() - 1) : 0.0;
  return {mean, std::sqrt(var)};
}

}  // namespace koopman

#endif  // KOOPMAN_SIMULATOR_HPP_
