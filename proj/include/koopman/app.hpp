// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_APP_HPP_
#define KOOPMAN_APP_HPP_

// Pipelines behind the command-line tool. Each run_* function takes a parsed
// model plus overrides and writes plot-ready CSV to a stream, so the same
// code is exercised by the tests and by the binary.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "koopman/csv.hpp"
#include "koopman/edmd.hpp"
#include "koopman/errors.hpp"
#include "koopman/extrapolation.hpp"
#include "koopman/generator.hpp"
#include "koopman/koopman_matrix.hpp"
#include "koopman/model_io.hpp"
#include "koopman/parallel.hpp"
#include "koopman/resolvent.hpp"
#include "koopman/simulator.hpp"

namespace koopman::app {

enum ExitCode : int {
  kSuccess = 0,
  kParseFailure = 2,
  kNumericFailure = 3,
  kDegenerateGram = 4,
};

/// Command-line values that replace model defaults when present.
struct Overrides {
  std::optional<double> T;
  std::optional<int> m_min;
  std::optional<int> m_max;
  std::optional<int> n_diff;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> degree_cap;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> repeats;
  std::optional<std::vector<double>> x0;
  std::optional<unsigned> threads;
};

inline void apply(ModelConfig& cfg, const Overrides& o) {
  if (o.T) {
    if (!(*o.T > 0.0)) throw ParseError("--T must be positive");
    cfg.resolvent.T = *o.T;
    cfg.simulation.T = *o.T;
  }
  if (o.m_min) cfg.resolvent.m_min = *o.m_min;
  if (o.m_max) cfg.resolvent.m_max = *o.m_max;
  if (o.n_diff) cfg.extrapolation.n_diff = *o.n_diff;
  if (o.epsilon) cfg.extrapolation.epsilon = *o.epsilon;
  if (o.degree_cap) cfg.resolvent.degree_cap = *o.degree_cap;
  if (o.seed) cfg.simulation.seed = *o.seed;
  if (o.samples) cfg.simulation.n_samples = *o.samples;
  if (o.repeats) cfg.simulation.n_repeats = *o.repeats;
  if (o.x0) {
    if (o.x0->size() != cfg.dimension) {
      throw ParseError("--x0 needs " + std::to_string(cfg.dimension) + " values");
    }
    cfg.x0s = {*o.x0};
  }
  cfg.simulation.threads = resolve_thread_count(o.threads);
  try {
    cfg.resolvent.validate();
    cfg.extrapolation.validate();
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
  const int points = cfg.resolvent.m_max - cfg.resolvent.m_min;
  if (points < cfg.extrapolation.n_diff + 2) {
    throw ParseError("m_max - m_min must be at least n_diff + 2 (got " + std::to_string(points) + ")");
  }
}

/// Initial state of path p: the configured list cycled, or the shifted origin.
inline std::vector<double> initial_state(const ModelConfig& cfg, std::size_t p) {
  if (cfg.x0s.empty()) return std::vector<double>(cfg.dimension, 0.0);
  return cfg.x0s[p % cfg.x0s.size()];
}

// ---------------------------------------------------------------------------
// element

inline ExtrapolationResult run_element(const ModelConfig& cfg, const MultiIndex& alpha,
                                       const MultiIndex& n) {
  const AdjointOperator op = build_adjoint(cfg.system());
  return extrapolate(element_sequence(op, alpha, n, cfg.resolvent), cfg.extrapolation);
}

/// Columns M, zeta0..zetaN; a level-i entry is blank until M = first M + i.
/// The trailing "summary" row carries the result under zeta0 and w^(i) under zeta_i.
inline void write_element_csv(std::ostream& out, const ExtrapolationResult& r) {
  const std::size_t levels = r.tableau.size();
  out << "M";
  for (std::size_t i = 0; i < levels; ++i) out << ",zeta" << i;
  out << "\n";
  const Sequence& base = r.tableau.front();
  for (std::size_t row = 0; row < base.size(); ++row) {
    out << base[row].m;
    for (std::size_t i = 0; i < levels; ++i) {
      out << ',';
      if (row >= i) out << format_double(r.tableau[i][row - i].value);
    }
    out << "\n";
  }
  out << "summary," << format_double(r.value);
  for (double w : r.weights) out << ',' << format_double(w);
  out << "\n";
}

// ---------------------------------------------------------------------------
// matrix

inline KoopmanMatrix run_matrix(const ModelConfig& cfg, unsigned max_degree) {
  const AdjointOperator op = build_adjoint(cfg.system());
  return koopman_matrix(op, Dictionary(cfg.dimension, max_degree), cfg.resolvent,
                        cfg.extrapolation, cfg.simulation.threads);
}

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const Dictionary& dict) {
  out << "alpha\\n";
  for (const auto& n : dict.entries()) out << ',' << exponents_text(n);
  out << "\n";
  for (std::size_t r = 0; r < dict.size(); ++r) {
    out << exponents_text(dict[r]);
    for (std::size_t c = 0; c < dict.size(); ++c) {
      out << ',' << format_double(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    out << "\n";
  }
}

inline void write_dual_matrix(std::ostream& out, const ModelConfig& cfg, const KoopmanMatrix& km) {
  out << "# model=" << cfg.name << " method=dual T=" << format_double(km.T)
      << " m_min=" << cfg.resolvent.m_min << " m_max=" << cfg.resolvent.m_max
      << " n_diff=" << cfg.extrapolation.n_diff
      << " epsilon=" << format_double(cfg.extrapolation.epsilon) << "\n";
  out << "# rows: observable alpha; columns: basis monomial n; columns truncated at total degree "
      << km.dictionary.max_degree() << " (dual paths are not truncated)\n";
  write_matrix_csv(out, km.entries, km.dictionary);
}

// ---------------------------------------------------------------------------
// edmd

struct EdmdRun {
  Dictionary dictionary;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std;
  std::size_t n_paths = 0;
  std::size_t n_data = 0;
  std::size_t repeats = 0;
  double mean_residual = 0.0;  ///< J(K~)/N averaged over repeats
};

inline std::size_t pairs_per_path(const ModelConfig& cfg) {
  const double r = cfg.simulation.t_end / cfg.simulation.T;
  if (!(r >= 1.0) || std::abs(r - std::round(r)) > 1e-9 * r) {
    throw ParseError("t_end must be a positive integer multiple of T");
  }
  return static_cast<std::size_t>(std::round(r));
}

/// `stream_base` separates independent experiments that share one seed.
inline EdmdRun run_edmd(const ModelConfig& cfg, std::size_t n_paths, std::size_t repeats,
                        unsigned degree, std::uint64_t stream_base = 0) {
  if (n_paths == 0 || repeats == 0) throw ParseError("paths and repeats must be positive");
  const SdeSystem sde = cfg.system();
  const Dictionary dict(cfg.dimension, degree);
  std::vector<std::vector<double>> x0s;
  for (std::size_t p = 0; p < n_paths; ++p) x0s.push_back(initial_state(cfg, p));

  std::vector<Eigen::MatrixXd> estimates;
  double residual_sum = 0.0;
  std::size_t n_data = 0;
  for (std::size_t r = 0; r < repeats; ++r) {
    SimulationConfig sim = cfg.simulation;
    const std::uint64_t first = ((stream_base * repeats + r) << 24);
    SnapshotSet snaps = snapshot_pairs(sde, x0s, sim, first);
    snaps.model = cfg.name;
    n_data = snaps.size();
    const KoopmanMatrix km = estimate_koopman(snaps, dict, cfg.edmd.svd_tol);
    residual_sum += residual(snaps, dict, km) / static_cast<double>(snaps.size());
    estimates.push_back(km.entries);
  }
  const auto sz = static_cast<Eigen::Index>(dict.size());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(sz, sz);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(sz, sz);
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    const Eigen::MatrixXd delta = estimates[r] - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta.cwiseProduct(estimates[r] - mean);
  }
  Eigen::MatrixXd sd = Eigen::MatrixXd::Zero(sz, sz);
  if (repeats > 1) sd = (m2 / static_cast<double>(repeats - 1)).cwiseSqrt();
  return {dict, mean, sd, n_paths, n_data, repeats, residual_sum / static_cast<double>(repeats)};
}

inline void write_edmd_metadata(std::ostream& out, const ModelConfig& cfg, const EdmdRun& run) {
  out << "# model=" << cfg.name << " method=edmd T=" << format_double(cfg.simulation.T)
      << " dt=" << format_double(cfg.simulation.dt) << " t_end=" << format_double(cfg.simulation.t_end)
      << " paths=" << run.n_paths << " N_data=" << run.n_data << " repeats=" << run.repeats
      << " seed=" << cfg.simulation.seed << " degree=" << run.dictionary.max_degree()
      << " mean_residual_per_pair=" << format_double(run.mean_residual) << "\n";
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
  std::string element;
  std::string method;
  std::size_t data_size = 0;
  double mean = 0.0;
  double std = 0.0;
};

/// Tracked elements used when none are requested.
inline std::vector<ElementLabel> default_elements(std::size_t dimension) {
  std::vector<std::string> labels;
  if (dimension == 2) {
    labels = {"[1 0]->[1 0]", "[0 1]->[0 1]", "[2 0]->[2 0]", "[0 2]->[0 2]",
              "[1 0]->[0 1]", "[0 1]->[1 0]", "[2 0]->[0 0]", "[0 2]->[1 0]"};
  } else if (dimension == 1) {
    labels = {"[1]->[1]", "[2]->[2]", "[2]->[0]", "[1]->[2]"};
  }
  std::vector<ElementLabel> out;
  for (const auto& l : labels) out.push_back(parse_element_label(l, dimension));
  if (out.empty()) {
    for (std::size_t d = 0; d < dimension; ++d) {
      out.push_back({MultiIndex::unit(dimension, d), MultiIndex::unit(dimension, d)});
    }
  }
  return out;
}

/// Dual-method value per element, then EDMD mean and std per data size.
inline std::vector<CompareRow> run_compare(const ModelConfig& cfg,
                                           const std::vector<ElementLabel>& elements,
                                           const std::vector<std::size_t>& data_sizes,
                                           unsigned degree) {
  const std::size_t per_path = pairs_per_path(cfg);
  for (const auto& e : elements) {
    if (e.alpha.total_degree() > degree || e.n.total_degree() > degree) {
      throw ParseError("element " + element_label(e.alpha, e.n) +
                       " lies outside the EDMD dictionary of degree " + std::to_string(degree));
    }
  }
  std::vector<std::size_t> paths;
  for (std::size_t n : data_sizes) {
    if (n == 0 || n % per_path != 0) {
      throw ParseError("data size " + std::to_string(n) + " is not a multiple of the " +
                       std::to_string(per_path) + " snapshot pairs per path");
    }
    paths.push_back(n / per_path);
  }

  const AdjointOperator op = build_adjoint(cfg.system());
  std::vector<double> dual(elements.size());
  parallel_for(elements.size(), cfg.simulation.threads, [&](std::size_t i) {
    dual[i] = koopman_element(op, elements[i].alpha, elements[i].n, cfg.resolvent, cfg.extrapolation);
  });

  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    rows.push_back({element_label(elements[i].alpha, elements[i].n), "dual", 0, dual[i], 0.0});
  }
  const Dictionary dict(cfg.dimension, degree);
  for (std::size_t s = 0; s < paths.size(); ++s) {
    const EdmdRun run = run_edmd(cfg, paths[s], cfg.simulation.n_repeats, degree, s + 1);
    for (const auto& e : elements) {
      const auto r = static_cast<Eigen::Index>(*dict.index_of(e.alpha));
      const auto c = static_cast<Eigen::Index>(*dict.index_of(e.n));
      rows.push_back({element_label(e.alpha, e.n), "edmd", run.n_data, run.mean(r, c), run.std(r, c)});
    }
  }
  return rows;
}

inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "element,method,data_size,mean,std\n";
  for (const auto& r : rows) {
    out << r.element << ',' << r.method << ',' << r.data_size << ',' << format_double(r.mean) << ','
        << format_double(r.std) << "\n";
  }
}

// ---------------------------------------------------------------------------
// mc

inline MonteCarloEstimate run_mc(const ModelConfig& cfg, const MultiIndex& alpha) {
  const auto x0 = initial_state(cfg, 0);
  return mc_expectation(cfg.system(), x0, alpha, cfg.simulation);
}

inline void write_mc_csv(std::ostream& out, const ModelConfig& cfg, const MultiIndex& alpha,
                         const MonteCarloEstimate& est) {
  out << "alpha,T,x0,mean,std,n_samples,n_repeats,dt,seed\n";
  const auto x0 = initial_state(cfg, 0);
  std::string x0s;
  for (std::size_t d = 0; d < x0.size(); ++d) x0s += (d ? " " : "") + format_double(x0[d]);
  out << exponents_text(alpha) << ',' << format_double(cfg.simulation.T) << ',' << x0s << ','
      << format_double(est.mean) << ',' << format_double(est.std) << ','
      << cfg.simulation.n_samples << ',' << cfg.simulation.n_repeats << ','
      << format_double(cfg.simulation.dt) << ',' << cfg.simulation.seed << "\n";
}

}  // namespace koopman::app

#endif  // KOOPMAN_APP_HPP_
