// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_RESOLVENT_HPP_
#define KOOPMAN_RESOLVENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/sequence.hpp"

namespace koopman {

/// Guard on |1 - (T/M) [L]_ss| below which a resolvent weight is refused.
inline constexpr double kSingularDenominatorGuard = 1e-12;

struct ResolventParams {
  double T = 1.0;
  int m_min = 10;
  int m_max = 50;
  /// Dual states with total degree above the cap are dropped (approximation).
  std::optional<std::uint64_t> degree_cap;
  /// Path mass with magnitude below this is discarded after every hop; 0 keeps everything.
  double prune_threshold = 0.0;
  /// Bound on the number of dual states explored before giving up.
  std::size_t max_states = 2'000'000;

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("T must be positive and finite");
    if (m_min < 2) throw ParameterError("m_min must be at least 2");
    if (m_max <= m_min) throw ParameterError("m_max must exceed m_min");
    if (!(prune_threshold >= 0.0)) throw ParameterError("prune_threshold must be >= 0");
    if (max_states == 0) throw ParameterError("max_states must be positive");
  }
};

namespace detail {

inline double resolvent_denominator(double h, double diag, const MultiIndex& n) {
  const double den = 1.0 - h * diag;
  if (!(std::abs(den) >= kSingularDenominatorGuard)) {
    throw SingularDenominator("1 - (T/M) L_ss = " + std::to_string(den) + " at state " +
                              to_string(n) + "; reduce T or increase M");
  }
  return den;
}

}  // namespace detail

/// Weight of one hop cur -> next in the approximate resolvent chain.
///
/// Self hops weigh 1/(1 - h L_cc); other hops h L_{next,cur} / (1 - h L_cc)^2
/// with h = T/M, the squared denominator always taken at the source state.
inline double hop_weight(const AdjointOperator& op, const MultiIndex& cur, const MultiIndex& next,
                         double T, int M) {
  if (M < 1) throw ParameterError("M must be positive");
  const double h = T / M;
  const double den = detail::resolvent_denominator(h, op.diagonal(cur), cur);
  if (next == cur) return 1.0 / den;
  return h * op.matrix_element(cur, next) / (den * den);
}

/// Dual states reachable from a source that can still reach one of the targets.
///
/// States are sorted in graded lexicographic order and transitions are stored
/// in CSR form, so one graph serves every M up to `max_hops + 1`. A state is
/// kept only while its total degree can still descend to the largest target
/// degree in the hops left; this bound is exact, it never removes mass that
/// could arrive at a target.
class DualStateGraph {
 public:
  DualStateGraph(const AdjointOperator& op, const MultiIndex& source,
                 std::span<const MultiIndex> targets, int max_hops,
                 std::optional<std::uint64_t> degree_cap = std::nullopt,
                 std::size_t max_states = 2'000'000)
      : drop_(op.max_degree_drop()), max_hops_(max_hops) {
    if (max_hops < 0) throw ParameterError("max_hops must be non-negative");
    if (source.size() != op.dimension()) throw DimensionError("source dimension mismatch");
    for (const auto& t : targets) {
      if (t.size() != op.dimension()) throw DimensionError("target dimension mismatch");
      target_degree_ = std::max(target_degree_, t.total_degree());
    }

    // Breadth-first discovery with hop distance.
    std::unordered_map<MultiIndex, int, MultiIndexHash> dist;
    std::vector<MultiIndex> frontier;
    if (admissible(source, max_hops, degree_cap)) {
      dist.emplace(source, 0);
      frontier.push_back(source);
    }
    for (int hop = 1; hop <= max_hops && !frontier.empty(); ++hop) {
      std::vector<MultiIndex> next_frontier;
      for (const auto& n : frontier) {
        for (auto& tr : op.successors(n)) {
          if (dist.contains(tr.target)) continue;
          if (!admissible(tr.target, max_hops - hop, degree_cap)) continue;
          dist.emplace(tr.target, hop);
          next_frontier.push_back(std::move(tr.target));
          if (dist.size() > max_states) throw StateExplosion(max_states);
        }
      }
      frontier = std::move(next_frontier);
    }

    states_.reserve(dist.size());
    for (auto& [n, d] : dist) states_.push_back(n);
    std::sort(states_.begin(), states_.end(), GradedLexLess{});
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> index;
    index.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index.emplace(states_[i], i);

    degree_.resize(states_.size());
    diagonal_.assign(states_.size(), 0.0);
    row_start_.assign(states_.size() + 1, 0);
    for (std::size_t i = 0; i < states_.size(); ++i) {
      degree_[i] = states_[i].total_degree();
      for (const auto& tr : op.successors(states_[i])) {
        if (tr.target == states_[i]) {
          diagonal_[i] = tr.rate;
          continue;
        }
        auto it = index.find(tr.target);
        if (it == index.end()) continue;
        edge_target_.push_back(it->second);
        edge_rate_.push_back(tr.rate);
      }
      row_start_[i + 1] = edge_target_.size();
    }
  }

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<MultiIndex>& states() const noexcept { return states_; }
  int max_hops() const noexcept { return max_hops_; }

  std::optional<std::size_t> find(const MultiIndex& n) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), n, GradedLexLess{});
    if (it == states_.end() || !(*it == n)) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
  }

  struct PathSums {
    std::vector<double> weights;    ///< accumulated mass per graph state after all hops
    std::size_t max_layer_size = 0; ///< largest number of states carrying mass at once
  };

  /// Sum over all chains source -> ... of `hops` hops of the hop weights at step h = T/M.
  PathSums propagate(const MultiIndex& source, double T, int M, int hops,
                     double prune_threshold = 0.0) const {
    if (hops > max_hops_) throw ParameterError("graph was built for fewer hops");
    if (M < 1) throw ParameterError("M must be positive");
    const double h = T / M;
    PathSums out;
    out.weights.assign(states_.size(), 0.0);
    auto src = find(source);
    if (!src) return out;

    std::vector<double> inv_den(states_.size());
    std::vector<char> checked(states_.size(), 0);
    auto inverse_denominator = [&](std::size_t s) {
      if (!checked[s]) {
        inv_den[s] = 1.0 / detail::resolvent_denominator(h, diagonal_[s], states_[s]);
        checked[s] = 1;
      }
      return inv_den[s];
    };

    std::vector<double>& cur = out.weights;
    std::vector<double> next(states_.size(), 0.0);
    cur[*src] = 1.0;
    out.max_layer_size = 1;
    for (int hop = 0; hop < hops; ++hop) {
      const std::uint64_t limit = target_degree_ + drop_ * static_cast<std::uint64_t>(hops - 1 - hop);
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t s = 0; s < states_.size(); ++s) {
        const double w = cur[s];
        if (w == 0.0) continue;
        const double inv = inverse_denominator(s);
        if (degree_[s] <= limit) next[s] += w * inv;
        const double scale = w * h * inv * inv;
        for (std::size_t e = row_start_[s]; e < row_start_[s + 1]; ++e) {
          const std::size_t t = edge_target_[e];
          if (degree_[t] <= limit) next[t] += scale * edge_rate_[e];
        }
      }
      std::size_t active = 0;
      for (double& w : next) {
        if (w != 0.0 && std::abs(w) < prune_threshold) w = 0.0;
        if (w != 0.0) ++active;
      }
      out.max_layer_size = std::max(out.max_layer_size, active);
      std::swap(cur, next);
    }
    return out;
  }

 private:
  bool admissible(const MultiIndex& n, int hops_left, std::optional<std::uint64_t> cap) const {
    const std::uint64_t deg = n.total_degree();
    if (cap && deg > *cap) return false;
    return deg <= target_degree_ + drop_ * static_cast<std::uint64_t>(hops_left);
  }

  std::uint64_t drop_ = 0;
  std::uint64_t target_degree_ = 0;
  int max_hops_ = 0;
  std::vector<MultiIndex> states_;
  std::vector<std::uint64_t> degree_;
  std::vector<double> diagonal_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> edge_target_;
  std::vector<double> edge_rate_;
};

namespace detail {

inline double boundary_corrected(const AdjointOperator& op, const MultiIndex& s_i,
                                 const MultiIndex& s_f, double T, int M, double path_sum) {
  const double h = T / M;
  const double head = detail::resolvent_denominator(h, op.diagonal(s_i), s_i);
  const double tail = detail::resolvent_denominator(h, op.diagonal(s_f), s_f);
  return head * path_sum / tail;
}

}  // namespace detail

/// Approximate [exp(L T)]_{s_f s_i} from a chain of M-1 resolvent hops:
/// (1 - h L_ii) * sum_paths prod hop_weight * (1 - h L_ff)^{-1}, h = T/M.
inline double element_at_M(const AdjointOperator& op, const MultiIndex& s_i, const MultiIndex& s_f,
                           double T, int M, const ResolventParams& params = {}) {
  if (M < 2) throw ParameterError("M must be at least 2");
  if (!(T > 0.0)) throw ParameterError("T must be positive");
  const MultiIndex targets[] = {s_f};
  const DualStateGraph graph(op, s_i, targets, M - 1, params.degree_cap, params.max_states);
  const auto sums = graph.propagate(s_i, T, M, M - 1, params.prune_threshold);
  const auto idx = graph.find(s_f);
  const double s = idx ? sums.weights[*idx] : 0.0;
  return detail::boundary_corrected(op, s_i, s_f, T, M, s);
}

/// Estimates for M = m_min+1 .. m_max for every target, sharing one state graph.
inline std::vector<Sequence> element_sequences(const AdjointOperator& op, const MultiIndex& s_i,
                                               std::span<const MultiIndex> targets,
                                               const ResolventParams& params) {
  params.validate();
  const DualStateGraph graph(op, s_i, targets, params.m_max - 1, params.degree_cap,
                             params.max_states);
  std::vector<std::optional<std::size_t>> idx;
  for (const auto& t : targets) idx.push_back(graph.find(t));
  std::vector<Sequence> out(targets.size());
  for (int M = params.m_min + 1; M <= params.m_max; ++M) {
    const auto sums = graph.propagate(s_i, params.T, M, M - 1, params.prune_threshold);
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const double s = idx[j] ? sums.weights[*idx[j]] : 0.0;
      out[j].push_back({M, detail::boundary_corrected(op, s_i, targets[j], params.T, M, s)});
    }
  }
  return out;
}

inline Sequence element_sequence(const AdjointOperator& op, const MultiIndex& s_i,
                                 const MultiIndex& s_f, const ResolventParams& params) {
  const MultiIndex targets[] = {s_f};
  return std::move(element_sequences(op, s_i, targets, params).front());
}

/// Truncated series sum_{j<=order} T^j/j! (L)^j |n_ini>, keyed by final state.
///
/// Diverges for unbounded generators as the order grows; only meant as a
/// small-T cross-check.
inline std::map<MultiIndex, double, GradedLexLess> taylor_path_sum(const AdjointOperator& op,
                                                                    const MultiIndex& n_ini,
                                                                    double T, int order) {
  if (order < 0) throw ParameterError("truncation order must be non-negative");
  if (n_ini.size() != op.dimension()) throw DimensionError("initial state dimension mismatch");
  std::map<MultiIndex, double, GradedLexLess> total{{n_ini, 1.0}};
  std::map<MultiIndex, double, GradedLexLess> layer{{n_ini, 1.0}};
  for (int j = 1; j <= order; ++j) {
    std::map<MultiIndex, double, GradedLexLess> next;
    for (const auto& [n, w] : layer) {
      for (const auto& tr : op.successors(n)) next[tr.target] += w * tr.rate * T / j;
    }
    for (const auto& [n, w] : next) total[n] += w;
    layer = std::move(next);
  }
  return total;
}

}  // namespace koopman

#endif  // KOOPMAN_RESOLVENT_HPP_
