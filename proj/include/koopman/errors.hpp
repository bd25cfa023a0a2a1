// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_ERRORS_HPP_
#define KOOPMAN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace koopman {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions or out-of-range indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter values (non-positive horizons, too-short sequences, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// |1 - (T/M) [L]_ss| fell below the guard while evaluating a resolvent weight.
class SingularDenominator : public Error {
 public:
  using Error::Error;
};

/// The dual-process state graph grew beyond the configured bound.
class StateExplosion : public Error {
 public:
  explicit StateExplosion(std::size_t bound)
      : Error("dual state space exceeded " + std::to_string(bound) +
              " states; set a degree cap or a prune threshold") {}
};

/// Every singular value of the Gram matrix is below the pseudo-inverse threshold.
class DegenerateGram : public Error {
 public:
  using Error::Error;
};

/// A simulated path produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error("non-finite state at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed model file or command-line value. The message names the field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace koopman

#endif  // KOOPMAN_ERRORS_HPP_
