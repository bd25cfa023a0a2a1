// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_SEQUENCE_HPP_
#define KOOPMAN_SEQUENCE_HPP_

#include <vector>

namespace koopman {

/// One estimate zeta_M of a sequence indexed by the number of resolvent factors M.
struct SequencePoint {
  int m = 0;
  double value = 0.0;

  friend bool operator==(const SequencePoint&, const SequencePoint&) = default;
};

using Sequence = std::vector<SequencePoint>;

}  // namespace koopman

#endif  // KOOPMAN_SEQUENCE_HPP_
