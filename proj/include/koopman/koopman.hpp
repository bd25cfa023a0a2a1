// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_KOOPMAN_HPP_
#define KOOPMAN_KOOPMAN_HPP_

#include "koopman/errors.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/polynomial.hpp"
#include "koopman/generator.hpp"
#include "koopman/sequence.hpp"
#include "koopman/resolvent.hpp"
#include "koopman/dense_oracle.hpp"
#include "koopman/extrapolation.hpp"
#include "koopman/koopman_matrix.hpp"
#include "koopman/edmd.hpp"
#include "koopman/simulator.hpp"
#include "koopman/model_io.hpp"

#endif  // KOOPMAN_KOOPMAN_HPP_
