// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "bcdb/core/config.hpp"

namespace bcdb {

struct QuorumSpec {
  std::uint32_t n = 1;
  std::uint32_t f = 0;
  std::uint32_t quorum_size = 1;
  FailureModel model = FailureModel::CFT;
};

/// Failures tolerated by N replicas: floor((N-1)/2) for CFT, floor((N-1)/3) for BFT.
std::uint32_t max_tolerated_failures(std::uint32_t n, FailureModel model);

/// Majority for CFT; 2f+1 for BFT, where N must have the form 3f+1.
/// Throws std::invalid_argument otherwise (or when N is zero).
std::uint32_t quorum_size(std::uint32_t n, FailureModel model);

QuorumSpec make_quorum_spec(std::uint32_t n, FailureModel model);

/// Quorum the protocol engines use for any N. For BFT this is
/// ceil((N+f+1)/2), which equals 2f+1 when N = 3f+1 and keeps two quorums
/// overlapping in at least f+1 replicas for the other N.
std::uint32_t protocol_quorum(std::uint32_t n, FailureModel model);

/// Smallest possible overlap of two quorums of size q among n replicas.
constexpr std::uint32_t min_quorum_intersection(std::uint32_t n, std::uint32_t q) {
  return 2 * q > n ? 2 * q - n : 0;
}

}  // namespace bcdb
