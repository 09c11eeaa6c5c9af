// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "bcdb/consensus/pbft.hpp"

namespace bcdb {

struct ExploreOptions {
  std::uint32_t n = 4;
  /// Index of the equivocating replica (the view-0 primary by default).
  std::uint32_t equivocator = 0;
  std::uint32_t requests = 1;
  /// Maximum actions (deliveries and timeouts) along any path.
  std::uint32_t max_depth = 10;
  /// Timeouts each honest replica may fire along one path.
  std::uint32_t max_timeouts_per_replica = 1;
  std::uint64_t max_states = 5'000'000;
};

struct ExploreResult {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t max_committed = 0;  // most slots any honest replica committed on some path
  bool truncated = false;           // hit max_states before finishing
  bool violation = false;
  std::string detail;
};

/// Depth-bounded exhaustive search over message interleavings of PBFT
/// replicas with one equivocator. Every reachable state (deduplicated by
/// fingerprint) is checked for two honest replicas committing different
/// batches at one sequence number.
ExploreResult explore_pbft(const ExploreOptions& options);

}  // namespace bcdb
