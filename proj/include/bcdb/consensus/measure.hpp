// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

struct MessageCount {
  std::uint64_t commits = 0;
  /// Network messages delivered, counted from the simulator trace.
  std::uint64_t messages = 0;
  /// Messages sent by the group; can exceed `messages` by those still in
  /// flight when the last entry committed.
  std::uint64_t sent = 0;
  double per_commit() const { return commits == 0 ? 0.0 : static_cast<double>(messages) / commits; }
};

/// Runs `entries` sequential proposals through a fault-free group of `n`
/// replicas and counts the protocol messages exchanged after the group
/// has settled (leader election traffic excluded).
MessageCount messages_per_commit(ReplicationApproach approach, FailureModel model, std::uint32_t n,
                                 std::uint32_t entries = 50, std::uint64_t seed = 1);

}  // namespace bcdb
