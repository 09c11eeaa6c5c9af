// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

// Reference checks for pipeline runs. They replay recorded executions
// against a fresh store and compare with what the replicas ended up with.

#pragma once

#include <optional>
#include <string>

#include "bcdb/pipeline/pipeline.hpp"

namespace bcdb {

/// Store holding the workload's initial records, as every replica starts.
VersionedKV initial_state(const WorkloadSpec& spec);

/// Depth-first search over serial orders of `committed`: a transaction
/// can go next when every version it read is the current one; a complete
/// order must end in a state whose digest is `final_state`. Returns the
/// ids in the order found.
std::optional<std::vector<std::uint64_t>> find_serial_order(const VersionedKV& initial,
                                                            const std::map<std::uint64_t, Execution>& committed,
                                                            const Digest& final_state);

/// Serializability check for a storage-based run: the committed
/// executions must admit a serial order reaching replica 0's state.
bool committed_schedule_serializable(const WorkloadSpec& spec, const RunResult& r);

struct ReplayReport {
  bool ok = true;
  std::string detail;  // first mismatch
};

/// Execute-order-validate replay: walks the ordered blocks left to right,
/// re-derives each transaction's verdict from its endorsed read versions,
/// applies the survivors and compares verdicts and the final state with
/// every healthy replica.
ReplayReport replay_blocks(const WorkloadSpec& spec, const RunResult& r);

}  // namespace bcdb
