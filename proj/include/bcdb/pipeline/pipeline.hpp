// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcdb/core/config.hpp"
#include "bcdb/pipeline/execute.hpp"
#include "bcdb/pipeline/metrics.hpp"
#include "bcdb/simnet/simulator.hpp"
#include "bcdb/workload/workload.hpp"

namespace bcdb {

struct RunOptions {
  /// Seeds the simulator (network latency draws, election timers).
  std::uint64_t seed = 1;
  /// Overrides the workload's arrival mode when set.
  std::optional<Arrival> arrival;
  /// Hard virtual-time budget.
  VirtualTime horizon = 600 * kTicksPerSecond;
  /// A run with outstanding work and no transaction finishing for this
  /// long is cut short and flagged as stalled.
  VirtualTime stall_window = 5 * kTicksPerSecond;
  /// Faults by replica index (0..N-1), at absolute virtual times.
  std::vector<NodeFault> faults;
  bool record_trace = false;
};

struct RunResult {
  Metrics metrics;
  std::vector<Transaction> txns;  // with timestamps and outcomes
  std::vector<TxnTimeline> timelines;
  /// Per replica: digest of the committed key-value map, the index root
  /// (when authenticated) and whether the replica was healthy at the end.
  std::vector<Digest> state_digests;
  std::vector<std::optional<Digest>> index_roots;
  std::vector<bool> healthy;
  /// Order-execute only: executions of each transaction at the node that
  /// proposed its block (pre-execution plus commit).
  std::map<std::uint64_t, std::uint32_t> proposer_executions;
  /// Validation CPU, in total and the part spent on signature checks.
  VirtualTime validation_time = 0;
  VirtualTime signature_time = 0;
  /// Largest number of transactions executing at once (storage-based).
  std::uint32_t peak_concurrency = 0;
  /// Transaction-based pipelines: ids of each ordered block, in log order.
  std::vector<std::vector<std::uint64_t>> blocks;
  /// Result each transaction was validated or committed with: the
  /// endorsed one for execute-order-validate, the manager's execution for
  /// storage-based runs. Keyed by transaction id.
  std::map<std::uint64_t, Execution> executions;
  std::string trace;  // tab-separated, filled when record_trace is set
};

/// Digest of a committed key-value map: keys, values and versions.
Digest state_digest(const VersionedKV& kv);

/// Order-execute (and the transaction-based serial mode, which skips
/// pre-execution). Requires a transaction-based config.
RunResult run_order_execute(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                            const RunOptions& opts);
RunResult run_execute_order_validate(const DesignConfig& cfg, const WorkloadSpec& spec,
                                     std::vector<Transaction> txns, const RunOptions& opts);
/// `cc` is Serial, ConcurrentOCC or ConcurrentLocking.
RunResult run_storage_replicated(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                                 ConcurrencyMode cc, const RunOptions& opts);

/// Dispatches on the config's replication model and concurrency mode.
/// Throws ConfigError for an invalid config or workload.
RunResult run_pipeline(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                       const RunOptions& opts);
RunResult run_pipeline(const DesignConfig& cfg, const WorkloadSpec& spec, const RunOptions& opts);

struct LatencyBreakdown {
  PhaseTimings unsaturated;
  PhaseTimings saturated;
  /// "execute", "order" or "validate_commit": the phase whose mean grew most.
  std::string dominant_growth;
};

LatencyBreakdown latency_breakdown(const Metrics& unsaturated, const Metrics& saturated);

}  // namespace bcdb
