// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bcdb/authstore/store.hpp"
#include "bcdb/core/transaction.hpp"

namespace bcdb {

/// Per-transaction phase durations in ticks.
struct PhaseTimings {
  double execute = 0;
  double order = 0;
  double validate_commit = 0;
  bool operator==(const PhaseTimings&) const = default;
};

/// Phase boundaries of one transaction; a phase is absent when the
/// transaction never reached it.
struct TxnTimeline {
  std::optional<VirtualTime> executed;  // execution or endorsement finished
  std::optional<VirtualTime> ordered;   // consensus delivered it
};

struct ShardStats {
  std::uint32_t shard_count = 1;
  double cross_shard_ratio = 0;
  std::uint64_t cross_shard_txns = 0;
  std::uint64_t blocked_count = 0;
  std::optional<VirtualTime> reconfig_interval;
  std::uint64_t reconfigurations = 0;
  bool operator==(const ShardStats&) const = default;
};

struct Metrics {
  std::uint64_t submitted = 0;
  std::uint64_t committed_count = 0;
  std::map<Outcome, std::uint64_t> aborts;  // every terminal outcome except Committed and Dropped
  std::uint64_t dropped = 0;
  std::uint64_t pending = 0;
  /// First submission to last commit.
  VirtualTime span = 0;
  double throughput = 0;  // committed per virtual second
  double latency_mean = 0;
  double latency_p50 = 0;
  double latency_p95 = 0;
  double latency_p99 = 0;
  PhaseTimings phase_means;
  std::uint64_t messages = 0;
  double messages_per_commit = 0;
  StorageBreakdown storage;
  ShardStats shards;
  bool stalled = false;

  std::uint64_t aborted() const;
  std::uint64_t conflict_aborts() const;
  /// Aborts of any cause over submitted transactions.
  double abort_rate() const;
  /// submitted == committed + aborted + pending + dropped.
  bool accounting_holds() const;
};

/// Fills the transaction-derived fields (counts, span, latency, phases).
void summarize(Metrics& m, const std::vector<Transaction>& txns, const std::vector<TxnTimeline>& timelines);

/// Nearest-rank percentile, p in [0, 1], of an unsorted sample; 0 for an
/// empty sample.
double percentile(std::vector<double> sample, double p);

}  // namespace bcdb
