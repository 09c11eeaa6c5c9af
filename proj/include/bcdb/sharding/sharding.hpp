// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcdb/core/config.hpp"
#include "bcdb/pipeline/pipeline.hpp"

namespace bcdb {

/// Key partitioning plus the node-to-shard assignment of the current epoch.
struct ShardMap {
  std::uint32_t shard_count = 1;
  ShardScheme scheme = ShardScheme::Hash;
  std::uint64_t epoch = 0;
  /// Range scheme: first key of shards 1..shard_count-1, ascending. Shard 0
  /// takes everything below the first bound.
  std::vector<Key> range_bounds;
  /// Node slots (0..shard_count*nodes_per_shard-1) serving each shard.
  std::vector<std::vector<std::uint32_t>> members;
  std::uint64_t seed = 0;

  /// Even split of the workload's key space for the range scheme; members
  /// drawn by a seeded permutation of the node pool.
  static ShardMap make(const ShardingConfig& cfg, std::uint64_t record_count, std::uint64_t seed);
  bool operator==(const ShardMap&) const = default;
};

std::uint32_t assign_shard(const Key& key, const ShardMap& map);

/// Next epoch: same key map, node slots reshuffled by a permutation seeded
/// from (seed, epoch). Throws std::invalid_argument unless
/// next_epoch == map.epoch + 1.
ShardMap reconfigure(const ShardMap& map, std::uint64_t next_epoch);

/// Sorted distinct shards a transaction touches.
std::vector<std::uint32_t> shards_of(const Transaction& txn, const ShardMap& map);

/// Fraction of transactions touching two or more shards.
double cross_shard_ratio(const std::vector<Transaction>& txns, const ShardMap& map);
/// The ratio recorded by a sharded run.
double cross_shard_ratio(const Metrics& m);

enum class Vote { Yes, No, Missing };
enum class Decision { Commit, Abort, Blocked };
std::string_view to_string(Vote v);
std::string_view to_string(Decision d);

/// All Yes commits, any No aborts, otherwise undecided.
std::optional<Decision> decide(const std::map<std::uint32_t, Vote>& votes);

struct TwoPcRecord {
  std::uint64_t txn_id = 0;
  /// Trusted mode: the coordinator node; BFT mode: the coordinator shard
  /// id (shard_count).
  std::uint32_t coordinator = 0;
  bool bft_coordinator = false;
  std::vector<std::uint32_t> participants;
  std::map<std::uint32_t, Vote> votes;
  std::optional<Decision> decision;  // unset while in flight
  /// Shards holding locks for a Blocked record.
  std::vector<std::uint32_t> stuck_shards;
};

/// Checks the decision rules: Commit needs every vote Yes, a No forces
/// Abort, Blocked only under a trusted coordinator.
bool well_formed(const TwoPcRecord& rec);

struct ShardedRunOptions {
  RunOptions run;
  /// Faults on the coordinator by replica index: index 0 is the single
  /// trusted coordinator or the first replica of the BFT coordinator
  /// shard, so the same schedule applies to both modes.
  std::vector<NodeFault> coordinator_faults;
  /// (txn id, shard) pairs whose participant votes No regardless of its
  /// state. Fault injection for tests.
  std::set<std::pair<std::uint64_t, std::uint32_t>> vetoes;
};

struct ShardedRunResult {
  RunResult run;  // state_digests/healthy are flattened shard by shard
  ShardMap map;   // final epoch
  std::vector<TwoPcRecord> records;  // cross-shard transactions only
  /// Per shard, per replica: ids of the transactions applied there.
  std::vector<std::vector<std::set<std::uint64_t>>> applied;
  std::vector<std::vector<Digest>> shard_digests;
  /// Committed map of each shard's first healthy replica.
  std::vector<VersionedKV> shard_states;
  std::vector<std::vector<bool>> shard_healthy;
  /// Messages over committed cross-shard transactions.
  double messages_per_cross_shard_commit = 0;
};

/// Runs a sharded design: every shard is a replication group over its own
/// key range; single-shard transactions commit inside their shard and
/// cross-shard ones go through two-phase commit under the configured
/// coordinator. Throws ConfigError for an unsharded or invalid config.
ShardedRunResult run_sharded(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                             const ShardedRunOptions& opts);
ShardedRunResult run_sharded(const DesignConfig& cfg, const WorkloadSpec& spec, const ShardedRunOptions& opts);

struct AtomicityReport {
  bool ok = true;
  std::string detail;
  std::uint64_t checked = 0;  // cross-shard records with a final decision
};

/// State scan: every decided cross-shard transaction is applied at every
/// healthy replica of each participant shard (Commit) or at none (Abort).
/// Blocked records are skipped.
AtomicityReport check_atomicity(const ShardedRunResult& r);

}  // namespace bcdb
