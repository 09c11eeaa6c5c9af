// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcdb/core/types.hpp"

namespace bcdb {

enum class ReplicationModel { TransactionBased, StorageBased };
enum class ReplicationApproach { Consensus, SharedLog, PrimaryBackup };
enum class FailureModel { CFT, BFT };
enum class ConcurrencyMode { Serial, OrderExecute, ExecuteOrderValidate, ConcurrentOCC, ConcurrentLocking };
enum class IndexKind { Plain, MPT, MBT };
enum class ShardingMode { None, Trusted2PC, BftCoordinated2PC };
enum class ShardScheme { Hash, Range };

std::string_view to_string(ReplicationModel v);
std::string_view to_string(ReplicationApproach v);
std::string_view to_string(FailureModel v);
std::string_view to_string(ConcurrencyMode v);
std::string_view to_string(IndexKind v);
std::string_view to_string(ShardingMode v);
std::string_view to_string(ShardScheme v);

/// Calibration knobs standing in for measured costs. All durations are in
/// virtual-time ticks.
struct CostModel {
  VirtualTime net_latency_min = 100;
  VirtualTime net_latency_mean = 250;
  VirtualTime exec_time_per_op = 50;
  VirtualTime hash_time_base = 1;
  double hash_time_per_byte = 0.1;
  VirtualTime sig_verify_time = 150;
  std::uint32_t block_size_limit = 100;
  VirtualTime block_timeout = 5'000;
  VirtualTime reconfig_pause = 20'000;
  // Timeouts and service times the pipelines need beyond the core knobs.
  VirtualTime endorsement_timeout = 200'000;
  VirtualTime lock_wait_timeout = 50'000;
  VirtualTime shared_log_service_time = 20;

  /// Cost of hashing `bytes` bytes once: base + ceil(bytes * per_byte).
  VirtualTime hash_cost(std::uint64_t bytes) const;

  bool operator==(const CostModel&) const = default;
};

struct StorageMode {
  bool ledger_enabled = false;
  IndexKind index = IndexKind::Plain;
  bool operator==(const StorageMode&) const = default;
};

struct ShardingConfig {
  ShardingMode mode = ShardingMode::None;
  /// Virtual time between reconfigurations; nullopt disables them.
  std::optional<VirtualTime> reconfiguration_interval;
  std::uint32_t shard_count = 1;
  std::uint32_t nodes_per_shard = 3;
  ShardScheme scheme = ShardScheme::Hash;
  bool operator==(const ShardingConfig&) const = default;
};

/// One point in the design space.
struct DesignConfig {
  ReplicationModel replication_model = ReplicationModel::TransactionBased;
  ReplicationApproach replication_approach = ReplicationApproach::Consensus;
  FailureModel failure_model = FailureModel::CFT;
  ConcurrencyMode concurrency_mode = ConcurrencyMode::OrderExecute;
  StorageMode storage_mode;
  ShardingConfig sharding_mode;
  std::uint32_t node_count = 5;
  std::uint32_t tolerated_failures = 1;
  /// Endorsers required per transaction in execute-order-validate; 0 means all peers.
  std::uint32_t endorsement_quorum = 0;
  CostModel cost_model;

  bool operator==(const DesignConfig&) const = default;
};

struct Violation {
  std::string field;
  std::string message;
  bool operator==(const Violation&) const = default;
};

/// Empty result means the config is valid; otherwise every violated
/// constraint is listed.
std::vector<Violation> validate_config(const DesignConfig& cfg);

/// Throws ConfigError listing all violations.
void require_valid(const DesignConfig& cfg);

/// Flattened `section.key -> value` view used by both file syntaxes.
using FlatConfig = std::map<std::string, std::string>;

/// Parses the plain-text form: `key = value` lines, `[section]` headers,
/// `#` or `;` comments.
FlatConfig parse_kv_text(std::string_view text);
/// Parses the JSON form; nested objects become dotted keys.
FlatConfig parse_json_text(std::string_view text);
/// Dispatches on the first non-blank character (`{` selects JSON).
FlatConfig parse_config_text(std::string_view text);
FlatConfig load_config_file(const std::string& path);

/// Applies one field. Throws ConfigError for unknown keys or bad values.
void apply_field(DesignConfig& cfg, const std::string& key, const std::string& value);
DesignConfig design_config_from(const FlatConfig& flat);
FlatConfig to_flat(const DesignConfig& cfg);
/// Renders the plain-text form; parsing it back yields an equal config.
std::string to_kv_text(const FlatConfig& flat);

bool is_design_config_key(const std::string& key);

// Shared value parsers for config-like files.
bool parse_bool(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
std::int64_t parse_i64(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
/// Lower-cases and drops `_`/`-` so `transaction_based` matches `transactionbased`.
std::string normalize_enum(std::string_view value);
std::string format_double(double v);

}  // namespace bcdb
