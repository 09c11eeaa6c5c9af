// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/core/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>

namespace bcdb {

std::string_view to_string(ReplicationModel v) {
  return v == ReplicationModel::TransactionBased ? "transactionbased" : "storagebased";
}

std::string_view to_string(ReplicationApproach v) {
  switch (v) {
    case ReplicationApproach::Consensus: return "consensus";
    case ReplicationApproach::SharedLog: return "sharedlog";
    case ReplicationApproach::PrimaryBackup: return "primarybackup";
  }
  return "?";
}

std::string_view to_string(FailureModel v) { return v == FailureModel::CFT ? "cft" : "bft"; }

std::string_view to_string(ConcurrencyMode v) {
  switch (v) {
    case ConcurrencyMode::Serial: return "serial";
    case ConcurrencyMode::OrderExecute: return "orderexecute";
    case ConcurrencyMode::ExecuteOrderValidate: return "executeordervalidate";
    case ConcurrencyMode::ConcurrentOCC: return "concurrentocc";
    case ConcurrencyMode::ConcurrentLocking: return "concurrentlocking";
  }
  return "?";
}

std::string_view to_string(IndexKind v) {
  switch (v) {
    case IndexKind::Plain: return "plain";
    case IndexKind::MPT: return "mpt";
    case IndexKind::MBT: return "mbt";
  }
  return "?";
}

std::string_view to_string(ShardingMode v) {
  switch (v) {
    case ShardingMode::None: return "none";
    case ShardingMode::Trusted2PC: return "trusted2pc";
    case ShardingMode::BftCoordinated2PC: return "bftcoordinated2pc";
  }
  return "?";
}

std::string_view to_string(ShardScheme v) { return v == ShardScheme::Hash ? "hash" : "range"; }

VirtualTime CostModel::hash_cost(std::uint64_t bytes) const {
  return hash_time_base + static_cast<VirtualTime>(std::ceil(static_cast<double>(bytes) * hash_time_per_byte));
}

std::vector<Violation> validate_config(const DesignConfig& cfg) {
  std::vector<Violation> out;
  const auto n = static_cast<std::uint64_t>(cfg.node_count);
  const auto f = static_cast<std::uint64_t>(cfg.tolerated_failures);
  if (n < 1) out.push_back({"node_count", "N must be positive"});
  if (cfg.failure_model == FailureModel::CFT && n < 2 * f + 1) {
    out.push_back({"tolerated_failures", "N < 2f+1"});
  }
  if (cfg.failure_model == FailureModel::BFT && n < 3 * f + 1) {
    out.push_back({"tolerated_failures", "N < 3f+1"});
  }

  const bool txn_pipeline = cfg.concurrency_mode == ConcurrencyMode::OrderExecute ||
                            cfg.concurrency_mode == ConcurrencyMode::ExecuteOrderValidate ||
                            cfg.concurrency_mode == ConcurrencyMode::Serial;
  const bool storage_pipeline = cfg.concurrency_mode == ConcurrencyMode::ConcurrentOCC ||
                                cfg.concurrency_mode == ConcurrencyMode::ConcurrentLocking;
  if (txn_pipeline && cfg.replication_model != ReplicationModel::TransactionBased) {
    // Serial is also allowed under storage-based replication (one txn at a time).
    if (cfg.concurrency_mode != ConcurrencyMode::Serial) {
      out.push_back({"concurrency_mode", "pipeline/model mismatch"});
    }
  }
  if (storage_pipeline && cfg.replication_model != ReplicationModel::StorageBased) {
    out.push_back({"concurrency_mode", "pipeline/model mismatch"});
  }

  const auto& c = cfg.cost_model;
  auto non_negative = [&](std::string_view name, double v) {
    if (v < 0) out.push_back({"cost_model." + std::string(name), "must be non-negative"});
  };
  non_negative("net_latency_min", static_cast<double>(c.net_latency_min));
  non_negative("net_latency_mean", static_cast<double>(c.net_latency_mean));
  non_negative("exec_time_per_op", static_cast<double>(c.exec_time_per_op));
  non_negative("hash_time_base", static_cast<double>(c.hash_time_base));
  non_negative("hash_time_per_byte", c.hash_time_per_byte);
  non_negative("sig_verify_time", static_cast<double>(c.sig_verify_time));
  non_negative("block_timeout", static_cast<double>(c.block_timeout));
  non_negative("reconfig_pause", static_cast<double>(c.reconfig_pause));
  non_negative("endorsement_timeout", static_cast<double>(c.endorsement_timeout));
  non_negative("lock_wait_timeout", static_cast<double>(c.lock_wait_timeout));
  non_negative("shared_log_service_time", static_cast<double>(c.shared_log_service_time));
  if (c.net_latency_mean < c.net_latency_min) {
    out.push_back({"cost_model.net_latency_mean", "mean must be >= min"});
  }
  if (c.block_size_limit < 1) out.push_back({"cost_model.block_size_limit", "must be >= 1"});
  if (!std::isfinite(c.hash_time_per_byte)) {
    out.push_back({"cost_model.hash_time_per_byte", "must be finite"});
  }

  const auto& s = cfg.sharding_mode;
  if (s.shard_count < 1) out.push_back({"sharding_mode.shard_count", "must be >= 1"});
  if (s.nodes_per_shard < 1) out.push_back({"sharding_mode.nodes_per_shard", "must be >= 1"});
  if (s.mode == ShardingMode::None && s.shard_count > 1) {
    out.push_back({"sharding_mode.shard_count", "several shards need a 2PC mode"});
  }
  if (s.mode != ShardingMode::None && cfg.failure_model == FailureModel::BFT && s.nodes_per_shard < 4) {
    out.push_back({"sharding_mode.nodes_per_shard", "BFT shards need at least 4 nodes"});
  }
  if (s.reconfiguration_interval && *s.reconfiguration_interval <= 0) {
    out.push_back({"sharding_mode.reconfiguration_interval", "must be positive or disabled"});
  }
  if (cfg.endorsement_quorum > cfg.node_count) {
    out.push_back({"endorsement_quorum", "exceeds node_count"});
  }
  return out;
}

void require_valid(const DesignConfig& cfg) {
  auto violations = validate_config(cfg);
  if (violations.empty()) return;
  std::string msg = "invalid design config:";
  for (const auto& v : violations) msg += " [" + v.field + ": " + v.message + "]";
  throw ConfigError(msg);
}

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, FlatConfig& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      flatten_json(v, key, out);
    } else if (v.is_string()) {
      out[key] = v.get<std::string>();
    } else if (v.is_boolean()) {
      out[key] = v.get<bool>() ? "true" : "false";
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
      out[key] = v.dump();
    } else if (v.is_number_float()) {
      out[key] = format_double(v.get<double>());
    } else if (v.is_null()) {
      out[key] = "disabled";
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) {
        if (!joined.empty()) joined += ",";
        joined += e.is_string() ? e.get<std::string>() : (e.is_number_float() ? format_double(e.get<double>()) : e.dump());
      }
      out[key] = joined;
    }
  }
}

template <typename E, std::size_t N>
E parse_enum(const std::string& key, const std::string& value, const std::array<E, N>& options) {
  auto norm = normalize_enum(value);
  for (auto e : options) {
    if (normalize_enum(to_string(e)) == norm) return e;
  }
  throw ConfigError("invalid value '" + value + "' for " + key);
}

struct Field {
  std::string_view key;
  std::function<void(DesignConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const DesignConfig&)> get;
};

template <typename T>
std::string str(T v) {
  return std::to_string(v);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back({"replication_model",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.replication_model = parse_enum(
                       k, v, std::array{ReplicationModel::TransactionBased, ReplicationModel::StorageBased});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.replication_model)); }});
    t.push_back({"replication_approach",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.replication_approach =
                       parse_enum(k, v,
                                  std::array{ReplicationApproach::Consensus, ReplicationApproach::SharedLog,
                                             ReplicationApproach::PrimaryBackup});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.replication_approach)); }});
    t.push_back({"failure_model",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.failure_model = parse_enum(k, v, std::array{FailureModel::CFT, FailureModel::BFT});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.failure_model)); }});
    t.push_back({"concurrency_mode",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.concurrency_mode = parse_enum(
                       k, v,
                       std::array{ConcurrencyMode::Serial, ConcurrencyMode::OrderExecute,
                                  ConcurrencyMode::ExecuteOrderValidate, ConcurrencyMode::ConcurrentOCC,
                                  ConcurrencyMode::ConcurrentLocking});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.concurrency_mode)); }});
    t.push_back({"node_count",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.node_count = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.node_count); }});
    t.push_back({"tolerated_failures",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.tolerated_failures = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.tolerated_failures); }});
    t.push_back({"endorsement_quorum",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.endorsement_quorum = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.endorsement_quorum); }});
    t.push_back({"storage_mode.ledger_enabled",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.storage_mode.ledger_enabled = parse_bool(k, v);
                 },
                 [](const DesignConfig& c) { return std::string(c.storage_mode.ledger_enabled ? "true" : "false"); }});
    t.push_back({"storage_mode.index",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.storage_mode.index = parse_enum(k, v, std::array{IndexKind::Plain, IndexKind::MPT, IndexKind::MBT});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.storage_mode.index)); }});
    t.push_back({"sharding_mode.mode",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.sharding_mode.mode = parse_enum(
                       k, v,
                       std::array{ShardingMode::None, ShardingMode::Trusted2PC, ShardingMode::BftCoordinated2PC});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.sharding_mode.mode)); }});
    t.push_back({"sharding_mode.reconfiguration_interval",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   auto norm = normalize_enum(v);
                   if (norm == "disabled" || norm == "none" || norm == "off") {
                     c.sharding_mode.reconfiguration_interval.reset();
                   } else {
                     c.sharding_mode.reconfiguration_interval = parse_i64(k, v);
                   }
                 },
                 [](const DesignConfig& c) {
                   return c.sharding_mode.reconfiguration_interval ? str(*c.sharding_mode.reconfiguration_interval)
                                                                   : std::string("disabled");
                 }});
    t.push_back({"sharding_mode.shard_count",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.sharding_mode.shard_count = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.sharding_mode.shard_count); }});
    t.push_back({"sharding_mode.nodes_per_shard",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.sharding_mode.nodes_per_shard = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.sharding_mode.nodes_per_shard); }});
    t.push_back({"sharding_mode.scheme",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.sharding_mode.scheme = parse_enum(k, v, std::array{ShardScheme::Hash, ShardScheme::Range});
                 },
                 [](const DesignConfig& c) { return std::string(to_string(c.sharding_mode.scheme)); }});

    auto time_field = [&t](std::string_view key, VirtualTime CostModel::*member) {
      t.push_back({key,
                   [member](DesignConfig& c, const std::string& k, const std::string& v) {
                     c.cost_model.*member = parse_i64(k, v);
                   },
                   [member](const DesignConfig& c) { return str(c.cost_model.*member); }});
    };
    time_field("cost_model.net_latency_min", &CostModel::net_latency_min);
    time_field("cost_model.net_latency_mean", &CostModel::net_latency_mean);
    time_field("cost_model.exec_time_per_op", &CostModel::exec_time_per_op);
    time_field("cost_model.hash_time_base", &CostModel::hash_time_base);
    t.push_back({"cost_model.hash_time_per_byte",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.cost_model.hash_time_per_byte = parse_double(k, v);
                 },
                 [](const DesignConfig& c) { return format_double(c.cost_model.hash_time_per_byte); }});
    time_field("cost_model.sig_verify_time", &CostModel::sig_verify_time);
    t.push_back({"cost_model.block_size_limit",
                 [](DesignConfig& c, const std::string& k, const std::string& v) {
                   c.cost_model.block_size_limit = static_cast<std::uint32_t>(parse_u64(k, v));
                 },
                 [](const DesignConfig& c) { return str(c.cost_model.block_size_limit); }});
    time_field("cost_model.block_timeout", &CostModel::block_timeout);
    time_field("cost_model.reconfig_pause", &CostModel::reconfig_pause);
    time_field("cost_model.endorsement_timeout", &CostModel::endorsement_timeout);
    time_field("cost_model.lock_wait_timeout", &CostModel::lock_wait_timeout);
    time_field("cost_model.shared_log_service_time", &CostModel::shared_log_service_time);
    return t;
  }();
  return table;
}

}  // namespace

std::string normalize_enum(std::string_view value) {
  std::string out;
  for (char ch : value) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool parse_bool(const std::string& key, const std::string& value) {
  auto norm = normalize_enum(value);
  if (norm == "true" || norm == "1" || norm == "yes" || norm == "on") return true;
  if (norm == "false" || norm == "0" || norm == "no" || norm == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto s = trim(value);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("invalid unsigned integer '" + value + "' for " + key);
  }
  return out;
}

std::int64_t parse_i64(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  auto s = trim(value);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("invalid integer '" + value + "' for " + key);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  auto s = trim(value);
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double out = 0;
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError("invalid number '" + value + "' for " + key);
  return out;
}

FlatConfig parse_kv_text(std::string_view text) {
  FlatConfig out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    auto full = section.empty() ? key : section + "." + key;
    if (out.contains(full)) throw ConfigError("duplicate key " + full);
    out[full] = value;
  }
  return out;
}

FlatConfig parse_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  FlatConfig out;
  flatten_json(j, "", out);
  return out;
}

FlatConfig parse_config_text(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json_text(text);
  return parse_kv_text(text);
}

FlatConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return parse_config_text(ss.str());
}

bool is_design_config_key(const std::string& key) {
  return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.key == key; });
}

void apply_field(DesignConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key: " + key);
}

DesignConfig design_config_from(const FlatConfig& flat) {
  DesignConfig cfg;
  for (const auto& [k, v] : flat) apply_field(cfg, k, v);
  return cfg;
}

FlatConfig to_flat(const DesignConfig& cfg) {
  FlatConfig out;
  for (const auto& f : fields()) out[std::string(f.key)] = f.get(cfg);
  return out;
}

std::string to_kv_text(const FlatConfig& flat) {
  std::ostringstream out;
  for (const auto& [k, v] : flat) {
    if (k.find('.') == std::string::npos) out << k << " = " << v << "\n";
  }
  std::string section;
  for (const auto& [k, v] : flat) {
    auto dot = k.rfind('.');
    if (dot == std::string::npos) continue;
    auto sec = k.substr(0, dot);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << k.substr(dot + 1) << " = " << v << "\n";
  }
  return out.str();
}

}  // namespace bcdb
