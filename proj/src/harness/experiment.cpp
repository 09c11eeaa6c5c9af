// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bcdb/harness/harness.hpp"
#include "bcdb/pipeline/pipeline.hpp"
#include "bcdb/sharding/sharding.hpp"

namespace bcdb {

namespace {

ExperimentOutput run_point(const DesignConfig& cfg, const WorkloadSpec& spec, const Arrival& arrival,
                           std::uint64_t seed, bool record_trace) {
  RunOptions run;
  run.seed = seed;
  run.arrival = arrival;
  run.record_trace = record_trace;
  ExperimentOutput out;
  if (cfg.sharding_mode.mode != ShardingMode::None) {
    ShardedRunOptions opts;
    opts.run = run;
    auto r = run_sharded(cfg, spec, opts);
    out.metrics = std::move(r.run.metrics);
    out.trace = std::move(r.run.trace);
  } else {
    auto r = run_pipeline(cfg, spec, run);
    out.metrics = std::move(r.metrics);
    out.trace = std::move(r.trace);
  }
  return out;
}

}  // namespace

Metrics run_experiment(const DesignConfig& cfg, const WorkloadSpec& spec, const Arrival& arrival,
                       std::uint64_t seed) {
  return run_point(cfg, spec, arrival, seed, false).metrics;
}

ExperimentOutput run_experiment_traced(const DesignConfig& cfg, const WorkloadSpec& spec, const Arrival& arrival,
                                       std::uint64_t seed) {
  return run_point(cfg, spec, arrival, seed, true);
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Labels and error text are free-form; keep them to one field.
std::string field_safe(std::string s) {
  for (auto& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

std::uint64_t count(const Metrics& m, Outcome o) {
  auto it = m.aborts.find(o);
  return it == m.aborts.end() ? 0 : it->second;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "label",
      "seed",
      "replication_model",
      "replication_approach",
      "failure_model",
      "concurrency_mode",
      "ledger_enabled",
      "index",
      "node_count",
      "tolerated_failures",
      "sharding_mode",
      "workload",
      "record_count",
      "record_size_bytes",
      "theta",
      "ops_per_txn",
      "txn_count",
      "arrival",
      "arrival_rate",
      "clients",
      "submitted",
      "committed",
      "aborted",
      "aborted_rw",
      "aborted_ww",
      "aborted_inconsistent_read",
      "aborted_blocked",
      "aborted_application",
      "dropped",
      "pending",
      "span_ticks",
      "throughput_tps",
      "latency_mean",
      "latency_p50",
      "latency_p95",
      "latency_p99",
      "phase_execute",
      "phase_order",
      "phase_validate_commit",
      "messages",
      "messages_per_commit",
      "state_bytes",
      "block_bytes",
      "index_bytes",
      "stalled",
      "error",
      "shard_count",
      "cross_shard_ratio",
      "blocked_count",
      "reconfig_interval",
  };
  return cols;
}

std::vector<std::string> csv_fields(const ResultRow& row) {
  const auto& c = row.cfg;
  const auto& s = row.spec;
  const auto& m = row.metrics;
  std::vector<std::string> f;
  f.reserve(csv_columns().size());
  f.push_back(field_safe(row.label));
  f.push_back(std::to_string(row.seed));
  f.emplace_back(to_string(c.replication_model));
  f.emplace_back(to_string(c.replication_approach));
  f.emplace_back(to_string(c.failure_model));
  f.emplace_back(to_string(c.concurrency_mode));
  f.push_back(c.storage_mode.ledger_enabled ? "1" : "0");
  f.emplace_back(to_string(c.storage_mode.index));
  f.push_back(std::to_string(c.node_count));
  f.push_back(std::to_string(c.tolerated_failures));
  f.emplace_back(to_string(c.sharding_mode.mode));
  f.emplace_back(to_string(s.kind));
  f.push_back(std::to_string(s.record_count));
  f.push_back(std::to_string(s.effective_record_size()));
  f.push_back(fixed(s.theta));
  f.push_back(std::to_string(s.ops_per_txn));
  f.push_back(std::to_string(s.txn_count));
  f.emplace_back(to_string(s.arrival.mode));
  f.push_back(fixed(s.arrival.rate));
  f.push_back(std::to_string(s.arrival.clients));
  f.push_back(std::to_string(m.submitted));
  f.push_back(std::to_string(m.committed_count));
  f.push_back(std::to_string(m.aborted()));
  f.push_back(std::to_string(count(m, Outcome::AbortedRW)));
  f.push_back(std::to_string(count(m, Outcome::AbortedWW)));
  f.push_back(std::to_string(count(m, Outcome::AbortedInconsistentRead)));
  f.push_back(std::to_string(count(m, Outcome::AbortedBlocked)));
  f.push_back(std::to_string(count(m, Outcome::AbortedApplication)));
  f.push_back(std::to_string(m.dropped));
  f.push_back(std::to_string(m.pending));
  f.push_back(std::to_string(m.span));
  f.push_back(fixed(m.throughput));
  f.push_back(fixed(m.latency_mean));
  f.push_back(fixed(m.latency_p50));
  f.push_back(fixed(m.latency_p95));
  f.push_back(fixed(m.latency_p99));
  f.push_back(fixed(m.phase_means.execute));
  f.push_back(fixed(m.phase_means.order));
  f.push_back(fixed(m.phase_means.validate_commit));
  f.push_back(std::to_string(m.messages));
  f.push_back(fixed(m.messages_per_commit));
  f.push_back(std::to_string(m.storage.state_bytes));
  f.push_back(std::to_string(m.storage.block_bytes));
  f.push_back(std::to_string(m.storage.index_bytes));
  f.push_back(m.stalled ? "1" : "0");
  f.push_back(field_safe(row.error));
  f.push_back(std::to_string(m.shards.shard_count));
  f.push_back(fixed(m.shards.cross_shard_ratio));
  f.push_back(std::to_string(m.shards.blocked_count));
  f.push_back(m.shards.reconfig_interval ? std::to_string(*m.shards.reconfig_interval) : "");
  return f;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  line(csv_columns());
  for (const auto& r : rows) line(csv_fields(r));
}

std::string csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) { write_file(path, csv_text(rows)); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (header) {
      if (fields != csv_columns()) throw ConfigError("csv header does not match the expected columns");
      header = false;
      continue;
    }
    if (fields.size() != csv_columns().size()) {
      throw ConfigError("csv row " + std::to_string(rows.size() + 1) + " has " + std::to_string(fields.size()) +
                        " fields");
    }
    rows.push_back(std::move(fields));
  }
  if (header) throw ConfigError("csv is empty");
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": " + std::strerror(errno));
  out << content;
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace bcdb
