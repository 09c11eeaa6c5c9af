// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/pipeline.hpp"

#include "bcdb/core/digest.hpp"

namespace bcdb {

Digest state_digest(const VersionedKV& kv) {
  Encoder e;
  e.put_u64(kv.size());
  for (const auto& [k, v] : kv.entries()) {
    e.put_string(k);
    e.put_bytes(v.value);
    e.put_u64(v.version);
  }
  return digest(std::move(e).take());
}

RunResult run_pipeline(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                       const RunOptions& opts) {
  require_valid(cfg);
  auto bad = validate_workload(spec);
  if (!bad.empty()) throw ConfigError("invalid workload: " + bad.front().field + ": " + bad.front().message);
  if (cfg.replication_model == ReplicationModel::StorageBased) {
    return run_storage_replicated(cfg, spec, std::move(txns), cfg.concurrency_mode, opts);
  }
  if (cfg.concurrency_mode == ConcurrencyMode::ExecuteOrderValidate) {
    return run_execute_order_validate(cfg, spec, std::move(txns), opts);
  }
  return run_order_execute(cfg, spec, std::move(txns), opts);
}

RunResult run_pipeline(const DesignConfig& cfg, const WorkloadSpec& spec, const RunOptions& opts) {
  return run_pipeline(cfg, spec, generate(spec), opts);
}

LatencyBreakdown latency_breakdown(const Metrics& unsaturated, const Metrics& saturated) {
  LatencyBreakdown b{unsaturated.phase_means, saturated.phase_means, "execute"};
  const double de = saturated.phase_means.execute - unsaturated.phase_means.execute;
  const double dord = saturated.phase_means.order - unsaturated.phase_means.order;
  const double dv = saturated.phase_means.validate_commit - unsaturated.phase_means.validate_commit;
  if (dord > de && dord >= dv) b.dominant_growth = "order";
  if (dv > de && dv > dord) b.dominant_growth = "validate_commit";
  return b;
}

}  // namespace bcdb
