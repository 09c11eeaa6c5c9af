// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/replicator.hpp"

#include "bcdb/consensus/pbft.hpp"
#include "bcdb/consensus/primary_backup.hpp"
#include "bcdb/consensus/raft.hpp"
#include "bcdb/consensus/shared_log.hpp"
#include "bcdb/core/digest.hpp"
#include "bcdb/core/encoding.hpp"

namespace bcdb {

Digest batch_digest(std::span<const Proposal> batch) {
  Encoder e;
  e.put_u32(static_cast<std::uint32_t>(batch.size()));
  for (const auto& p : batch) {
    e.put_u64(p.tag);
    e.put_digest(p.digest);
  }
  return digest(e.bytes());
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Leader: return "leader";
    case Role::Follower: return "follower";
    case Role::Candidate: return "candidate";
    case Role::Primary: return "primary";
    case Role::Backup: return "backup";
    case Role::Validator: return "validator";
  }
  return "unknown";
}

ReplicatorOptions replicator_options_for(const DesignConfig& cfg) {
  ReplicatorOptions o;
  o.failure_model = cfg.failure_model;
  o.approach = cfg.replication_approach;
  o.message_cost = cfg.failure_model == FailureModel::BFT ? cfg.cost_model.sig_verify_time : 0;
  o.max_batch = cfg.cost_model.block_size_limit;
  o.log_service_time = cfg.cost_model.shared_log_service_time;
  return o;
}

std::unique_ptr<Replicator> make_replicator(Simulator& sim, std::vector<NodeId> nodes, NodeId service_node,
                                            const ReplicatorOptions& options) {
  switch (options.approach) {
    case ReplicationApproach::SharedLog:
      return std::make_unique<SharedLogService>(
          sim, service_node, std::move(nodes),
          SharedLogOptions{options.log_service_time, options.log_internal_delay});
    case ReplicationApproach::PrimaryBackup:
      return std::make_unique<PrimaryBackupChain>(sim, std::move(nodes), options.message_cost, options.cpu_lane);
    case ReplicationApproach::Consensus:
      break;
  }
  if (options.failure_model == FailureModel::BFT) {
    PbftOptions p;
    p.view_timeout = 40 * std::max<VirtualTime>(sim.options().latency.mean, 1);
    p.message_cost = options.message_cost;
    p.window = options.window;
    p.max_batch = options.max_batch;
    p.cpu_lane = options.cpu_lane;
    return std::make_unique<PbftGroup>(sim, std::move(nodes), p);
  }
  auto r = RaftOptions::for_latency(sim.options().latency);
  r.message_cost = options.message_cost;
  r.cpu_lane = options.cpu_lane;
  return std::make_unique<RaftGroup>(sim, std::move(nodes), r);
}

}  // namespace bcdb
