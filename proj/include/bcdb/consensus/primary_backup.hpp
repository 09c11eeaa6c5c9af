// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

/// Chain replication from a fixed primary (the first node) through every
/// backup in order. The tail acknowledges straight back to the primary.
/// There is no failover: a crashed primary stops all progress.
class PrimaryBackupChain final : public Replicator {
 public:
  PrimaryBackupChain(Simulator& sim, std::vector<NodeId> nodes, VirtualTime message_cost = 0,
                     std::uint32_t cpu_lane = 0);

  void start() override {}
  void propose(const Proposal& p) override;

  std::optional<NodeId> leader() const override;
  const std::vector<NodeId>& nodes() const override { return ids_; }
  ReplicaState state(NodeId node) const override;
  /// Forwarding hops only; the tail's ack is a client-level reply.
  std::uint64_t messages_sent() const override { return sim_.messages_sent(channel_); }
  std::size_t outstanding() const override { return outstanding_.size(); }

  /// Ops acknowledged back at the primary.
  std::uint64_t acknowledged() const { return acknowledged_; }

 private:
  struct Forward {
    LogEntry entry;
  };
  struct Ack {
    std::uint64_t index;
  };
  struct Replica {
    std::vector<LogEntry> log;
    std::uint64_t acked = 0;
  };

  void on_event(const Event& ev);
  void apply(std::size_t pos, const LogEntry& e);

  Simulator& sim_;
  std::vector<NodeId> ids_;
  VirtualTime message_cost_;
  std::uint32_t cpu_lane_;
  ChannelId channel_;
  std::vector<Replica> replicas_;
  std::map<NodeId, std::size_t> position_;
  std::map<std::uint64_t, Proposal> outstanding_;
  std::uint64_t acknowledged_ = 0;
};

}  // namespace bcdb
