// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <unordered_set>

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

/// Single-sequencer append-only log. Positions start at 1 and are dense.
class SharedLog {
 public:
  std::uint64_t append(const Proposal& p);
  /// Entries at positions >= from_seq, in order.
  std::vector<Proposal> read(std::uint64_t from_seq) const;
  std::uint64_t size() const { return entries_.size(); }

 private:
  std::vector<Proposal> entries_;
};

struct SharedLogOptions {
  /// Sequencer CPU per append.
  VirtualTime service_time = 20;
  /// Extra delay for the service's own internal replication.
  VirtualTime internal_delay = 0;
};

/// A trusted ordering service on its own node. Appends are sequenced
/// serially, then pushed to every consumer, which applies them in
/// position order.
class SharedLogService final : public Replicator {
 public:
  SharedLogService(Simulator& sim, NodeId service_node, std::vector<NodeId> consumers, SharedLogOptions options);

  void start() override {}
  void propose(const Proposal& p) override;

  std::optional<NodeId> leader() const override { return service_; }
  const std::vector<NodeId>& nodes() const override { return ids_; }
  ReplicaState state(NodeId node) const override;
  std::uint64_t messages_sent() const override { return sim_.messages_sent(channel_); }
  std::size_t outstanding() const override { return outstanding_.size(); }

  const SharedLog& log() const { return log_; }
  NodeId service_node() const { return service_; }

 private:
  struct Append {
    Proposal p;
  };
  struct Sequenced {
    Proposal p;
  };
  struct Deliver {
    std::uint64_t seq;
    Proposal p;
  };
  struct Consumer {
    std::uint64_t applied = 0;
    std::map<std::uint64_t, Proposal> buffered;
    std::vector<LogEntry> log;
  };

  void on_event(const Event& ev);

  Simulator& sim_;
  NodeId service_;
  std::vector<NodeId> ids_;
  SharedLogOptions options_;
  ChannelId channel_;
  SharedLog log_;
  std::unordered_set<std::uint64_t> sequenced_tags_;
  std::map<NodeId, Consumer> consumers_;
  std::map<std::uint64_t, Proposal> outstanding_;
};

}  // namespace bcdb
