// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

struct RaftOptions {
  VirtualTime election_min = 2'500;
  VirtualTime election_max = 5'000;
  VirtualTime heartbeat = 1'000;
  VirtualTime message_cost = 0;
  std::uint32_t max_entries_per_append = 64;
  std::uint32_t cpu_lane = 0;

  /// Election timeouts uniform in [10, 20] x mean latency; heartbeats at 4x.
  static RaftOptions for_latency(const LatencyModel& latency);
};

/// Leader-based crash-fault-tolerant consensus. Commits need a majority of
/// matching logs; the leader notifies followers of every commit advance, so
/// a quiet cluster spends 3(N-1) messages per entry.
class RaftGroup final : public Replicator {
 public:
  RaftGroup(Simulator& sim, std::vector<NodeId> nodes, RaftOptions options);

  void start() override;
  void propose(const Proposal& p) override;

  std::optional<NodeId> leader() const override;
  const std::vector<NodeId>& nodes() const override { return ids_; }
  ReplicaState state(NodeId node) const override;
  std::uint64_t messages_sent() const override { return sim_.messages_sent(channel_); }
  std::uint64_t view_changes() const override { return leaders_elected_ > 0 ? leaders_elected_ - 1 : 0; }
  std::size_t outstanding() const override { return outstanding_.size(); }

  std::uint64_t term_of(NodeId node) const { return node_at(node).term; }
  std::uint64_t commit_index(NodeId node) const { return node_at(node).commit; }

 private:
  struct RequestVote {
    std::uint64_t term;
    std::uint64_t last_index;
    std::uint64_t last_term;
  };
  struct VoteReply {
    std::uint64_t term;
    bool granted;
  };
  struct Append {
    std::uint64_t term;
    std::uint64_t prev_index;
    std::uint64_t prev_term;
    std::vector<LogEntry> entries;
    std::uint64_t leader_commit;
  };
  struct AppendReply {
    std::uint64_t term;
    bool success;
    std::uint64_t match_index;
  };
  struct Timer {
    std::uint64_t generation;
    bool election;
  };
  struct Deferred;

  struct Node {
    NodeId id = 0;
    std::uint64_t term = 0;
    std::optional<NodeId> voted_for;
    Role role = Role::Follower;
    std::vector<LogEntry> log;  // log[i] holds index i + 1
    std::uint64_t commit = 0;
    std::uint64_t applied = 0;
    std::set<NodeId> votes;
    std::map<NodeId, std::uint64_t> next;
    std::map<NodeId, std::uint64_t> match;
    std::map<NodeId, VirtualTime> last_sent;
    std::uint64_t election_gen = 0;
    std::uint64_t heartbeat_gen = 0;
    std::unordered_map<std::uint64_t, std::uint64_t> tag_index;
    std::unordered_set<std::uint64_t> applied_tags;

    std::uint64_t last_index() const { return log.size(); }
    std::uint64_t term_at(std::uint64_t index) const { return index == 0 ? 0 : log[index - 1].term; }
  };

  void on_event(const Event& ev);
  void dispatch(Node& node, const Event& ev);
  Node& node_at(NodeId id);
  const Node& node_at(NodeId id) const;

  void arm_election(Node& node);
  void arm_heartbeat(Node& node);
  void start_election(Node& node);
  void become_leader(Node& node);
  void step_down(Node& node, std::uint64_t term);
  void leader_append(Node& node, const Proposal& p);
  void send_append(Node& leader, NodeId follower, bool force_empty);
  void broadcast_append(Node& leader);
  void advance_commit(Node& leader);
  void apply(Node& node);
  void truncate(Node& node, std::uint64_t from_index);
  void route_to_leader(const Proposal& p);

  void handle(Node& node, NodeId src, const RequestVote& m);
  void handle(Node& node, NodeId src, const VoteReply& m);
  void handle(Node& node, NodeId src, const Append& m);
  void handle(Node& node, NodeId src, const AppendReply& m);

  Simulator& sim_;
  RaftOptions options_;
  std::vector<NodeId> ids_;
  std::vector<Node> replicas_;
  std::unordered_map<NodeId, std::size_t> index_of_;
  std::uint32_t quorum_;
  ChannelId channel_;
  std::map<std::uint64_t, Proposal> outstanding_;
  std::uint64_t leaders_elected_ = 0;
};

}  // namespace bcdb
