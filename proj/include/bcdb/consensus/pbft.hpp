// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

using Batch = std::vector<Proposal>;
using BatchPtr = std::shared_ptr<const Batch>;

struct PreparedCert {
  std::uint64_t seq = 0;
  std::uint64_t view = 0;
  Digest digest{};
  BatchPtr batch;
};

struct ViewChangeVote {
  std::uint64_t new_view = 0;
  NodeId from = 0;
  std::vector<PreparedCert> prepared;
};

struct SlotAssignment {
  std::uint64_t seq = 0;
  Digest digest{};
  BatchPtr batch;
};

struct PbftMessage {
  enum class Type : std::uint8_t { PrePrepare, Prepare, Commit, ViewChange, NewView };
  Type type = Type::Prepare;
  std::uint64_t view = 0;
  std::uint64_t seq = 0;
  Digest digest{};
  NodeId from = 0;
  BatchPtr batch;                                             // PrePrepare, Commit
  std::shared_ptr<const ViewChangeVote> view_change;          // ViewChange
  std::shared_ptr<const std::vector<ViewChangeVote>> proofs;  // NewView
  std::shared_ptr<const std::vector<SlotAssignment>> assignments;
};

std::string_view to_string(PbftMessage::Type t);

struct PbftOutgoing {
  NodeId to = 0;
  PbftMessage msg;
};

struct PbftExecuted {
  std::uint64_t seq = 0;
  Proposal proposal;
};

struct CommittedSlot {
  Digest digest{};
  BatchPtr batch;
  std::uint64_t view = 0;
};

/// Three-phase Byzantine agreement (pre-prepare / prepare / commit) with a
/// round-robin primary and view changes carrying prepared certificates.
/// Pure state machine: inputs in, messages out, no clock.
class PbftReplica {
 public:
  enum class Behavior { Honest, Equivocate };

  PbftReplica(NodeId id, std::vector<NodeId> members, std::uint32_t quorum, Behavior behavior = Behavior::Honest,
              std::uint32_t window = 4, std::uint32_t max_batch = 64);

  std::vector<PbftOutgoing> on_request(const Proposal& p);
  std::vector<PbftOutgoing> on_message(const PbftMessage& m);
  /// Suspects the primary: moves to the next view (or the one after the
  /// view change already in progress).
  std::vector<PbftOutgoing> on_timeout();
  std::vector<PbftExecuted> take_executed();

  NodeId id() const { return id_; }
  NodeId primary_of(std::uint64_t view) const { return members_[view % members_.size()]; }
  std::uint64_t view() const { return view_; }
  bool in_view_change() const { return in_view_change_; }
  std::uint64_t last_executed() const { return last_executed_; }
  bool has_pending() const { return !pending_.empty(); }
  const std::map<std::uint64_t, CommittedSlot>& committed() const { return committed_; }
  /// True if this replica ever saw two different digests committed at one seq.
  bool conflicting_commit() const { return conflicting_commit_; }
  void set_behavior(Behavior b) { behavior_ = b; }
  Behavior behavior() const { return behavior_; }

  /// Digest of the protocol-relevant state, for state-space exploration.
  Digest fingerprint() const;

 private:
  struct Slot {
    std::optional<Digest> pre_prepared;
    BatchPtr batch;
    bool prepare_sent = false;
    bool prepared = false;
    std::map<Digest, std::set<NodeId>> prepares;
    std::map<Digest, std::set<NodeId>> commits;
    std::map<Digest, BatchPtr> commit_batches;
  };

  Slot& slot(std::uint64_t view, std::uint64_t seq) { return slots_[{view, seq}]; }
  void broadcast(const PbftMessage& m, std::vector<PbftOutgoing>& out) const;
  void try_propose(std::vector<PbftOutgoing>& out);
  void accept_pre_prepare(std::uint64_t view, std::uint64_t seq, const Digest& d, BatchPtr batch,
                          std::vector<PbftOutgoing>& out);
  void send_prepare(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out);
  void check_prepared(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out);
  void check_committed(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out);
  void execute(std::vector<PbftOutgoing>& out);
  void start_view_change(std::uint64_t target, std::vector<PbftOutgoing>& out);
  void maybe_send_new_view(std::uint64_t target, std::vector<PbftOutgoing>& out);
  void enter_view(std::uint64_t view, const std::vector<SlotAssignment>& assignments,
                  std::vector<PbftOutgoing>& out);
  std::vector<SlotAssignment> compute_assignments(const std::vector<ViewChangeVote>& votes) const;

  void on_pre_prepare(const PbftMessage& m, std::vector<PbftOutgoing>& out);
  void on_prepare(const PbftMessage& m, std::vector<PbftOutgoing>& out);
  void on_commit(const PbftMessage& m, std::vector<PbftOutgoing>& out);
  void on_view_change(const PbftMessage& m, std::vector<PbftOutgoing>& out);
  void on_new_view(const PbftMessage& m, std::vector<PbftOutgoing>& out);

  NodeId id_;
  std::vector<NodeId> members_;
  std::uint32_t quorum_;
  std::uint32_t f_;
  Behavior behavior_;
  std::uint32_t window_;
  std::uint32_t max_batch_;

  std::uint64_t view_ = 0;
  bool in_view_change_ = false;
  std::uint64_t view_change_target_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t last_executed_ = 0;
  bool conflicting_commit_ = false;

  std::map<std::pair<std::uint64_t, std::uint64_t>, Slot> slots_;
  std::map<std::uint64_t, CommittedSlot> committed_;
  std::map<std::uint64_t, PreparedCert> prepared_certs_;
  std::map<std::uint64_t, Proposal> pending_;
  std::deque<std::uint64_t> queue_;
  std::set<std::uint64_t> proposed_;
  std::set<std::uint64_t> executed_tags_;
  std::map<std::uint64_t, std::map<NodeId, ViewChangeVote>> view_changes_;
  std::set<std::uint64_t> new_view_sent_;
  std::vector<PbftExecuted> executed_out_;
};

struct PbftOptions {
  VirtualTime view_timeout = 10'000;
  VirtualTime message_cost = 0;
  std::uint32_t window = 4;
  std::uint32_t max_batch = 64;
  std::uint32_t cpu_lane = 0;
};

/// PBFT replicas wired onto the simulator. Clients multicast requests to
/// every replica so backups can time out a faulty primary.
class PbftGroup final : public Replicator {
 public:
  PbftGroup(Simulator& sim, std::vector<NodeId> nodes, PbftOptions options);

  void start() override {}
  void propose(const Proposal& p) override;

  std::optional<NodeId> leader() const override;
  const std::vector<NodeId>& nodes() const override { return ids_; }
  ReplicaState state(NodeId node) const override;
  std::uint64_t messages_sent() const override { return sim_.messages_sent(channel_); }
  std::uint64_t view_changes() const override;
  std::size_t outstanding() const override { return outstanding_.size(); }

  const PbftReplica& replica(NodeId node) const { return replicas_.at(index_of_.at(node)); }

 private:
  struct Deferred {
    PbftMessage msg;
  };
  struct Timer {
    std::uint64_t generation;
  };
  struct TimerState {
    bool armed = false;
    std::uint64_t generation = 0;
    std::uint64_t executed_at_arm = 0;
    std::uint32_t backoff = 0;
  };

  void on_event(const Event& ev);
  void deliver(std::size_t idx, std::vector<PbftOutgoing> out);
  void arm_timer(std::size_t idx);
  void sync_behavior(std::size_t idx);

  Simulator& sim_;
  PbftOptions options_;
  std::vector<NodeId> ids_;
  std::vector<PbftReplica> replicas_;
  std::vector<TimerState> timers_;
  std::map<NodeId, std::size_t> index_of_;
  ChannelId channel_;
  std::map<std::uint64_t, Proposal> outstanding_;
};

}  // namespace bcdb
