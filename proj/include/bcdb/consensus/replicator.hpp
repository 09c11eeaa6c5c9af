// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bcdb/core/config.hpp"
#include "bcdb/core/types.hpp"
#include "bcdb/simnet/simulator.hpp"

namespace bcdb {

/// A client request: an opaque tag the caller maps back to its content,
/// plus the content digest replicas agree on.
struct Proposal {
  std::uint64_t tag = 0;
  Digest digest{};
  bool operator==(const Proposal&) const = default;
};

/// One ordered log slot. Consensus protocols that batch decide several
/// proposals per slot; an empty batch is a no-op.
struct LogEntry {
  std::uint64_t index = 0;
  std::uint64_t term = 0;
  Digest digest{};
  std::vector<Proposal> batch;
  bool operator==(const LogEntry&) const = default;
};

Digest batch_digest(std::span<const Proposal> batch);

enum class Role { Leader, Follower, Candidate, Primary, Backup, Validator };
std::string_view to_string(Role r);

/// Snapshot of one replica, as seen by tests and metrics.
struct ReplicaState {
  NodeId node = 0;
  std::uint64_t term = 0;
  Role role = Role::Follower;
  std::vector<LogEntry> log;  // committed prefix first; may extend beyond it
  std::uint64_t commit_index = 0;
};

/// Common surface of the replication approaches. Proposals are submitted
/// on behalf of a client; the replicator routes them to the current
/// leader and retries across leader changes. The commit handler runs once
/// per (node, proposal tag), in log order at each node.
class Replicator {
 public:
  using CommitHandler = std::function<void(NodeId node, std::uint64_t index, const Proposal& p)>;

  virtual ~Replicator() = default;

  virtual void start() = 0;
  virtual void propose(const Proposal& p) = 0;
  void set_commit_handler(CommitHandler handler) { on_commit_ = std::move(handler); }

  virtual std::optional<NodeId> leader() const = 0;
  virtual const std::vector<NodeId>& nodes() const = 0;
  virtual ReplicaState state(NodeId node) const = 0;

  /// Protocol messages exchanged between replicas so far.
  virtual std::uint64_t messages_sent() const = 0;
  virtual std::uint64_t view_changes() const { return 0; }
  /// Proposals submitted but not yet committed anywhere.
  virtual std::size_t outstanding() const = 0;

 protected:
  void notify_commit(NodeId node, std::uint64_t index, const Proposal& p) {
    if (on_commit_) on_commit_(node, index, p);
  }

 private:
  CommitHandler on_commit_;
};

struct ReplicatorOptions {
  FailureModel failure_model = FailureModel::CFT;
  ReplicationApproach approach = ReplicationApproach::Consensus;
  /// CPU charged per received protocol message (signature checks for BFT).
  VirtualTime message_cost = 0;
  /// Maximum proposals per consensus slot (BFT batches; Raft appends singly).
  std::uint32_t max_batch = 64;
  /// Concurrent consensus instances a BFT primary keeps in flight.
  std::uint32_t window = 4;
  /// Service time per append at a shared-log sequencer.
  VirtualTime log_service_time = 20;
  /// Extra delay a shared-log service spends replicating internally.
  VirtualTime log_internal_delay = 0;
  /// CPU lane used for protocol work so it contends with pipeline work.
  std::uint32_t cpu_lane = 0;
};

/// Builds the replicator for an approach and failure model over `nodes`.
/// SharedLog uses `service_node` as its sequencer; the other approaches
/// ignore it.
std::unique_ptr<Replicator> make_replicator(Simulator& sim, std::vector<NodeId> nodes, NodeId service_node,
                                            const ReplicatorOptions& options);

/// Options derived from a design config's cost model.
ReplicatorOptions replicator_options_for(const DesignConfig& cfg);

/// Tag reserved for internal no-op entries; never reaches commit handlers.
inline constexpr std::uint64_t kNoopTag = 0;

}  // namespace bcdb
