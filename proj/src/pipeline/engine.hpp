// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

// Shared machinery of the simulated pipelines. Internal to the library.

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>

#include "bcdb/consensus/replicator.hpp"
#include "bcdb/pipeline/execute.hpp"
#include "bcdb/pipeline/pipeline.hpp"

namespace bcdb::detail {

class Engine {
 public:
  Engine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns, const RunOptions& opts);
  virtual ~Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  RunResult run();

 protected:
  virtual void on_submit(std::size_t i) = 0;
  virtual void on_event(const Event& ev) = 0;
  virtual void on_commit(NodeId node, const Proposal& p) = 0;
  /// Every healthy replica has applied everything ordered so far.
  virtual bool drained() const = 0;
  virtual void fill(RunResult&) {}

  void finish(std::size_t i, Outcome o);
  void mark_executed(std::size_t i);
  void mark_ordered(std::size_t i, VirtualTime at);
  bool pending(std::size_t i) const { return txns_[i].outcome == Outcome::Pending; }

  bool healthy(NodeId node) const { return sim_.fault(node) == FaultKind::Healthy; }
  /// Replica that proposes or sequences: the current leader, else the
  /// first healthy replica.
  std::optional<NodeId> leader_replica() const;
  /// Reserves CPU at `node` and returns the delay until it is done.
  VirtualTime cpu(NodeId node, VirtualTime cost, std::uint32_t lane = 0);
  VirtualTime hash_cost(const HashWork& w) const { return w.cost(cost_); }
  std::size_t replica_index(NodeId node) const { return node - replicas_.front(); }

  DesignConfig cfg_;
  CostModel cost_;
  WorkloadSpec spec_;
  RunOptions opts_;
  Arrival arrival_;
  std::vector<Transaction> txns_;
  std::vector<TxnTimeline> timelines_;
  Simulator sim_;
  std::vector<NodeId> replicas_;
  NodeId service_ = 0;
  NodeId client_ = 0;
  std::vector<StateStore> stores_;
  std::unique_ptr<Replicator> repl_;
  ChannelId ch_ = 0;

 private:
  void submit(std::size_t i);

  std::size_t done_ = 0;
  std::size_t next_closed_ = 0;
  VirtualTime last_progress_ = 0;
};

/// Transaction-based pipelines: transactions are cut into blocks at an
/// orderer, consensus orders whole blocks, and every replica applies each
/// block serially.
class BlockEngine : public Engine {
 public:
  using Engine::Engine;

 protected:
  struct Applied {
    VirtualTime cost = 0;
    std::vector<Outcome> outcomes;  // parallel to the block's transactions
    std::vector<Execution> executions;
  };

  /// Adds a transaction to the block open at `orderer`.
  void enqueue(NodeId orderer, std::size_t i);
  /// Called at the orderer once a block is cut; the default proposes it.
  virtual void on_block_closed(std::uint64_t tag) { propose(tag); }
  void propose(std::uint64_t tag);
  /// Executes or validates the block at `node` against its store and
  /// returns the CPU it costs and the per-transaction outcomes.
  virtual Applied apply_block(NodeId node, std::uint64_t tag) = 0;

  void on_event(const Event& ev) override;
  void on_commit(NodeId node, const Proposal& p) override;
  bool drained() const override;
  void fill(RunResult& r) override;

  /// Ledger copy of a transaction: no timestamps, so every replica
  /// links byte-identical blocks.
  Transaction ledger_txn(std::size_t i, const Execution& ex, Outcome o) const;
  /// Appends the block to `node`'s ledger and returns the hashing cost.
  VirtualTime append_ledger(NodeId node, std::uint64_t tag, const std::vector<Execution>& execs,
                            const std::vector<Outcome>& outcomes, std::optional<Digest> root);

  struct BlockInfo {
    std::vector<std::size_t> txns;
    NodeId proposer = 0;
  };
  std::vector<BlockInfo> blocks_;  // tag - 1

 private:
  struct Queue {
    std::deque<std::pair<std::uint64_t, VirtualTime>> blocks;  // tag, delivery time
    bool busy = false;
    std::uint64_t applied = 0;
  };
  void close_block();
  void pump(NodeId node);

  std::vector<std::size_t> open_;
  NodeId open_at_ = 0;
  std::uint64_t open_epoch_ = 0;
  std::map<NodeId, Queue> queues_;
  std::map<std::uint64_t, std::vector<Outcome>> decided_;
  std::uint64_t delivered_max_ = 0;
  std::set<std::uint64_t> seen_;
  std::vector<std::uint64_t> log_order_;  // tags, first delivery anywhere
};

}  // namespace bcdb::detail
