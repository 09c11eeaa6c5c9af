// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "engine.hpp"

namespace bcdb {

namespace {

constexpr std::string_view kRequest = "oe_request";
constexpr std::string_view kRetry = "oe_retry";
constexpr std::string_view kPreexecDone = "oe_preexec_done";
constexpr std::string_view kPropose = "oe_propose";

// Order-execute: the proposer pre-executes each transaction at its tip,
// cuts blocks and computes the state root, consensus orders the block,
// then every replica executes it again. With `preexec` off this is the
// plain serial mode: order first, execute once.
class OrderExecuteEngine final : public detail::BlockEngine {
 public:
  OrderExecuteEngine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                     const RunOptions& opts, bool preexec)
      : BlockEngine(cfg, spec, std::move(txns), opts), preexec_(preexec) {}

 private:
  void on_submit(std::size_t i) override {
    auto proposer = leader_replica();
    if (!proposer) {
      sim_.schedule(client_, ch_, kRetry, i, 10 * cost_.net_latency_mean);
      return;
    }
    sim_.send(client_, *proposer, ch_, kRequest, i);
  }

  void on_event(const Event& ev) override {
    if (ev.kind == kRetry) {
      on_submit(std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kRequest) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (!preexec_) {
        mark_executed(i);
        enqueue(ev.target, i);
        return;
      }
      const auto cost = cost_.exec_time_per_op * txns_[i].op_count;
      sim_.schedule(ev.target, ch_, kPreexecDone, i, cpu(ev.target, cost));
    } else if (ev.kind == kPreexecDone) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      mark_executed(i);
      ++proposer_exec_[txns_[i].id];
      enqueue(ev.target, i);
    } else if (ev.kind == kPropose) {
      propose(std::any_cast<std::uint64_t>(ev.payload));
    } else {
      BlockEngine::on_event(ev);
    }
  }

  void on_block_closed(std::uint64_t tag) override {
    if (!preexec_) {
      propose(tag);
      return;
    }
    // The proposer applies the block to its speculative state to compute
    // the root it puts in the header.
    const auto proposer = blocks_[tag - 1].proposer;
    if (!spec_ || spec_owner_ != proposer) {
      spec_.emplace(stores_[replica_index(proposer)]);
      spec_owner_ = proposer;
    }
    OverlayView view(spec_->kv());
    std::vector<WriteEntry> writes;
    for (auto i : blocks_[tag - 1].txns) {
      auto ex = execute_txn(txns_[i], view.reader());
      if (!ex.ok) continue;
      view.put(ex.writes);
      writes.insert(writes.end(), ex.writes.begin(), ex.writes.end());
    }
    const auto cost = hash_cost(spec_->apply(writes));
    sim_.schedule(proposer, ch_, kPropose, tag, cpu(proposer, cost));
  }

  Applied apply_block(NodeId node, std::uint64_t tag) override {
    auto& store = stores_[replica_index(node)];
    const auto& info = blocks_[tag - 1];
    OverlayView view(store.kv());
    Applied a;
    std::vector<WriteEntry> writes;
    VirtualTime sig = 0;
    for (auto i : info.txns) {
      auto ex = execute_txn(txns_[i], view.reader());
      a.cost += cost_.sig_verify_time + cost_.exec_time_per_op * txns_[i].op_count;
      sig += cost_.sig_verify_time;
      if (ex.ok) {
        view.put(ex.writes);
        writes.insert(writes.end(), ex.writes.begin(), ex.writes.end());
      }
      a.outcomes.push_back(ex.ok ? Outcome::Committed : Outcome::AbortedApplication);
      a.executions.push_back(std::move(ex));
      if (node == info.proposer) ++proposer_exec_[txns_[i].id];
    }
    a.cost += hash_cost(store.apply(writes));
    std::optional<Digest> root;
    if (cfg_.storage_mode.index != IndexKind::Plain) root = store.index_root();
    a.cost += append_ledger(node, tag, a.executions, a.outcomes, root);
    validation_time_ += a.cost;
    signature_time_ += sig;
    return a;
  }

  void fill(RunResult& r) override {
    BlockEngine::fill(r);
    r.proposer_executions = proposer_exec_;
    r.validation_time = validation_time_;
    r.signature_time = signature_time_;
  }

  bool preexec_;
  std::optional<StateStore> spec_;
  NodeId spec_owner_ = 0;
  std::map<std::uint64_t, std::uint32_t> proposer_exec_;
  VirtualTime validation_time_ = 0;
  VirtualTime signature_time_ = 0;
};

}  // namespace

RunResult run_order_execute(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                            const RunOptions& opts) {
  if (cfg.replication_model != ReplicationModel::TransactionBased) {
    throw ConfigError("order-execute needs transaction-based replication");
  }
  const bool preexec = cfg.concurrency_mode != ConcurrencyMode::Serial;
  return OrderExecuteEngine(cfg, spec, std::move(txns), opts, preexec).run();
}

}  // namespace bcdb
