// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/occ.hpp"
#include "engine.hpp"

namespace bcdb {

namespace {

constexpr std::string_view kEndorse = "eov_endorse";
constexpr std::string_view kSimulate = "eov_simulate";
constexpr std::string_view kEndorsed = "eov_endorsed";
constexpr std::string_view kTimeout = "eov_timeout";
constexpr std::string_view kOrder = "eov_order";
constexpr std::string_view kRetry = "eov_retry";

struct EndorsedMsg {
  std::size_t txn = 0;
  EndorsementResult result;
};

// Execute-order-validate: endorsers simulate against their committed
// state, the client compares the results, an orderer cuts blocks, and
// every replica validates read versions serially in block order.
class EovEngine final : public detail::BlockEngine {
 public:
  EovEngine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns, const RunOptions& opts)
      : BlockEngine(cfg, spec, std::move(txns), opts), collect_(txns_.size()), endorsed_(txns_.size()) {
    k_ = cfg.endorsement_quorum == 0 ? cfg.node_count : std::min(cfg.endorsement_quorum, cfg.node_count);
  }

 private:
  struct Collect {
    std::optional<EndorsementResult> first;
    std::uint32_t got = 0;
  };

  std::optional<NodeId> orderer() const {
    if (cfg_.replication_approach == ReplicationApproach::SharedLog) return service_;
    return leader_replica();
  }

  void on_submit(std::size_t i) override {
    for (std::uint32_t r = 0; r < k_; ++r) sim_.send(client_, replicas_[r], ch_, kEndorse, i);
    sim_.schedule(client_, ch_, kTimeout, i, cost_.endorsement_timeout);
  }

  void send_to_orderer(std::size_t i) {
    auto o = orderer();
    if (!o) {
      sim_.schedule(client_, ch_, kRetry, i, 10 * cost_.net_latency_mean);
      return;
    }
    sim_.send(client_, *o, ch_, kOrder, i);
  }

  void on_event(const Event& ev) override {
    if (ev.kind == kEndorse) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      const auto cost = cost_.exec_time_per_op * txns_[i].op_count + cost_.sig_verify_time;
      sim_.schedule(ev.target, ch_, kSimulate, i, cpu(ev.target, cost));
    } else if (ev.kind == kSimulate) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      const auto& kv = stores_[replica_index(ev.target)].kv();
      auto ex = execute_txn(txns_[i], [&](const Key& k) { return kv.get(k); });
      sim_.send(ev.target, client_, ch_, kEndorsed, EndorsedMsg{i, make_endorsement(ev.target, std::move(ex))});
    } else if (ev.kind == kEndorsed) {
      const auto& msg = std::any_cast<const EndorsedMsg&>(ev.payload);
      const auto i = msg.txn;
      if (!pending(i) || collect_[i].got == k_) return;
      auto& c = collect_[i];
      if (!c.first) {
        c.first = msg.result;
      } else if (!same_result(*c.first, msg.result)) {
        // The client gives up on the first mismatch.
        finish(i, Outcome::AbortedInconsistentRead);
        return;
      }
      if (++c.got < k_) return;
      if (!c.first->execution.ok) {
        finish(i, Outcome::AbortedApplication);
        return;
      }
      mark_executed(i);
      endorsed_[i] = c.first->execution;
      send_to_orderer(i);
    } else if (ev.kind == kRetry) {
      send_to_orderer(std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kTimeout) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (pending(i) && collect_[i].got < k_) finish(i, Outcome::Dropped);
    } else if (ev.kind == kOrder) {
      enqueue(ev.target, std::any_cast<std::size_t>(ev.payload));
    } else {
      BlockEngine::on_event(ev);
    }
  }

  Applied apply_block(NodeId node, std::uint64_t tag) override {
    auto& store = stores_[replica_index(node)];
    const auto& info = blocks_[tag - 1];
    OverlayView view(store.kv());
    Applied a;
    std::vector<WriteEntry> writes;
    VirtualTime sig = 0;
    for (auto i : info.txns) {
      const auto& ex = endorsed_[i];
      a.cost += cost_.sig_verify_time + cost_.exec_time_per_op * static_cast<VirtualTime>(ex.reads.size());
      sig += cost_.sig_verify_time;
      auto verdict = occ_validate(ex.reads, [&](const Key& k) {
        auto v = view.get(k);
        return v ? v->version : 0;
      });
      if (verdict == Outcome::Committed) {
        view.put(ex.writes);
        writes.insert(writes.end(), ex.writes.begin(), ex.writes.end());
      }
      a.outcomes.push_back(verdict);
      a.executions.push_back(ex);
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
    for (const auto& ids : blocks_) {
      for (auto i : ids.txns) r.executions[txns_[i].id] = endorsed_[i];
    }
    r.validation_time = validation_time_;
    r.signature_time = signature_time_;
  }

  std::uint32_t k_ = 0;
  std::vector<Collect> collect_;
  std::vector<Execution> endorsed_;
  VirtualTime validation_time_ = 0;
  VirtualTime signature_time_ = 0;
};

}  // namespace

RunResult run_execute_order_validate(const DesignConfig& cfg, const WorkloadSpec& spec,
                                     std::vector<Transaction> txns, const RunOptions& opts) {
  if (cfg.replication_model != ReplicationModel::TransactionBased) {
    throw ConfigError("execute-order-validate needs transaction-based replication");
  }
  return EovEngine(cfg, spec, std::move(txns), opts).run();
}

}  // namespace bcdb
