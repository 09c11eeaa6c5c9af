// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "engine.hpp"

#include <cmath>
#include <sstream>

#include "bcdb/core/digest.hpp"

namespace bcdb::detail {

namespace {

constexpr std::string_view kSubmit = "submit";
constexpr std::string_view kBlockTimer = "block_timer";
constexpr std::string_view kBlockApplied = "block_applied";

Simulator::Options sim_options(const DesignConfig& cfg, const RunOptions& opts) {
  Simulator::Options o;
  o.latency = {cfg.cost_model.net_latency_min, cfg.cost_model.net_latency_mean};
  o.allow_byzantine = cfg.failure_model == FailureModel::BFT;
  o.record_trace = opts.record_trace;
  return o;
}

struct BlockDone {
  std::uint64_t tag = 0;
  VirtualTime delivered = 0;
  std::vector<Outcome> outcomes;
};

}  // namespace

Engine::Engine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
               const RunOptions& opts)
    : cfg_(cfg),
      cost_(cfg.cost_model),
      spec_(spec),
      opts_(opts),
      arrival_(opts.arrival.value_or(spec.arrival)),
      txns_(std::move(txns)),
      timelines_(txns_.size()),
      sim_(opts.seed, sim_options(cfg, opts)) {
  const auto first = sim_.add_nodes(cfg.node_count);
  for (std::uint32_t i = 0; i < cfg.node_count; ++i) replicas_.push_back(first + i);
  service_ = sim_.add_nodes(1);
  client_ = sim_.add_nodes(1);

  StateStore base(cfg.storage_mode);
  const auto records = initial_records(spec);
  base.apply(records);
  stores_.reserve(replicas_.size());
  for (std::size_t i = 0; i < replicas_.size(); ++i) stores_.emplace_back(base);

  repl_ = make_replicator(sim_, replicas_, service_, replicator_options_for(cfg));
  repl_->set_commit_handler([this](NodeId node, std::uint64_t, const Proposal& p) { on_commit(node, p); });
  ch_ = sim_.add_channel([this](const Event& ev) {
    if (ev.kind == kSubmit) {
      submit(std::any_cast<std::size_t>(ev.payload));
    } else {
      on_event(ev);
    }
  });
}

std::optional<NodeId> Engine::leader_replica() const {
  auto l = repl_->leader();
  if (l && *l >= replicas_.front() && *l <= replicas_.back()) return l;
  if (cfg_.replication_approach == ReplicationApproach::Consensus) return std::nullopt;
  for (auto r : replicas_) {
    if (healthy(r)) return r;
  }
  return std::nullopt;
}

VirtualTime Engine::cpu(NodeId node, VirtualTime cost, std::uint32_t lane) {
  return sim_.reserve_cpu(node, cost, lane) - sim_.now();
}

void Engine::submit(std::size_t i) {
  txns_[i].submit_time = sim_.now();
  last_progress_ = sim_.now();
  on_submit(i);
}

void Engine::finish(std::size_t i, Outcome o) {
  auto& t = txns_[i];
  if (t.outcome != Outcome::Pending) return;
  t.finish(o);
  if (o == Outcome::Committed) t.commit_time = sim_.now();
  ++done_;
  last_progress_ = sim_.now();
  if (arrival_.mode == ArrivalMode::ClosedLoop && next_closed_ < txns_.size()) {
    sim_.schedule(client_, ch_, kSubmit, next_closed_++, 0);
  }
}

void Engine::mark_executed(std::size_t i) {
  if (!timelines_[i].executed) timelines_[i].executed = sim_.now();
}

void Engine::mark_ordered(std::size_t i, VirtualTime at) {
  if (!timelines_[i].ordered) timelines_[i].ordered = at;
  if (txns_[i].order_time.value_or(at) >= at) txns_[i].order_time = at;
}

RunResult Engine::run() {
  for (const auto& f : opts_.faults) {
    if (f.node >= replicas_.size()) throw ConfigError("fault names replica " + std::to_string(f.node));
    if (f.kind == FaultKind::Healthy) {
      sim_.heal(replicas_[f.node], f.since);
    } else {
      sim_.inject_fault(replicas_[f.node], f.kind, f.since);
    }
  }
  repl_->start();
  if (arrival_.mode == ArrivalMode::OpenLoop) {
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      const auto at = std::llround(static_cast<double>(i) * kTicksPerSecond / arrival_.rate);
      sim_.schedule(client_, ch_, kSubmit, i, at);
    }
  } else {
    while (next_closed_ < txns_.size() && next_closed_ < arrival_.clients) {
      sim_.schedule(client_, ch_, kSubmit, next_closed_++, 0);
    }
  }

  const auto all_done = [&] { return done_ == txns_.size(); };
  bool stalled = false;
  while (!all_done()) {
    auto next = sim_.next_time();
    if (!next || *next > opts_.horizon || *next - last_progress_ > opts_.stall_window) {
      stalled = true;
      break;
    }
    sim_.run(std::min(opts_.horizon, last_progress_ + opts_.stall_window), all_done);
  }
  if (!stalled && !drained()) {
    sim_.run(sim_.now() + opts_.stall_window, [&] { return drained(); });
  }

  RunResult r;
  r.metrics.messages = sim_.messages_sent();
  summarize(r.metrics, txns_, timelines_);
  r.metrics.stalled = stalled;
  for (std::size_t i = 0; i < replicas_.size(); ++i) {
    auto& s = stores_[i];
    r.state_digests.push_back(state_digest(s.kv()));
    r.index_roots.push_back(cfg_.storage_mode.index == IndexKind::Plain ? std::nullopt
                                                                        : std::optional<Digest>(s.index_root()));
    r.healthy.push_back(healthy(replicas_[i]));
  }
  for (std::size_t i = 0; i < replicas_.size(); ++i) {
    if (r.healthy[i]) {
      r.metrics.storage = stores_[i].storage_breakdown();
      break;
    }
  }
  fill(r);
  if (opts_.record_trace) {
    std::ostringstream out;
    sim_.write_trace(out);
    r.trace = out.str();
  }
  r.txns = std::move(txns_);
  r.timelines = std::move(timelines_);
  return r;
}

void BlockEngine::enqueue(NodeId orderer, std::size_t i) {
  if (!open_.empty() && orderer != open_at_) {
    // The orderer changed under an open block; cut it where it was.
    close_block();
  }
  open_at_ = orderer;
  open_.push_back(i);
  if (open_.size() == 1) sim_.schedule(orderer, ch_, kBlockTimer, open_epoch_, cost_.block_timeout);
  if (open_.size() >= cost_.block_size_limit) close_block();
}

void BlockEngine::close_block() {
  if (open_.empty()) return;
  blocks_.push_back({std::move(open_), open_at_});
  open_.clear();
  ++open_epoch_;
  on_block_closed(blocks_.size());
}

void BlockEngine::propose(std::uint64_t tag) {
  Encoder e;
  e.put_u64(tag);
  for (auto i : blocks_[tag - 1].txns) e.put_u64(txns_[i].id);
  repl_->propose(Proposal{tag, digest(std::move(e).take())});
}

void BlockEngine::on_commit(NodeId node, const Proposal& p) {
  if (p.tag == 0 || p.tag > blocks_.size()) return;
  if (seen_.insert(p.tag).second) log_order_.push_back(p.tag);
  delivered_max_ = std::max(delivered_max_, p.tag);
  queues_[node].blocks.emplace_back(p.tag, sim_.now());
  pump(node);
}

void BlockEngine::pump(NodeId node) {
  auto& q = queues_[node];
  if (q.busy || q.blocks.empty() || !healthy(node)) return;
  auto [tag, delivered] = q.blocks.front();
  q.blocks.pop_front();
  q.busy = true;
  auto applied = apply_block(node, tag);
  auto it = decided_.find(tag);
  if (it == decided_.end()) decided_.emplace(tag, applied.outcomes);
  sim_.schedule(node, ch_, kBlockApplied, BlockDone{tag, delivered, std::move(applied.outcomes)},
                cpu(node, applied.cost));
}

void BlockEngine::on_event(const Event& ev) {
  if (ev.kind == kBlockTimer) {
    if (std::any_cast<std::uint64_t>(ev.payload) == open_epoch_) close_block();
  } else if (ev.kind == kBlockApplied) {
    const auto& done = std::any_cast<const BlockDone&>(ev.payload);
    const auto& block = blocks_[done.tag - 1];
    for (std::size_t k = 0; k < block.txns.size(); ++k) {
      const auto i = block.txns[k];
      if (!pending(i)) continue;
      mark_ordered(i, done.delivered);
      finish(i, done.outcomes[k]);
    }
    auto& q = queues_[ev.target];
    q.busy = false;
    ++q.applied;
    pump(ev.target);
  }
}

bool BlockEngine::drained() const {
  for (auto r : replicas_) {
    if (!healthy(r)) continue;
    auto it = queues_.find(r);
    const std::uint64_t applied = it == queues_.end() ? 0 : it->second.applied;
    if (applied < delivered_max_) return false;
  }
  return true;
}

void BlockEngine::fill(RunResult& r) {
  for (auto tag : log_order_) {
    auto& ids = r.blocks.emplace_back();
    for (auto i : blocks_[tag - 1].txns) ids.push_back(txns_[i].id);
  }
}

Transaction BlockEngine::ledger_txn(std::size_t i, const Execution& ex, Outcome o) const {
  Transaction t;
  t.id = txns_[i].id;
  t.read_set = ex.reads;
  if (o == Outcome::Committed) t.write_set = ex.writes;
  t.op_count = txns_[i].op_count;
  t.call = txns_[i].call;
  t.outcome = o;
  return t;
}

VirtualTime BlockEngine::append_ledger(NodeId node, std::uint64_t tag, const std::vector<Execution>& execs,
                                       const std::vector<Outcome>& outcomes, std::optional<Digest> root) {
  auto& store = stores_[replica_index(node)];
  if (!store.ledger()) return 0;
  const auto& info = blocks_[tag - 1];
  Block b;
  b.proposer = info.proposer;
  b.state_root = root;
  for (std::size_t k = 0; k < info.txns.size(); ++k) b.txns.push_back(ledger_txn(info.txns[k], execs[k], outcomes[k]));
  return hash_cost(store.append_block(std::move(b)));
}

}  // namespace bcdb::detail
