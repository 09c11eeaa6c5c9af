// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>
#include <sstream>

#include "bcdb/consensus/replicator.hpp"
#include "bcdb/core/digest.hpp"
#include "bcdb/pipeline/execute.hpp"
#include "bcdb/sharding/sharding.hpp"

namespace bcdb {

namespace {

constexpr std::string_view kSubmit = "sh_submit";
constexpr std::string_view kToCoord = "sh_to_coord";
constexpr std::string_view kPrepare = "sh_prepare";
constexpr std::string_view kPrepared = "sh_prepared";
constexpr std::string_view kVote = "sh_vote";
constexpr std::string_view kDecision = "sh_decision";
constexpr std::string_view kLocal = "sh_local";
constexpr std::string_view kLocalExecuted = "sh_local_executed";
constexpr std::string_view kApplied = "sh_applied";
constexpr std::string_view kAck = "sh_ack";
constexpr std::string_view kDone = "sh_done";
constexpr std::string_view kRetry = "sh_retry";
constexpr std::string_view kReconfig = "sh_reconfig";
constexpr std::string_view kResume = "sh_resume";

enum class EntryKind { Vote, Decision, Local };
enum class CoordKind { Begin, Vote };

// Message to a shard's leader, retried while the shard has none.
struct ShardMsg {
  std::string_view kind;
  std::size_t txn = 0;
  std::uint32_t shard = 0;
  NodeId from = 0;
};

struct VoteMsg {
  std::size_t txn = 0;
  std::uint32_t shard = 0;
  Vote vote = Vote::Missing;
};

struct DoneMsg {
  std::size_t txn = 0;
  Outcome outcome = Outcome::Committed;
};

struct AppliedMsg {
  std::size_t txn = 0;
  std::uint32_t shard = 0;
  std::size_t replica = 0;
  bool first = false;
};

class ShardedEngine {
 public:
  ShardedEngine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                const ShardedRunOptions& opts)
      : cfg_(cfg),
        cost_(cfg.cost_model),
        spec_(spec),
        opts_(opts),
        arrival_(opts.run.arrival.value_or(spec.arrival)),
        txns_(std::move(txns)),
        timelines_(txns_.size()),
        st_(txns_.size()),
        sim_(opts.run.seed, sim_options()),
        map_(ShardMap::make(cfg.sharding_mode, spec.record_count, opts.run.seed)),
        bft_(cfg.sharding_mode.mode == ShardingMode::BftCoordinated2PC) {
    const auto& sc = cfg.sharding_mode;
    ch_ = sim_.add_channel([this](const Event& ev) { on_event(ev); });

    std::vector<std::vector<WriteEntry>> initial(sc.shard_count);
    for (auto& w : initial_records(spec)) initial[assign_shard(w.key, map_)].push_back(std::move(w));

    shards_.resize(sc.shard_count);
    const auto opts_for = replicator_options_for(cfg);
    for (std::uint32_t s = 0; s < sc.shard_count; ++s) {
      auto& sh = shards_[s];
      const auto first = sim_.add_nodes(sc.nodes_per_shard);
      for (std::uint32_t k = 0; k < sc.nodes_per_shard; ++k) sh.nodes.push_back(first + k);
      sh.service = sim_.add_nodes(1);
      StateStore base(cfg.storage_mode);
      base.apply(initial[s]);
      for (std::uint32_t k = 0; k < sc.nodes_per_shard; ++k) sh.stores.emplace_back(base);
      sh.view.put_batch(initial[s]);
      sh.applied.resize(sc.nodes_per_shard);
      sh.applied_count.resize(sc.nodes_per_shard);
      sh.repl = make_replicator(sim_, sh.nodes, sh.service, opts_for);
      sh.repl->set_commit_handler(
          [this, s](NodeId node, std::uint64_t, const Proposal& p) { on_shard_commit(s, node, p); });
    }

    if (bft_) {
      const std::uint32_t n = std::max<std::uint32_t>(4, sc.nodes_per_shard);
      const auto first = sim_.add_nodes(n);
      for (std::uint32_t k = 0; k < n; ++k) coord_nodes_.push_back(first + k);
      const auto service = sim_.add_nodes(1);
      auto o = opts_for;
      o.failure_model = FailureModel::BFT;
      o.approach = ReplicationApproach::Consensus;
      coord_ = make_replicator(sim_, coord_nodes_, service, o);
      coord_->set_commit_handler([this](NodeId node, std::uint64_t, const Proposal& p) { on_coord_commit(node, p); });
    } else {
      coord_nodes_.push_back(sim_.add_nodes(1));
    }
    client_ = sim_.add_nodes(1);

    std::uint64_t cross = 0;
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      auto& t = st_[i];
      for (const auto& k : txns_[i].touched_keys()) t.keys[assign_shard(k, map_)].push_back(k);
      for (const auto& [s, ks] : t.keys) t.shards.push_back(s);
      if (t.shards.empty()) t.shards.push_back(0);
      cross += t.shards.size() >= 2;
    }
    cross_ = cross;
  }

  ShardedRunResult run() {
    for (const auto& f : opts_.coordinator_faults) {
      if (f.node >= coord_nodes_.size()) throw ConfigError("fault names coordinator replica " + std::to_string(f.node));
      if (f.kind == FaultKind::Healthy) {
        sim_.heal(coord_nodes_[f.node], f.since);
      } else {
        sim_.inject_fault(coord_nodes_[f.node], f.kind, f.since);
      }
    }
    for (auto& sh : shards_) sh.repl->start();
    if (coord_) coord_->start();
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
    if (cfg_.sharding_mode.reconfiguration_interval) {
      sim_.schedule(client_, ch_, kReconfig, 0, *cfg_.sharding_mode.reconfiguration_interval);
    }

    const auto all_done = [&] { return done_ == txns_.size(); };
    bool stalled = false;
    const auto& ro = opts_.run;
    while (!all_done()) {
      auto next = sim_.next_time();
      if (!next || *next > ro.horizon || *next - last_progress_ > ro.stall_window) {
        stalled = true;
        break;
      }
      sim_.run(std::min(ro.horizon, last_progress_ + ro.stall_window), all_done);
    }
    if (!stalled) sim_.run(sim_.now() + ro.stall_window, [&] { return drained(); });
    return collect(stalled);
  }

 private:
  struct Shard {
    std::vector<NodeId> nodes;
    NodeId service = 0;
    std::unique_ptr<Replicator> repl;
    std::vector<StateStore> stores;
    std::vector<std::set<std::uint64_t>> applied;
    std::vector<std::uint64_t> applied_count;  // apply-type entries per replica
    std::uint64_t entries = 0;                 // apply-type entries committed anywhere
    VersionedKV view;                          // state as of the first replica to apply
    std::map<Key, std::size_t> locks;
    std::set<std::size_t> prepared, decided, local;
    struct Tag {
      EntryKind kind;
      std::size_t txn;
      Vote vote = Vote::Missing;
    };
    std::vector<Tag> tags;
    std::set<std::uint64_t> seen;
  };
  struct CoordTag {
    CoordKind kind;
    std::size_t txn;
    std::uint32_t shard = 0;
    Vote vote = Vote::Missing;
  };
  struct TxnState {
    std::map<std::uint32_t, std::vector<Key>> keys;
    std::vector<std::uint32_t> shards;
    std::optional<std::size_t> record;
    bool prepare_sent = false;
    std::set<std::uint32_t> voted_yes;   // vote durable in the shard
    std::set<std::uint32_t> applied_in;  // decision durable in the shard
    std::map<Key, std::optional<VersionedValue>> reads;  // gathered at prepare
    bool lock_conflict = false;
    Execution ex;
    std::optional<Outcome> outcome;  // once decided
    std::set<std::uint32_t> acks;
  };

  Simulator::Options sim_options() const {
    Simulator::Options o;
    o.latency = {cfg_.cost_model.net_latency_min, cfg_.cost_model.net_latency_mean};
    o.allow_byzantine = true;
    o.record_trace = opts_.run.record_trace;
    return o;
  }

  bool healthy(NodeId n) const { return sim_.fault(n) == FaultKind::Healthy; }

  std::optional<NodeId> shard_leader(std::uint32_t s) const {
    const auto& sh = shards_[s];
    auto l = sh.repl->leader();
    if (l && std::find(sh.nodes.begin(), sh.nodes.end(), *l) != sh.nodes.end()) return l;
    if (cfg_.replication_approach == ReplicationApproach::Consensus) return std::nullopt;
    for (auto n : sh.nodes) {
      if (healthy(n)) return n;
    }
    return std::nullopt;
  }

  void to_shard(ShardMsg m) {
    auto leader = shard_leader(m.shard);
    if (!leader) {
      sim_.schedule(m.from, ch_, kRetry, m, 10 * cost_.net_latency_mean);
      return;
    }
    sim_.send(m.from, *leader, ch_, m.kind, m);
  }

  std::uint64_t shard_tag(std::uint32_t s, EntryKind kind, std::size_t i, Vote v = Vote::Missing) {
    auto& sh = shards_[s];
    sh.tags.push_back({kind, i, v});
    return sh.tags.size();
  }

  void propose_shard(std::uint32_t s, EntryKind kind, std::size_t i, Vote v = Vote::Missing) {
    const auto tag = shard_tag(s, kind, i, v);
    Encoder e;
    e.put_u8(static_cast<std::uint8_t>(kind));
    e.put_u64(txns_[i].id);
    e.put_u32(s);
    e.put_u8(static_cast<std::uint8_t>(v));
    shards_[s].repl->propose(Proposal{tag, digest(std::move(e).take())});
  }

  void propose_coord(CoordTag t) {
    coord_tags_.push_back(t);
    Encoder e;
    e.put_u8(static_cast<std::uint8_t>(t.kind));
    e.put_u64(txns_[t.txn].id);
    e.put_u32(t.shard);
    e.put_u8(static_cast<std::uint8_t>(t.vote));
    coord_->propose(Proposal{coord_tags_.size(), digest(std::move(e).take())});
  }

  // Exclusive locks on every key the transaction touches in the shard;
  // a held lock makes the participant refuse rather than wait.
  bool try_lock(std::uint32_t s, std::size_t i) {
    auto& sh = shards_[s];
    for (const auto& k : st_[i].keys[s]) {
      auto it = sh.locks.find(k);
      if (it != sh.locks.end() && it->second != i) return false;
    }
    for (const auto& k : st_[i].keys[s]) sh.locks[k] = i;
    return true;
  }

  void unlock(std::uint32_t s, std::size_t i) {
    auto& sh = shards_[s];
    for (const auto& k : st_[i].keys[s]) {
      auto it = sh.locks.find(k);
      if (it != sh.locks.end() && it->second == i) sh.locks.erase(it);
    }
  }

  VirtualTime exec_cost(std::uint32_t s, std::size_t i) const {
    auto it = st_[i].keys.find(s);
    const auto n = it == st_[i].keys.end() ? 0 : it->second.size();
    return cost_.exec_time_per_op * static_cast<VirtualTime>(n);
  }

  void submit(std::size_t i) {
    if (draining_) {
      held_.push_back(i);
      return;
    }
    txns_[i].submit_time = sim_.now();
    last_progress_ = sim_.now();
    ++inflight_;
    const auto& t = st_[i];
    if (t.shards.size() == 1) {
      to_shard({kLocal, i, t.shards.front(), client_});
      return;
    }
    TwoPcRecord rec;
    rec.txn_id = txns_[i].id;
    rec.bft_coordinator = bft_;
    rec.coordinator = bft_ ? map_.shard_count : coord_nodes_.front();
    rec.participants = t.shards;
    for (auto s : t.shards) rec.votes[s] = Vote::Missing;
    st_[i].record = records_.size();
    records_.push_back(std::move(rec));
    if (bft_) {
      propose_coord({CoordKind::Begin, i});
    } else {
      sim_.send(client_, coord_nodes_.front(), ch_, kToCoord, i);
    }
  }

  void finish(std::size_t i, Outcome o) {
    auto& t = txns_[i];
    if (t.outcome != Outcome::Pending) return;
    t.finish(o);
    if (o == Outcome::Committed) t.commit_time = sim_.now();
    ++done_;
    --inflight_;
    last_progress_ = sim_.now();
    if (arrival_.mode == ArrivalMode::ClosedLoop && next_closed_ < txns_.size()) {
      sim_.schedule(client_, ch_, kSubmit, next_closed_++, 0);
    }
    if (draining_) maybe_pause();
  }

  void maybe_pause() {
    if (inflight_ != 0 || paused_) return;
    paused_ = true;
    sim_.schedule(client_, ch_, kResume, 0, cost_.reconfig_pause);
  }

  // Votes and gathered reads feed the decision; the coordinator executes
  // the transaction over the participants' reads once all are Yes.
  std::optional<Decision> record_vote(std::size_t i, std::uint32_t s, Vote v) {
    auto& rec = records_[*st_[i].record];
    if (rec.votes[s] == Vote::Missing) rec.votes[s] = v;
    if (rec.decision) return std::nullopt;
    auto d = decide(rec.votes);
    if (!d) return std::nullopt;
    auto& t = st_[i];
    if (*d == Decision::Commit) {
      t.ex = execute_txn(txns_[i], [&](const Key& k) -> std::optional<VersionedValue> {
        auto it = t.reads.find(k);
        return it == t.reads.end() ? std::nullopt : it->second;
      });
      if (!t.ex.ok) {
        d = Decision::Abort;
        t.outcome = Outcome::AbortedApplication;
      } else {
        t.outcome = Outcome::Committed;
      }
    } else {
      t.outcome = t.lock_conflict ? Outcome::AbortedWW : Outcome::AbortedApplication;
    }
    rec.decision = d;
    timelines_[i].executed = sim_.now();
    timelines_[i].ordered = sim_.now();
    txns_[i].order_time = sim_.now();
    return d;
  }

  void send_decisions(NodeId from, std::size_t i) {
    for (auto s : st_[i].shards) to_shard({kDecision, i, s, from});
  }

  void on_event(const Event& ev) {
    if (ev.kind == kSubmit) {
      submit(std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kRetry) {
      to_shard(std::any_cast<ShardMsg>(ev.payload));
    } else if (ev.kind == kToCoord) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      st_[i].prepare_sent = true;
      for (auto s : st_[i].shards) to_shard({kPrepare, i, s, ev.target});
    } else if (ev.kind == kPrepare) {
      const auto& m = std::any_cast<const ShardMsg&>(ev.payload);
      auto& sh = shards_[m.shard];
      if (!sh.prepared.insert(m.txn).second) return;
      sim_.schedule(ev.target, ch_, kPrepared, m, sim_.reserve_cpu(ev.target, exec_cost(m.shard, m.txn)) - sim_.now());
    } else if (ev.kind == kPrepared) {
      const auto& m = std::any_cast<const ShardMsg&>(ev.payload);
      Vote v = Vote::Yes;
      if (opts_.vetoes.contains({txns_[m.txn].id, m.shard})) {
        v = Vote::No;
      } else if (!try_lock(m.shard, m.txn)) {
        v = Vote::No;
        st_[m.txn].lock_conflict = true;
      } else {
        for (const auto& k : st_[m.txn].keys[m.shard]) st_[m.txn].reads[k] = shards_[m.shard].view.get(k);
      }
      // The vote is durable in the shard before the coordinator sees it.
      propose_shard(m.shard, EntryKind::Vote, m.txn, v);
    } else if (ev.kind == kVote) {
      const auto& m = std::any_cast<const VoteMsg&>(ev.payload);
      if (record_vote(m.txn, m.shard, m.vote)) send_decisions(ev.target, m.txn);
    } else if (ev.kind == kDecision) {
      const auto& m = std::any_cast<const ShardMsg&>(ev.payload);
      if (!shards_[m.shard].decided.insert(m.txn).second) return;
      propose_shard(m.shard, EntryKind::Decision, m.txn);
    } else if (ev.kind == kLocal) {
      const auto& m = std::any_cast<const ShardMsg&>(ev.payload);
      if (!shards_[m.shard].local.insert(m.txn).second) return;
      if (!try_lock(m.shard, m.txn)) {
        sim_.send(ev.target, client_, ch_, kDone, DoneMsg{m.txn, Outcome::AbortedWW});
        return;
      }
      sim_.schedule(ev.target, ch_, kLocalExecuted, m,
                    sim_.reserve_cpu(ev.target, exec_cost(m.shard, m.txn)) - sim_.now());
    } else if (ev.kind == kLocalExecuted) {
      const auto& m = std::any_cast<const ShardMsg&>(ev.payload);
      const auto& view = shards_[m.shard].view;
      auto& t = st_[m.txn];
      t.ex = execute_txn(txns_[m.txn], [&](const Key& k) { return view.get(k); });
      timelines_[m.txn].executed = sim_.now();
      if (!t.ex.ok) {
        unlock(m.shard, m.txn);
        sim_.send(ev.target, client_, ch_, kDone, DoneMsg{m.txn, Outcome::AbortedApplication});
        return;
      }
      t.outcome = Outcome::Committed;
      propose_shard(m.shard, EntryKind::Local, m.txn);
    } else if (ev.kind == kApplied) {
      const auto& m = std::any_cast<const AppliedMsg&>(ev.payload);
      ++shards_[m.shard].applied_count[m.replica];
      if (m.first) sim_.send(ev.target, client_, ch_, kAck, VoteMsg{m.txn, m.shard, Vote::Yes});
    } else if (ev.kind == kAck) {
      const auto& m = std::any_cast<const VoteMsg&>(ev.payload);
      auto& t = st_[m.txn];
      t.acks.insert(m.shard);
      if (t.acks.size() == t.shards.size()) finish(m.txn, *t.outcome);
    } else if (ev.kind == kDone) {
      const auto& m = std::any_cast<const DoneMsg&>(ev.payload);
      finish(m.txn, m.outcome);
    } else if (ev.kind == kReconfig) {
      draining_ = true;
      maybe_pause();
    } else if (ev.kind == kResume) {
      map_ = reconfigure(map_, map_.epoch + 1);
      ++reconfigurations_;
      paused_ = false;
      draining_ = false;
      auto held = std::move(held_);
      held_.clear();
      for (auto i : held) submit(i);
      sim_.schedule(client_, ch_, kReconfig, 0, *cfg_.sharding_mode.reconfiguration_interval);
    }
  }

  void on_shard_commit(std::uint32_t s, NodeId node, const Proposal& p) {
    auto& sh = shards_[s];
    if (p.tag == 0 || p.tag > sh.tags.size()) return;
    const auto tag = sh.tags[p.tag - 1];
    const bool first = sh.seen.insert(p.tag).second;
    const auto i = tag.txn;
    if (tag.kind == EntryKind::Vote) {
      if (!first) return;
      if (tag.vote == Vote::Yes) st_[i].voted_yes.insert(s);
      if (bft_) {
        propose_coord({CoordKind::Vote, i, s, tag.vote});
      } else {
        sim_.send(node, coord_nodes_.front(), ch_, kVote, VoteMsg{i, s, tag.vote});
      }
      return;
    }
    // Decision or local commit: every replica applies.
    const auto replica = static_cast<std::size_t>(std::find(sh.nodes.begin(), sh.nodes.end(), node) - sh.nodes.begin());
    const bool commit = st_[i].outcome == Outcome::Committed;
    std::vector<WriteEntry> writes;
    if (commit) {
      for (const auto& w : st_[i].ex.writes) {
        if (assign_shard(w.key, map_) == s) writes.push_back(w);
      }
    }
    auto& store = sh.stores[replica];
    VirtualTime cost = store.apply(writes).cost(cost_);
    if (cfg_.replication_model == ReplicationModel::TransactionBased) {
      cost += cost_.sig_verify_time + exec_cost(s, i);
    }
    if (commit) {
      sh.applied[replica].insert(txns_[i].id);
      if (store.ledger()) {
        Block b;
        b.proposer = node;
        Transaction t;
        t.id = txns_[i].id;
        t.write_set = writes;
        t.outcome = Outcome::Committed;
        b.txns.push_back(std::move(t));
        if (cfg_.storage_mode.index != IndexKind::Plain) b.state_root = store.index_root();
        cost += store.append_block(std::move(b)).cost(cost_);
      }
    }
    if (first) {
      ++sh.entries;
      st_[i].applied_in.insert(s);
      if (commit) sh.view.put_batch(writes);
      unlock(s, i);
      if (tag.kind == EntryKind::Local) {
        timelines_[i].ordered = sim_.now();
        txns_[i].order_time = sim_.now();
      }
    }
    sim_.schedule(node, ch_, kApplied, AppliedMsg{i, s, replica, first}, sim_.reserve_cpu(node, cost) - sim_.now());
  }

  // Every coordinator replica runs the same state machine over the log and
  // tells the participants once its own tally decides.
  void on_coord_commit(NodeId node, const Proposal& p) {
    if (p.tag == 0 || p.tag > coord_tags_.size()) return;
    const auto t = coord_tags_[p.tag - 1];
    if (t.kind == CoordKind::Begin) {
      st_[t.txn].prepare_sent = true;
      for (auto s : st_[t.txn].shards) to_shard({kPrepare, t.txn, s, node});
      return;
    }
    auto& tally = tallies_[node][t.txn];
    tally[t.shard] = t.vote;
    for (auto s : st_[t.txn].shards) tally.emplace(s, Vote::Missing);
    if (!decide(tally)) return;
    if (!decided_at_[node].insert(t.txn).second) return;
    // The first replica to decide fills the record.
    for (const auto& [s, v] : tally) record_vote(t.txn, s, v);
    send_decisions(node, t.txn);
  }

  bool drained() const {
    for (const auto& sh : shards_) {
      for (std::size_t k = 0; k < sh.nodes.size(); ++k) {
        if (healthy(sh.nodes[k]) && sh.applied_count[k] < sh.entries) return false;
      }
    }
    return true;
  }

  ShardedRunResult collect(bool stalled) {
    ShardedRunResult out;
    auto& r = out.run;
    r.metrics.messages = sim_.messages_sent();
    summarize(r.metrics, txns_, timelines_);
    r.metrics.stalled = stalled;
    auto& ss = r.metrics.shards;
    ss.shard_count = map_.shard_count;
    ss.cross_shard_txns = cross_;
    ss.cross_shard_ratio = txns_.empty() ? 0 : static_cast<double>(cross_) / static_cast<double>(txns_.size());
    ss.reconfig_interval = cfg_.sharding_mode.reconfiguration_interval;
    ss.reconfigurations = reconfigurations_;

    const bool coordinator_down = !bft_ && !healthy(coord_nodes_.front());
    std::uint64_t cross_committed = 0;
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (!st_[i].record) continue;
      auto& rec = records_[*st_[i].record];
      // Participants left prepared by a dead coordinator: either no
      // decision was reached, or a commit reached only some shards.
      const auto& t = st_[i];
      if (coordinator_down && t.prepare_sent) {
        if (!rec.decision && !t.voted_yes.empty()) {
          rec.decision = Decision::Blocked;
          rec.stuck_shards.assign(t.voted_yes.begin(), t.voted_yes.end());
        } else if (*rec.decision == Decision::Commit && t.applied_in.size() < rec.participants.size()) {
          rec.decision = Decision::Blocked;
          for (auto s : rec.participants) {
            if (!t.applied_in.contains(s)) rec.stuck_shards.push_back(s);
          }
        }
        if (rec.decision == Decision::Blocked) ++ss.blocked_count;
      }
      if (txns_[i].outcome == Outcome::Committed) ++cross_committed;
    }
    out.messages_per_cross_shard_commit =
        cross_committed == 0 ? 0 : static_cast<double>(r.metrics.messages) / static_cast<double>(cross_committed);

    for (auto& sh : shards_) {
      auto& digests = out.shard_digests.emplace_back();
      auto& health = out.shard_healthy.emplace_back();
      for (std::size_t k = 0; k < sh.nodes.size(); ++k) {
        digests.push_back(state_digest(sh.stores[k].kv()));
        health.push_back(healthy(sh.nodes[k]));
        r.state_digests.push_back(digests.back());
        r.healthy.push_back(health.back());
        r.index_roots.push_back(cfg_.storage_mode.index == IndexKind::Plain
                                    ? std::nullopt
                                    : std::optional<Digest>(sh.stores[k].index_root()));
      }
      out.applied.push_back(sh.applied);
      const auto live = std::find(health.begin(), health.end(), true);
      out.shard_states.push_back(sh.stores[live == health.end() ? 0 : live - health.begin()].kv());
    }
    // Storage sums one healthy replica of each shard.
    for (auto& sh : shards_) {
      for (std::size_t k = 0; k < sh.nodes.size(); ++k) {
        if (!healthy(sh.nodes[k])) continue;
        const auto b = sh.stores[k].storage_breakdown();
        auto& m = r.metrics.storage;
        m.records += b.records;
        m.state_bytes += b.state_bytes;
        m.block_bytes += b.block_bytes;
        m.index_bytes += b.index_bytes;
        break;
      }
    }
    if (r.metrics.storage.records > 0) {
      r.metrics.storage.index_overhead_per_record =
          static_cast<double>(r.metrics.storage.index_bytes) / static_cast<double>(r.metrics.storage.records);
    }
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (txns_[i].outcome == Outcome::Committed) r.executions[txns_[i].id] = st_[i].ex;
    }
    if (opts_.run.record_trace) {
      std::ostringstream os;
      sim_.write_trace(os);
      r.trace = os.str();
    }
    out.map = map_;
    out.records = std::move(records_);
    r.txns = std::move(txns_);
    r.timelines = std::move(timelines_);
    return out;
  }

  DesignConfig cfg_;
  CostModel cost_;
  WorkloadSpec spec_;
  ShardedRunOptions opts_;
  Arrival arrival_;
  std::vector<Transaction> txns_;
  std::vector<TxnTimeline> timelines_;
  std::vector<TxnState> st_;
  Simulator sim_;
  ChannelId ch_ = 0;
  ShardMap map_;
  bool bft_;
  std::vector<Shard> shards_;
  std::vector<NodeId> coord_nodes_;
  std::unique_ptr<Replicator> coord_;
  std::vector<CoordTag> coord_tags_;
  std::map<NodeId, std::map<std::size_t, std::map<std::uint32_t, Vote>>> tallies_;
  std::map<NodeId, std::set<std::size_t>> decided_at_;
  NodeId client_ = 0;
  std::vector<TwoPcRecord> records_;
  std::uint64_t cross_ = 0;
  std::size_t done_ = 0;
  std::size_t inflight_ = 0;
  std::size_t next_closed_ = 0;
  VirtualTime last_progress_ = 0;
  bool draining_ = false;
  bool paused_ = false;
  std::vector<std::size_t> held_;
  std::uint64_t reconfigurations_ = 0;
};

void require_valid_workload(const WorkloadSpec& spec) {
  auto bad = validate_workload(spec);
  if (!bad.empty()) throw ConfigError("invalid workload: " + bad.front().field + ": " + bad.front().message);
}

}  // namespace

ShardedRunResult run_sharded(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                             const ShardedRunOptions& opts) {
  require_valid(cfg);
  require_valid_workload(spec);
  if (cfg.sharding_mode.mode == ShardingMode::None) throw ConfigError("run_sharded needs a 2PC sharding mode");
  return ShardedEngine(cfg, spec, std::move(txns), opts).run();
}

ShardedRunResult run_sharded(const DesignConfig& cfg, const WorkloadSpec& spec, const ShardedRunOptions& opts) {
  require_valid(cfg);
  require_valid_workload(spec);
  return run_sharded(cfg, spec, generate(spec), opts);
}

}  // namespace bcdb
