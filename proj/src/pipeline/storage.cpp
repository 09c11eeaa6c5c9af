// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "bcdb/core/digest.hpp"
#include "bcdb/pipeline/occ.hpp"
#include "engine.hpp"

namespace bcdb {

namespace {

constexpr std::string_view kRetry = "st_retry";
constexpr std::string_view kRead = "st_read";
constexpr std::string_view kReadReply = "st_read_reply";
constexpr std::string_view kExecuted = "st_executed";
constexpr std::string_view kAck = "st_ack";
constexpr std::string_view kApplied = "st_applied";
constexpr std::string_view kAppliedAck = "st_applied_ack";
constexpr std::string_view kLockTimeout = "st_lock_timeout";
constexpr std::string_view kGranted = "st_granted";

// Worker lanes of the transaction manager.
constexpr std::uint32_t kManagerLanes = 8;

// Storage-based replication under a trusted transaction manager (the
// client node). Reads go to the leader, execution happens at the manager,
// and each write is replicated as its own log entry, followed by a commit
// record that makes replicas apply the transaction.
class StorageEngine final : public detail::Engine {
 public:
  StorageEngine(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                const RunOptions& opts, ConcurrencyMode cc)
      : Engine(cfg, spec, std::move(txns), opts), cc_(cc), st_(txns_.size()), view_(stores_.front().kv()) {}

 private:
  struct TxnState {
    std::uint64_t start_ts = 0;
    Execution ex;
    std::size_t prewrites_pending = 0;
    std::vector<Key> keys;  // sorted lock order
    std::size_t held = 0;   // keys[0..held) are latched
    bool latched = false;
    bool active = false;
  };
  struct TagInfo {
    std::size_t txn = 0;
    bool commit_record = false;
  };
  struct Latch {
    std::optional<std::size_t> holder;
    std::deque<std::size_t> waiters;
  };

  void on_submit(std::size_t i) override {
    switch (cc_) {
      case ConcurrencyMode::ConcurrentLocking:
        st_[i].keys = txns_[i].touched_keys();
        sim_.schedule(client_, ch_, kLockTimeout, i, cost_.lock_wait_timeout);
        acquire(i);
        break;
      case ConcurrencyMode::ConcurrentOCC:
        begin(i);
        break;
      default:
        serial_queue_.push_back(i);
        if (!serial_busy_) next_serial();
        break;
    }
  }

  void next_serial() {
    serial_busy_ = false;
    while (!serial_queue_.empty()) {
      auto i = serial_queue_.front();
      serial_queue_.pop_front();
      if (!pending(i)) continue;
      serial_busy_ = true;
      begin(i);
      return;
    }
  }

  // Latches are taken in key order, so waits never form a cycle.
  void acquire(std::size_t i) {
    auto& s = st_[i];
    while (s.held < s.keys.size()) {
      auto& l = latches_[s.keys[s.held]];
      if (l.holder && *l.holder != i) {
        l.waiters.push_back(i);
        return;
      }
      l.holder = i;
      ++s.held;
    }
    s.latched = true;
    begin(i);
  }

  void release(std::size_t i) {
    auto& s = st_[i];
    for (std::size_t k = 0; k < s.held; ++k) {
      auto& l = latches_[s.keys[k]];
      if (l.holder != i) continue;
      l.holder.reset();
      while (!l.waiters.empty()) {
        auto j = l.waiters.front();
        l.waiters.pop_front();
        if (!pending(j)) continue;
        l.holder = j;
        ++st_[j].held;
        sim_.schedule(client_, ch_, kGranted, j, 0);
        break;
      }
    }
    s.held = 0;
  }

  void begin(std::size_t i) {
    auto& s = st_[i];
    if (!s.active) {
      s.active = true;
      ++active_;
      peak_ = std::max(peak_, active_);
    }
    s.start_ts = occ_.begin();
    read(i);
  }

  void read(std::size_t i) {
    auto leader = leader_replica();
    if (!leader) {
      sim_.schedule(client_, ch_, kRetry, i, 10 * cost_.net_latency_mean);
      return;
    }
    sim_.send(client_, *leader, ch_, kRead, i);
  }

  std::uint32_t free_lane() const {
    std::uint32_t best = 0;
    for (std::uint32_t l = 1; l < kManagerLanes; ++l) {
      if (sim_.cpu_free_at(client_, l) < sim_.cpu_free_at(client_, best)) best = l;
    }
    return best;
  }

  void end(std::size_t i, Outcome o) {
    auto& s = st_[i];
    finish(i, o);
    if (s.active) {
      s.active = false;
      --active_;
    }
    release(i);
    if (cc_ == ConcurrencyMode::Serial) next_serial();
  }

  void on_executed(std::size_t i) {
    auto& s = st_[i];
    mark_executed(i);
    if (!s.ex.ok) {
      end(i, Outcome::AbortedApplication);
      return;
    }
    std::vector<Key> reads, writes;
    for (const auto& r : s.ex.reads) reads.push_back(r.key);
    for (const auto& w : s.ex.writes) writes.push_back(w.key);
    if (cc_ == ConcurrencyMode::ConcurrentOCC) {
      // A key whose last writer has not reached the log yet counts as a
      // write-write conflict; otherwise commit records could be ordered
      // against their validation order.
      for (const auto& k : reads) {
        if (inflight_.contains(k)) {
          end(i, Outcome::AbortedWW);
          return;
        }
      }
      for (const auto& k : writes) {
        if (inflight_.contains(k)) {
          end(i, Outcome::AbortedWW);
          return;
        }
      }
      auto verdict = occ_.commit(s.start_ts, reads, writes);
      if (verdict != Outcome::Committed) {
        end(i, verdict);
        return;
      }
    }
    if (writes.empty()) {
      mark_ordered(i, sim_.now());
      end(i, Outcome::Committed);
      return;
    }
    view_.put_batch(s.ex.writes);
    for (const auto& k : writes) inflight_[k] = i;
    s.prewrites_pending = s.ex.writes.size();
    for (const auto& w : s.ex.writes) {
      Encoder e;
      e.put_u64(txns_[i].id);
      e.put_string(w.key);
      e.put_bytes(w.value);
      repl_->propose(Proposal{new_tag(i, false), digest(std::move(e).take())});
    }
  }

  std::uint64_t new_tag(std::size_t i, bool commit_record) {
    tags_.push_back({i, commit_record});
    return tags_.size();
  }

  void on_event(const Event& ev) override {
    if (ev.kind == kRetry) {
      read(std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kRead) {
      sim_.send(ev.target, client_, ch_, kReadReply, std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kReadReply) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (!pending(i)) return;
      st_[i].ex = execute_txn(txns_[i], [&](const Key& k) { return view_.get(k); });
      const auto cost = cost_.exec_time_per_op * txns_[i].op_count;
      sim_.schedule(client_, ch_, kExecuted, i, cpu(client_, cost, free_lane()));
    } else if (ev.kind == kExecuted) {
      on_executed(std::any_cast<std::size_t>(ev.payload));
    } else if (ev.kind == kAck) {
      const auto& info = tags_[std::any_cast<std::uint64_t>(ev.payload) - 1];
      const auto i = info.txn;
      if (info.commit_record) {
        for (const auto& w : st_[i].ex.writes) {
          auto it = inflight_.find(w.key);
          if (it != inflight_.end() && it->second == i) inflight_.erase(it);
        }
        return;
      }
      if (--st_[i].prewrites_pending == 0) {
        mark_ordered(i, sim_.now());
        repl_->propose(Proposal{new_tag(i, true), digest(to_bytes("commit" + std::to_string(txns_[i].id)))});
      }
    } else if (ev.kind == kApplied) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (acked_apply_.insert(i).second) sim_.send(ev.target, client_, ch_, kAppliedAck, i);
      ++applied_[ev.target];
    } else if (ev.kind == kAppliedAck) {
      end(std::any_cast<std::size_t>(ev.payload), Outcome::Committed);
    } else if (ev.kind == kLockTimeout) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (!pending(i) || st_[i].latched) return;
      for (auto& [k, l] : latches_) std::erase(l.waiters, i);
      end(i, Outcome::AbortedBlocked);
    } else if (ev.kind == kGranted) {
      const auto i = std::any_cast<std::size_t>(ev.payload);
      if (pending(i)) {
        acquire(i);
      } else {
        release(i);
      }
    }
  }

  void on_commit(NodeId node, const Proposal& p) override {
    if (p.tag == 0 || p.tag > tags_.size()) return;
    const auto& info = tags_[p.tag - 1];
    if (acked_tags_.insert(p.tag).second) {
      sim_.send(node, client_, ch_, kAck, p.tag);
      if (info.commit_record) ++commit_records_;
    }
    if (!info.commit_record) return;
    const auto i = info.txn;
    auto& store = stores_[replica_index(node)];
    const auto& writes = st_[i].ex.writes;
    VirtualTime cost = hash_cost(store.apply(writes));
    if (store.ledger()) {
      Block b;
      b.proposer = node;
      Transaction t;
      t.id = txns_[i].id;
      t.read_set = st_[i].ex.reads;
      t.write_set = writes;
      t.op_count = txns_[i].op_count;
      t.call = txns_[i].call;
      t.outcome = Outcome::Committed;
      b.txns.push_back(std::move(t));
      if (cfg_.storage_mode.index != IndexKind::Plain) b.state_root = store.index_root();
      cost += hash_cost(store.append_block(std::move(b)));
    }
    sim_.schedule(node, ch_, kApplied, i, cpu(node, cost));
  }

  bool drained() const override {
    for (auto r : replicas_) {
      if (!healthy(r)) continue;
      auto it = applied_.find(r);
      if ((it == applied_.end() ? 0 : it->second) < commit_records_) return false;
    }
    return true;
  }

  void fill(RunResult& r) override {
    r.peak_concurrency = peak_;
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (txns_[i].outcome == Outcome::Committed) r.executions[txns_[i].id] = st_[i].ex;
    }
  }

  ConcurrencyMode cc_;
  std::vector<TxnState> st_;
  VersionedKV view_;  // the manager's view: latest committed values
  OccValidator occ_;
  std::map<Key, std::size_t> inflight_;
  std::map<Key, Latch> latches_;
  std::deque<std::size_t> serial_queue_;
  bool serial_busy_ = false;
  std::vector<TagInfo> tags_;
  std::set<std::uint64_t> acked_tags_;
  std::set<std::size_t> acked_apply_;
  std::map<NodeId, std::uint64_t> applied_;
  std::uint64_t commit_records_ = 0;  // distinct ones, delivered anywhere
  std::uint32_t active_ = 0;
  std::uint32_t peak_ = 0;
};

}  // namespace

RunResult run_storage_replicated(const DesignConfig& cfg, const WorkloadSpec& spec, std::vector<Transaction> txns,
                                 ConcurrencyMode cc, const RunOptions& opts) {
  if (cfg.replication_model != ReplicationModel::StorageBased) {
    throw ConfigError("storage-based pipeline needs storage-based replication");
  }
  if (cc != ConcurrencyMode::Serial && cc != ConcurrencyMode::ConcurrentOCC && cc != ConcurrencyMode::ConcurrentLocking) {
    throw ConfigError("storage-based pipeline runs serial, OCC or locking concurrency");
  }
  return StorageEngine(cfg, spec, std::move(txns), opts, cc).run();
}

}  // namespace bcdb
