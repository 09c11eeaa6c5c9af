// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by number; no arguments runs all of them. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "bcdb/authstore/ledger.hpp"
#include "bcdb/authstore/mbt.hpp"
#include "bcdb/authstore/mpt.hpp"
#include "bcdb/authstore/store.hpp"
#include "bcdb/consensus/measure.hpp"
#include "bcdb/consensus/quorum.hpp"
#include "bcdb/consensus/schedule.hpp"
#include "bcdb/core/digest.hpp"
#include "bcdb/core/rng.hpp"
#include "bcdb/harness/harness.hpp"
#include "bcdb/pipeline/oracle.hpp"
#include "bcdb/pipeline/pipeline.hpp"
#include "bcdb/sharding/sharding.hpp"

using namespace bcdb;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  // Records the first failure; later ones only count.
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

DesignConfig storage(ConcurrencyMode cc) {
  DesignConfig c;
  c.replication_model = ReplicationModel::StorageBased;
  c.concurrency_mode = cc;
  return c;
}

DesignConfig eov() {
  DesignConfig c;
  c.concurrency_mode = ConcurrencyMode::ExecuteOrderValidate;
  c.replication_approach = ReplicationApproach::SharedLog;
  return c;
}

WorkloadSpec ycsb(std::uint64_t txns, double theta = 0, std::uint32_t ops = 1) {
  WorkloadSpec s;
  s.record_count = 1000;
  s.record_size_bytes = 100;
  s.txn_count = txns;
  s.theta = theta;
  s.ops_per_txn = ops;
  s.arrival.rate = 2000;
  return s;
}

Key random_key(Rng& rng, std::size_t len) {
  Key k(len, '\0');
  for (auto& c : k) c = static_cast<char>(rng.below(256));
  return k;
}

Bytes random_value(Rng& rng, std::size_t max_len) {
  Bytes v(1 + rng.below(max_len));
  for (auto& x : v) x = static_cast<std::uint8_t>(rng.below(256));
  return v;
}

Verdict consensus_safety() {
  Verdict v;
  const auto start = Clock::now();
  std::uint64_t schedules = 0, committed = 0;
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    SafetySchedule cft;
    cft.max_crashes = 2;
    cft.partition = seed % 2 == 0;
    SafetySchedule equivocate;
    equivocate.model = FailureModel::BFT;
    equivocate.n = 4;
    equivocate.equivocators = 1;
    SafetySchedule silent = equivocate;
    silent.equivocators = 0;
    silent.silent = 1;
    for (const auto* s : {&cft, &equivocate, &silent}) {
      const auto r = run_safety_schedule(*s, seed);
      ++schedules;
      committed += r.committed;
      v.expect(!r.divergent, "seed " + std::to_string(seed) + ": " + r.detail);
    }
  }
  const double secs = seconds_since(start);
  v.expect(secs < 120, "took " + fmt(secs, 1) + " s");
  if (v.ok) {
    v.detail = std::to_string(schedules) + " schedules, 0 divergent, " + std::to_string(committed) +
               " commits, " + fmt(secs, 1) + " s";
  }
  return v;
}

// Smallest overlap of two q-subsets of n nodes, by enumerating subsets.
std::uint32_t enumerated_min_overlap(std::uint32_t n, std::uint32_t q) {
  std::vector<std::uint32_t> sets;
  for (std::uint32_t a = 0; a < (1u << n); ++a) {
    if (static_cast<std::uint32_t>(__builtin_popcount(a)) == q) sets.push_back(a);
  }
  std::uint32_t worst = n;
  for (auto a : sets) {
    for (auto b : sets) worst = std::min<std::uint32_t>(worst, static_cast<std::uint32_t>(__builtin_popcount(a & b)));
  }
  return worst;
}

Verdict quorum_arithmetic() {
  Verdict v;
  std::uint64_t checked = 0;
  for (std::uint32_t n = 1; n <= 31; ++n) {
    const auto tag = "N=" + std::to_string(n);
    // CFT: N = 2f+1 tolerates f, majority quorum.
    const auto fc = max_tolerated_failures(n, FailureModel::CFT);
    v.expect(2 * fc + 1 <= n && 2 * (fc + 1) + 1 > n, tag + " cft f");
    const auto qc = quorum_size(n, FailureModel::CFT);
    v.expect(qc == n / 2 + 1, tag + " cft quorum");
    // BFT: N = 3f+1 tolerates f with quorum 2f+1.
    const auto fb = max_tolerated_failures(n, FailureModel::BFT);
    v.expect(3 * fb + 1 <= n && 3 * (fb + 1) + 1 > n, tag + " bft f");
    if ((n - 1) % 3 == 0) v.expect(quorum_size(n, FailureModel::BFT) == 2 * fb + 1, tag + " bft quorum");
    const auto qb = protocol_quorum(n, FailureModel::BFT);

    // Every pair of quorums: the overlap of two q-subsets of n ranges over
    // max(0, 2q-n)..q and each value is attained, so checking the whole
    // range is exhaustive up to relabelling.
    for (auto [q, need, model] : {std::tuple{qc, 1u, "cft"}, std::tuple{qb, fb + 1, "bft"}}) {
      for (std::uint32_t overlap = (2 * q > n ? 2 * q - n : 0); overlap <= q; ++overlap) {
        ++checked;
        v.expect(overlap >= need, tag + " " + model + " quorums overlap in " + std::to_string(overlap));
      }
      v.expect(min_quorum_intersection(n, q) >= need, tag + " " + model + " min intersection");
      v.expect(q + (std::string(model) == "cft" ? fc : fb) <= n, tag + " " + model + " quorum reachable");
      if (n <= 14) {
        v.expect(enumerated_min_overlap(n, q) == min_quorum_intersection(n, q), tag + " " + model + " enumeration");
      }
    }
  }
  if (v.ok) v.detail = "N=1..31, " + std::to_string(checked) + " overlap classes, subsets enumerated for N<=14";
  return v;
}

Verdict message_scaling() {
  Verdict v;
  const auto raft5 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, 5).per_commit();
  const auto raft10 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, 10).per_commit();
  const auto pbft5 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::BFT, 5).per_commit();
  const auto pbft10 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::BFT, 10).per_commit();
  const double cft = raft10 / raft5, bft = pbft10 / pbft5;
  v.expect(cft <= 2.5, "cft grew " + fmt(cft) + "x");
  v.expect(bft >= 3.0, "bft grew " + fmt(bft) + "x");
  if (v.ok) v.detail = "N 5->10: cft x" + fmt(cft) + ", bft x" + fmt(bft);
  return v;
}

Verdict authenticated_storage() {
  Verdict v;
  Rng rng(4242);
  // Root determinism over insertion orders.
  std::map<Key, Bytes> uniq;
  while (uniq.size() < 64) uniq[random_key(rng, 1 + rng.below(6))] = random_value(rng, 24);
  std::vector<std::pair<Key, Bytes>> items(uniq.begin(), uniq.end());
  std::optional<Digest> mpt_root, mbt_root;
  for (int perm = 0; perm < 10'000; ++perm) {
    rng.shuffle(std::span(items));
    MerklePatriciaTrie mpt;
    MerkleBucketTree mbt;
    for (const auto& [k, val] : items) {
      mpt.put(k, val);
      mbt.put(k, val);
    }
    if (!mpt_root) {
      mpt_root = mpt.root();
      mbt_root = mbt.root();
    }
    v.expect(mpt.root() == *mpt_root, "mpt root depends on order");
    v.expect(mbt.root() == *mbt_root, "mbt root depends on order");
  }

  // Proofs: every honest triple verifies, every single mutation fails.
  std::uint64_t honest = 0, tampered = 0;
  for (auto kind : {IndexKind::MPT, IndexKind::MBT}) {
    auto index = make_index(kind);
    std::map<Key, Bytes> state;
    for (int i = 0; i < 500; ++i) {
      auto k = random_key(rng, 16);
      auto val = random_value(rng, 24);
      state[k] = val;
      index->put(k, val);
    }
    const auto root = index->root();
    std::vector<std::pair<Key, Bytes>> entries(state.begin(), state.end());
    std::map<Key, Bytes> proofs;
    for (const auto& [k, val] : entries) {
      auto p = index->prove(k);
      v.expect(p.has_value(), "no proof for a present key");
      if (!p) continue;
      v.expect(index->verify(root, k, val, *p), "honest proof rejected");
      proofs[k] = *p;
      ++honest;
    }
    for (int t = 0; t < 10'000; ++t) {
      const auto& [k0, v0] = entries[rng.below(entries.size())];
      auto p = proofs[k0];
      auto key = k0;
      auto val = v0;
      auto r = root;
      const auto flip = static_cast<std::uint8_t>(1 + rng.below(255));
      switch (rng.below(4)) {
        case 0: p[rng.below(p.size())] ^= flip; break;
        case 1: val[rng.below(val.size())] ^= flip; break;
        case 2: r[rng.below(r.size())] ^= flip; break;
        default: {
          auto& c = key[rng.below(key.size())];
          c = static_cast<char>(c ^ flip);
          break;
        }
      }
      if (key == k0 && val == v0 && r == root && p == proofs[k0]) continue;  // flip landed back on itself
      ++tampered;
      v.expect(!index->verify(r, key, val, p), "tampered proof accepted");
    }
  }
  v.expect(tampered >= 19'000, "only " + std::to_string(tampered) + " tamperings tried");

  MerkleBucketTree defaults;
  v.expect(defaults.depth() == 5, "mbt depth " + std::to_string(defaults.depth()));

  StateStore mpt_store(StorageMode{false, IndexKind::MPT});
  StateStore mbt_store(StorageMode{false, IndexKind::MBT});
  std::vector<WriteEntry> batch;
  for (int i = 0; i < 10'000; ++i) batch.push_back({record_key(static_cast<std::uint64_t>(i)), random_value(rng, 100)});
  mpt_store.apply(batch);
  mbt_store.apply(batch);
  const auto a = mpt_store.storage_breakdown().index_overhead_per_record;
  const auto b = mbt_store.storage_breakdown().index_overhead_per_record;
  v.expect(b < a, "mbt overhead " + fmt(b) + " not below mpt " + fmt(a));
  if (v.ok) {
    v.detail = "10000 orders, " + std::to_string(honest) + " honest proofs, " + std::to_string(tampered) +
               " tamperings rejected, mbt depth 5, overhead/record mbt " + fmt(b, 1) + " < mpt " + fmt(a, 1);
  }
  return v;
}

Verdict ledger_tamper_evidence() {
  Verdict v;
  Rng rng(77);
  LedgerStore ledger;
  for (std::uint64_t h = 0; h < 100; ++h) {
    Block blk;
    blk.height = h;
    blk.parent_digest = ledger.tip_digest();
    blk.proposer = static_cast<NodeId>(rng.below(4));
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) {
      Transaction t;
      t.id = rng.next();
      t.read_set = {{random_key(rng, 8), rng.below(10)}};
      t.write_set = {{random_key(rng, 8), random_value(rng, 16)}};
      blk.txns.push_back(t);
    }
    ledger.append(blk);
  }
  v.expect(!ledger.verify_chain().has_value(), "clean chain flagged");
  std::uint64_t mutations = 0;
  for (std::uint64_t h = 0; h < 100; ++h) {
    auto& raw = ledger.raw_block(h);
    for (std::size_t pos = 0; pos < raw.size(); ++pos) {
      for (std::uint8_t flip : {0x01, 0x80, 0xff}) {
        raw[pos] ^= flip;
        const auto at = ledger.verify_chain();
        ++mutations;
        v.expect(at == std::optional<std::uint64_t>(h),
                 "mutation in block " + std::to_string(h) + " byte " + std::to_string(pos) + " reported at " +
                     (at ? std::to_string(*at) : std::string("none")));
        raw[pos] ^= flip;
      }
    }
  }
  v.expect(!ledger.verify_chain().has_value(), "restored chain flagged");

  auto spec = ycsb(500);
  DesignConfig plain, ledgered;
  ledgered.storage_mode.ledger_enabled = true;
  const auto p = run_experiment(plain, spec, spec.arrival).storage;
  const auto l = run_experiment(ledgered, spec, spec.arrival).storage;
  const auto total = [](const StorageBreakdown& s) { return s.state_bytes + s.block_bytes + s.index_bytes; };
  v.expect(l.block_bytes > 0, "ledger run reports no block bytes");
  v.expect(p.block_bytes == 0, "state-only run reports block bytes");
  v.expect(total(l) > total(p), "ledger run storage not above state-only");
  if (v.ok) {
    v.detail = std::to_string(mutations) + " single-byte mutations located; storage " + std::to_string(total(l)) +
               " B with ledger vs " + std::to_string(total(p)) + " B state-only";
  }
  return v;
}

Verdict occ_serializability() {
  Verdict v;
  Rng rng(6060);
  std::uint64_t committed = 0, aborted = 0;
  for (int inst = 0; inst < 500; ++inst) {
    auto spec = ycsb(1 + rng.below(8), 0.5 + 0.5 * rng.unit(), static_cast<std::uint32_t>(1 + rng.below(3)));
    spec.kind = rng.below(2) ? WorkloadKind::YcsbUpdate : WorkloadKind::YcsbMixed;
    spec.record_count = 4 + rng.below(4);
    spec.seed = rng.next();
    spec.arrival.rate = 1e5;
    RunOptions o;
    o.seed = rng.next();
    const auto r = run_pipeline(storage(ConcurrencyMode::ConcurrentOCC), spec, o);
    committed += r.metrics.committed_count;
    aborted += r.metrics.conflict_aborts();
    v.expect(r.metrics.accounting_holds(), "instance " + std::to_string(inst) + " accounting");
    v.expect(committed_schedule_serializable(spec, r), "instance " + std::to_string(inst) + " not serializable");
  }
  if (v.ok) {
    v.detail = "500 instances, " + std::to_string(committed) + " commits, " + std::to_string(aborted) +
               " conflict aborts, 0 counterexamples";
  }
  return v;
}

Verdict concurrency_trends() {
  Verdict v;
  const std::vector<double> thetas{0, 0.2, 0.4, 0.6, 0.8, 1.0};
  auto spec = ycsb(2000);
  spec.record_count = WorkloadSpec{}.record_count;
  // Below theta 0.4 the expected rate is under 0.1%; one 2000-txn run is
  // too few draws to order it, so rates are pooled over 16 seeds.
  constexpr std::uint32_t kPool = 16;
  const auto eov_theta = abort_rate_over_theta(eov(), spec, thetas, 1, kPool);
  std::string series;
  for (double a : eov_theta.values) series += " " + fmt(a);
  v.expect(eov_theta.ok, "eov abort rate not monotone in theta:" + series);
  v.expect(eov_theta.values.back() > 0, "eov abort rate 0 at theta 1");

  for (const auto& [name, cfg] : {std::pair{"order-execute", DesignConfig{}},
                                  std::pair{"serial", [] {
                                              DesignConfig c;
                                              c.concurrency_mode = ConcurrencyMode::Serial;
                                              return c;
                                            }()},
                                  std::pair{"storage serial", storage(ConcurrencyMode::Serial)}}) {
    for (double theta : thetas) {
      auto s = spec;
      s.theta = theta;
      const auto m = run_experiment(cfg, s, s.arrival);
      v.expect(m.conflict_aborts() == 0, std::string(name) + " aborted at theta " + fmt(theta, 1));
      v.expect(m.committed_count == s.txn_count, std::string(name) + " lost transactions");
    }
  }

  // At 2000 tps ten-op transactions overload endorsement and time out
  // before validation; 500 tps is sustained at every ops value.
  auto sustained = spec;
  sustained.arrival.rate = 500;
  const auto ops = abort_rate_over_ops(eov(), sustained, {1, 2, 4, 6, 8, 10}, 1, kPool);
  v.expect(ops.ok, "eov abort rate not monotone in ops per txn");
  v.expect(ops.values.back() > ops.values.front(), "eov aborts at 10 ops not above 1 op");

  auto hot = spec;
  hot.arrival.rate = 50'000;
  const auto locking = storage(ConcurrencyMode::ConcurrentLocking);
  const auto l0 = run_experiment(locking, hot, hot.arrival);
  hot.theta = 1.0;
  const auto l1 = run_experiment(locking, hot, hot.arrival);
  const double drop = 1.0 - l1.throughput / l0.throughput;
  v.expect(drop > l1.abort_rate(), "locking drop " + fmt(drop) + " not above abort ratio " + fmt(l1.abort_rate()));
  if (v.ok) {
    v.detail = "eov abort rate " + fmt(eov_theta.values.front()) + ".." + fmt(eov_theta.values.back()) +
               " over theta; ops 1->10 " + fmt(ops.values.front()) + "->" + fmt(ops.values.back()) +
               "; serial/OE 0 conflicts; locking drop " + fmt(drop) + " > aborts " + fmt(l1.abort_rate());
  }
  return v;
}

Verdict record_size_sensitivity() {
  Verdict v;
  auto small = ycsb(1000);
  small.record_size_bytes = 10;
  auto big = small;
  big.record_size_bytes = 5000;
  DesignConfig mpt;
  mpt.storage_mode = {true, IndexKind::MPT};
  const auto ms = run_experiment(mpt, small, small.arrival);
  const auto mb = run_experiment(mpt, big, big.arrival);
  const double oe_ratio = mb.latency_mean / ms.latency_mean;
  v.expect(oe_ratio >= 10, "order-execute+mpt latency grew only " + fmt(oe_ratio) + "x");
  const auto plain = storage(ConcurrencyMode::ConcurrentOCC);
  const auto ps = run_experiment(plain, small, small.arrival);
  const auto pb = run_experiment(plain, big, big.arrival);
  const double lat_ratio = pb.latency_mean / ps.latency_mean;
  const double tput_ratio = ps.throughput / pb.throughput;
  v.expect(lat_ratio < 3, "plain latency grew " + fmt(lat_ratio) + "x");
  v.expect(tput_ratio < 3, "plain throughput fell " + fmt(tput_ratio) + "x");
  if (v.ok) {
    v.detail = "10->5000 B: order-execute+mpt latency x" + fmt(oe_ratio, 1) + ", plain storage latency x" +
               fmt(lat_ratio) + ", throughput /" + fmt(tput_ratio);
  }
  return v;
}

DesignConfig sharded(ShardingMode mode) {
  auto c = storage(ConcurrencyMode::ConcurrentLocking);
  c.sharding_mode.mode = mode;
  c.sharding_mode.shard_count = 4;
  c.sharding_mode.nodes_per_shard = 3;
  return c;
}

Verdict sharding() {
  Verdict v;
  auto spec = ycsb(1000, 0, 2);
  std::uint64_t runs = 0, checked = 0;
  for (auto mode : {ShardingMode::Trusted2PC, ShardingMode::BftCoordinated2PC}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      spec.seed = seed;
      ShardedRunOptions o;
      o.run.seed = seed;
      const auto r = run_sharded(sharded(mode), spec, o);
      const auto at = check_atomicity(r);
      ++runs;
      checked += at.checked;
      v.expect(at.ok, at.detail);
      for (const auto& rec : r.records) v.expect(well_formed(rec), "malformed 2pc record");
    }
  }
  spec.seed = 1;

  ShardedRunOptions crash;
  crash.coordinator_faults = {{0, FaultKind::Crashed, 200'000}};
  const auto trusted = run_sharded(sharded(ShardingMode::Trusted2PC), spec, crash);
  const auto bft = run_sharded(sharded(ShardingMode::BftCoordinated2PC), spec, crash);
  const auto tb = trusted.run.metrics.shards.blocked_count, bb = bft.run.metrics.shards.blocked_count;
  v.expect(tb >= 1, "trusted coordinator crash left nothing blocked");
  v.expect(bb == 0, "bft coordinator shard blocked " + std::to_string(bb));
  v.expect(check_atomicity(trusted).ok && check_atomicity(bft).ok, "atomicity after coordinator crash");

  auto closed = ycsb(4000, 0, 2);
  closed.arrival = Arrival{ArrivalMode::ClosedLoop, 0, 32};
  std::vector<double> tput;
  for (std::optional<VirtualTime> interval :
       {std::optional<VirtualTime>{}, std::optional<VirtualTime>{100'000}, std::optional<VirtualTime>{50'000},
        std::optional<VirtualTime>{25'000}}) {
    auto cfg = sharded(ShardingMode::Trusted2PC);
    cfg.sharding_mode.reconfiguration_interval = interval;
    const auto r = run_sharded(cfg, closed, {});
    v.expect(check_atomicity(r).ok, "atomicity under reconfiguration");
    tput.push_back(r.run.metrics.throughput);
  }
  v.expect(strictly_decreasing(tput), "throughput not strictly decreasing in reconfiguration frequency");
  if (v.ok) {
    v.detail = std::to_string(runs) + " runs, " + std::to_string(checked) + " cross-shard decisions atomic; crash: " +
               std::to_string(tb) + " blocked trusted vs 0 bft; tps fixed/100k/50k/25k " + fmt(tput[0], 0) + "/" +
               fmt(tput[1], 0) + "/" + fmt(tput[2], 0) + "/" + fmt(tput[3], 0);
  }
  return v;
}

Verdict forecast_consistency() {
  Verdict v;
  auto spec = WorkloadSpec{};
  spec.theta = 0;
  spec.txn_count = 2000;
  const auto corners = forecast_corners(DesignConfig{}, spec);
  const auto rep = check_forecast_consistency(corners);
  v.expect(!rep.skipped, "check skipped: " + rep.note);
  v.expect(rep.ok, rep.violations.empty() ? "not ok" : rep.violations.front());
  std::string peaks;
  for (const auto& p : corners) {
    if (!peaks.empty()) peaks += ", ";
    peaks += "tier " + std::to_string(forecast_band(p.cfg).tier) + " " + fmt(p.peak_throughput, 0);
  }
  if (v.ok) {
    v.detail = "peak tps " + peaks;
  } else {
    v.detail += " (" + peaks + ")";
  }
  return v;
}

Verdict determinism(Clock::time_point suite_start) {
  Verdict v;
  std::vector<std::pair<DesignConfig, WorkloadSpec>> points;
  points.emplace_back(DesignConfig{}, WorkloadSpec{});
  points.emplace_back(eov(), ycsb(1000, 0.9, 4));
  points.emplace_back(storage(ConcurrencyMode::ConcurrentLocking), ycsb(1000, 1.0, 2));
  auto sb = ycsb(1000);
  sb.kind = WorkloadKind::Smallbank;
  points.emplace_back(storage(ConcurrencyMode::ConcurrentOCC), sb);
  auto bft = sharded(ShardingMode::BftCoordinated2PC);
  bft.sharding_mode.reconfiguration_interval = 50'000;
  points.emplace_back(bft, ycsb(1000, 0.5, 2));
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto csv_of = [&] {
      ResultRow row;
      row.label = "point" + std::to_string(i);
      row.cfg = points[i].first;
      row.spec = points[i].second;
      row.seed = 99;
      auto out = run_experiment_traced(row.cfg, row.spec, row.spec.arrival, row.seed);
      row.metrics = out.metrics;
      return csv_text({row}) + out.trace;
    };
    v.expect(csv_of() == csv_of(), "point " + std::to_string(i) + " differs between runs");
  }
  Grid g;
  g.base_cfg = eov();
  g.base_spec = ycsb(500);
  g.axis = "theta";
  g.values = {"0", "0.5", "1"};
  const auto cells = expand(g);
  v.expect(csv_text(sweep(cells, 1)) == csv_text(sweep(cells, 3)), "parallel sweep differs from serial");
  const double secs = seconds_since(suite_start);
  v.expect(secs < 600, "suite took " + fmt(secs, 0) + " s");
  if (v.ok) {
    v.detail = std::to_string(points.size()) + " points byte-identical (csv + trace), sweep jobs 1 == 3; suite " +
               fmt(secs, 1) + " s";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const auto suite_start = Clock::now();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"consensus safety", consensus_safety},
      {"quorum arithmetic", quorum_arithmetic},
      {"message complexity scaling", message_scaling},
      {"authenticated storage", authenticated_storage},
      {"ledger tamper evidence", ledger_tamper_evidence},
      {"occ serializability", occ_serializability},
      {"concurrency trends", concurrency_trends},
      {"record size sensitivity", record_size_sensitivity},
      {"sharding", sharding},
      {"forecast consistency", forecast_consistency},
      {"determinism", [&] { return determinism(suite_start); }},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(n)) continue;
    const auto t = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("threw: ") + e.what();
    }
    failed += !v.ok;
    std::printf("%s %2d %-28s %6.1fs  %s\n", v.ok ? "PASS" : "FAIL", n, criteria[i].first.c_str(), seconds_since(t),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, only.empty() ? criteria.size() : only.size());
  return failed;
}
