// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "bcdb/sharding/sharding.hpp"
#include "doctest.h"

using namespace bcdb;

namespace {

ShardingConfig layout(std::uint32_t shards, ShardScheme scheme = ShardScheme::Hash) {
  ShardingConfig c;
  c.mode = ShardingMode::Trusted2PC;
  c.shard_count = shards;
  c.nodes_per_shard = 3;
  c.scheme = scheme;
  return c;
}

DesignConfig sharded(ShardingMode mode, std::uint32_t shards = 4) {
  DesignConfig c;
  c.replication_model = ReplicationModel::StorageBased;
  c.concurrency_mode = ConcurrencyMode::ConcurrentLocking;
  c.sharding_mode = layout(shards);
  c.sharding_mode.mode = mode;
  return c;
}

WorkloadSpec spec_of(std::uint64_t txns, std::uint32_t ops = 2) {
  WorkloadSpec s;
  s.record_count = 1000;
  s.record_size_bytes = 100;
  s.txn_count = txns;
  s.ops_per_txn = ops;
  s.arrival.rate = 2000;
  return s;
}

std::vector<Transaction> cross_only(const WorkloadSpec& spec, const ShardMap& map) {
  std::vector<Transaction> out;
  for (auto& t : generate(spec)) {
    if (shards_of(t, map).size() >= 2) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("assign_shard: one shard maps everything to 0") {
  auto m = ShardMap::make(layout(1), 100, 1);
  for (int i = 0; i < 100; ++i) CHECK(assign_shard(record_key(i), m) == 0);
  CHECK(assign_shard("anything", m) == 0);
}

TEST_CASE("assign_shard: hash scheme is stable and balanced") {
  auto m = ShardMap::make(layout(4), 100000, 1);
  auto again = ShardMap::make(layout(4), 100000, 99);
  std::map<std::uint32_t, int> count;
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto key = "key-" + std::to_string(rng.next());
    const auto s = assign_shard(key, m);
    CHECK(s == assign_shard(key, again));
    ++count[s];
  }
  REQUIRE(count.size() == 4);
  for (const auto& [s, n] : count) {
    CHECK(n > 23000);
    CHECK(n < 27000);
  }
}

TEST_CASE("assign_shard: range scheme covers the key space in order") {
  auto m = ShardMap::make(layout(4, ShardScheme::Range), 1000, 1);
  CHECK(m.range_bounds.size() == 3);
  std::uint32_t prev = 0;
  std::map<std::uint32_t, int> count;
  for (int i = 0; i < 1000; ++i) {
    const auto s = assign_shard(record_key(i), m);
    CHECK(s >= prev);
    prev = s;
    ++count[s];
  }
  for (const auto& [s, n] : count) CHECK(n == 250);
  // Keys outside the generated space still land somewhere.
  CHECK(assign_shard("", m) == 0);
  CHECK(assign_shard("zzz", m) == 3);
}

TEST_CASE("reconfigure: permutes members, keeps the key map") {
  auto m = ShardMap::make(layout(4), 1000, 7);
  std::vector<std::uint32_t> all;
  for (const auto& g : m.members) all.insert(all.end(), g.begin(), g.end());
  std::sort(all.begin(), all.end());
  for (std::uint32_t i = 0; i < 12; ++i) CHECK(all[i] == i);
  auto next = reconfigure(m, 1);
  CHECK(next.epoch == 1);
  CHECK(next.members != m.members);
  CHECK(next.range_bounds == m.range_bounds);
  for (int i = 0; i < 200; ++i) CHECK(assign_shard(record_key(i), next) == assign_shard(record_key(i), m));
  CHECK(reconfigure(m, 1) == next);
  CHECK_THROWS_AS(reconfigure(m, 2), std::invalid_argument);
  CHECK_THROWS_AS(reconfigure(m, 0), std::invalid_argument);
}

TEST_CASE("cross_shard_ratio") {
  auto one = ShardMap::make(layout(1), 1000, 1);
  auto four = ShardMap::make(layout(4), 1000, 1);
  auto spec = spec_of(20000, 2);
  auto txns = generate(spec);
  CHECK(cross_shard_ratio(txns, one) == 0);
  // Two uniform keys over 4 shards: 1 - 1/4, less the rare repeated key.
  CHECK(cross_shard_ratio(txns, four) == doctest::Approx(0.75).epsilon(0.02));
  double prev = 0;
  for (std::uint32_t ops : {1u, 2u, 4u, 10u}) {
    auto s = spec_of(5000, ops);
    const auto r = cross_shard_ratio(generate(s), four);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(prev > 0.9);
  CHECK(cross_shard_ratio(generate(spec_of(5000, 1)), four) == 0);
}

TEST_CASE("decide and record well-formedness") {
  CHECK(decide({{0, Vote::Yes}, {1, Vote::Yes}}) == Decision::Commit);
  CHECK(decide({{0, Vote::Yes}, {1, Vote::No}}) == Decision::Abort);
  CHECK(decide({{0, Vote::Missing}, {1, Vote::No}}) == Decision::Abort);
  CHECK_FALSE(decide({{0, Vote::Yes}, {1, Vote::Missing}}));
  CHECK_FALSE(decide({}));
  TwoPcRecord r;
  r.participants = {0, 1};
  r.votes = {{0, Vote::Yes}, {1, Vote::Yes}};
  r.decision = Decision::Commit;
  CHECK(well_formed(r));
  r.decision = Decision::Abort;
  CHECK_FALSE(well_formed(r));
  r.votes[1] = Vote::No;
  CHECK(well_formed(r));
  r.votes[1] = Vote::Missing;
  r.decision = Decision::Blocked;
  CHECK(well_formed(r));
  r.bft_coordinator = true;
  CHECK_FALSE(well_formed(r));
}

TEST_CASE("sharded runs: all-Yes commits everywhere, atomically") {
  for (auto mode : {ShardingMode::Trusted2PC, ShardingMode::BftCoordinated2PC}) {
    auto r = run_sharded(sharded(mode), spec_of(1000), {});
    const auto& m = r.run.metrics;
    CHECK_FALSE(m.stalled);
    CHECK(m.accounting_holds());
    CHECK(m.committed_count > 950);
    CHECK(m.shards.shard_count == 4);
    CHECK(m.shards.cross_shard_ratio == doctest::Approx(0.75).epsilon(0.05));
    CHECK(m.shards.blocked_count == 0);
    auto at = check_atomicity(r);
    CHECK_MESSAGE(at.ok, at.detail);
    CHECK(at.checked == r.records.size());
    for (const auto& rec : r.records) CHECK(well_formed(rec));
    for (std::size_t s = 0; s < r.shard_digests.size(); ++s) {
      for (const auto& d : r.shard_digests[s]) CHECK(d == r.shard_digests[s].front());
    }
  }
}

TEST_CASE("sharded runs: a No vote aborts the transaction in every shard") {
  auto cfg = sharded(ShardingMode::Trusted2PC);
  auto spec = spec_of(50);
  spec.record_count = 100000;  // no lock conflicts
  auto map = ShardMap::make(cfg.sharding_mode, spec.record_count, 1);
  auto txns = cross_only(spec, map);
  REQUIRE(txns.size() > 5);
  ShardedRunOptions o;
  const auto victim = txns[3].id;
  o.vetoes.insert({victim, shards_of(txns[3], map).back()});
  auto r = run_sharded(cfg, spec, txns, o);
  for (const auto& rec : r.records) {
    CHECK(well_formed(rec));
    if (rec.txn_id == victim) {
      CHECK(rec.decision == Decision::Abort);
    } else {
      CHECK(rec.decision == Decision::Commit);
    }
  }
  for (const auto& t : r.run.txns) {
    CHECK(t.outcome == (t.id == victim ? Outcome::AbortedApplication : Outcome::Committed));
  }
  for (const auto& shard : r.applied) {
    for (const auto& ids : shard) CHECK_FALSE(ids.contains(victim));
  }
  CHECK(check_atomicity(r).ok);
}

TEST_CASE("trusted coordinator crash blocks; the BFT coordinator shard does not") {
  auto spec = spec_of(1000);
  ShardedRunOptions o;
  o.coordinator_faults = {{0, FaultKind::Crashed, 200'000}};
  auto trusted = run_sharded(sharded(ShardingMode::Trusted2PC), spec, o);
  CHECK(trusted.run.metrics.shards.blocked_count >= 1);
  CHECK(trusted.run.metrics.stalled);
  CHECK(trusted.run.metrics.accounting_holds());
  for (const auto& rec : trusted.records) {
    CHECK(well_formed(rec));
    if (rec.decision == Decision::Blocked) CHECK_FALSE(rec.stuck_shards.empty());
    if (rec.decision == Decision::Blocked) CHECK_FALSE(rec.votes.empty());
  }
  auto at = check_atomicity(trusted);
  CHECK_MESSAGE(at.ok, at.detail);

  auto bft = run_sharded(sharded(ShardingMode::BftCoordinated2PC), spec, o);
  CHECK(bft.run.metrics.shards.blocked_count == 0);
  CHECK_FALSE(bft.run.metrics.stalled);
  CHECK(bft.run.metrics.committed_count + bft.run.metrics.aborted() == 1000);
  for (const auto& rec : bft.records) CHECK(rec.decision.has_value());
  CHECK(check_atomicity(bft).ok);
}

TEST_CASE("BFT coordinator survives f replica crashes across seeds") {
  auto spec = spec_of(200);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ShardedRunOptions o;
    o.run.seed = seed;
    Rng rng(seed);
    o.coordinator_faults = {{static_cast<NodeId>(rng.below(4)), FaultKind::Crashed,
                             static_cast<VirtualTime>(rng.below(100'000))}};
    auto r = run_sharded(sharded(ShardingMode::BftCoordinated2PC, 2), spec, o);
    CHECK_MESSAGE(r.run.metrics.shards.blocked_count == 0, "seed " << seed);
    CHECK_MESSAGE(!r.run.metrics.stalled, "seed " << seed);
    CHECK(check_atomicity(r).ok);
  }
}

TEST_CASE("BFT coordination costs more messages per cross-shard commit") {
  auto spec = spec_of(400);
  auto cfg = sharded(ShardingMode::Trusted2PC);
  auto map = ShardMap::make(cfg.sharding_mode, spec.record_count, 1);
  auto txns = cross_only(spec, map);
  auto t = run_sharded(cfg, spec, txns, {});
  auto b = run_sharded(sharded(ShardingMode::BftCoordinated2PC), spec, txns, {});
  CHECK(b.messages_per_cross_shard_commit > t.messages_per_cross_shard_commit);
}

TEST_CASE("reconfiguration pauses cost throughput, more when more frequent") {
  auto spec = spec_of(4000);
  spec.arrival = Arrival{ArrivalMode::ClosedLoop, 0, 32};
  auto fixed = run_sharded(sharded(ShardingMode::Trusted2PC), spec, {});
  CHECK(fixed.run.metrics.shards.reconfigurations == 0);
  CHECK(fixed.map.epoch == 0);
  double prev = fixed.run.metrics.throughput;
  std::uint64_t prev_count = 0;
  for (VirtualTime interval : {100'000, 50'000, 25'000}) {
    auto cfg = sharded(ShardingMode::Trusted2PC);
    cfg.sharding_mode.reconfiguration_interval = interval;
    auto r = run_sharded(cfg, spec, {});
    CHECK(r.run.metrics.throughput < prev);
    CHECK(r.run.metrics.shards.reconfigurations > prev_count);
    CHECK(r.map.epoch == r.run.metrics.shards.reconfigurations);
    CHECK(check_atomicity(r).ok);
    prev = r.run.metrics.throughput;
    prev_count = r.run.metrics.shards.reconfigurations;
  }
}

TEST_CASE("sharded runs are deterministic and reject unsharded configs") {
  auto a = run_sharded(sharded(ShardingMode::Trusted2PC), spec_of(300), {});
  auto b = run_sharded(sharded(ShardingMode::Trusted2PC), spec_of(300), {});
  CHECK(a.run.txns == b.run.txns);
  CHECK(a.shard_digests == b.shard_digests);
  CHECK_THROWS_AS(run_sharded(DesignConfig{}, spec_of(10), {}), ConfigError);
  auto bad = sharded(ShardingMode::Trusted2PC);
  bad.failure_model = FailureModel::BFT;
  bad.node_count = 4;
  CHECK_THROWS_AS(run_sharded(bad, spec_of(10), {}), ConfigError);
  bad.sharding_mode.nodes_per_shard = 4;
  CHECK_NOTHROW(run_sharded(bad, spec_of(10), {}));
}

TEST_CASE("smallbank across shards keeps money and atomicity") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::Smallbank;
  spec.record_count = 200;
  spec.txn_count = 1000;
  spec.smallbank_mix = {0, 0, 0, 0, 1, 1};  // transfers only
  auto cfg = sharded(ShardingMode::Trusted2PC);
  cfg.replication_model = ReplicationModel::TransactionBased;
  cfg.concurrency_mode = ConcurrencyMode::OrderExecute;
  auto r = run_sharded(cfg, spec, {});
  CHECK(check_atomicity(r).ok);
  CHECK(r.run.metrics.committed_count > 0);
  CHECK(r.run.metrics.shards.cross_shard_txns > 0);
  CHECK(r.run.metrics.accounting_holds());
  std::int64_t total = 0;
  std::size_t accounts = 0;
  for (const auto& kv : r.shard_states) {
    for (const auto& [k, v] : kv.entries()) {
      const auto a = decode_account(v.value);
      total += a.checking + a.savings;
      ++accounts;
    }
  }
  CHECK(accounts == 200);
  CHECK(total == 2 * kInitialBalance * 200);
}
