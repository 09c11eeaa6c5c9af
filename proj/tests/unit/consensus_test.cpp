// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "bcdb/consensus/explore.hpp"
#include "bcdb/consensus/measure.hpp"
#include "bcdb/consensus/pbft.hpp"
#include "bcdb/consensus/primary_backup.hpp"
#include "bcdb/consensus/quorum.hpp"
#include "bcdb/consensus/raft.hpp"
#include "bcdb/consensus/schedule.hpp"
#include "bcdb/consensus/shared_log.hpp"
#include "bcdb/core/digest.hpp"
#include "doctest.h"

using namespace bcdb;

namespace {

Proposal proposal(std::uint64_t tag) { return Proposal{tag, digest("p" + std::to_string(tag))}; }

struct Cluster {
  Simulator sim;
  std::vector<NodeId> ids;
  std::unique_ptr<Replicator> group;
  std::map<NodeId, std::vector<std::uint64_t>> applied;

  Cluster(std::uint32_t n, ReplicationApproach approach, FailureModel model, std::uint64_t seed = 1,
          bool byzantine = false)
      : sim(seed, [&] {
          Simulator::Options o;
          o.allow_byzantine = byzantine;
          return o;
        }()) {
    const auto first = sim.add_nodes(n);
    for (std::uint32_t i = 0; i < n; ++i) ids.push_back(first + i);
    const auto service = sim.add_nodes(1);
    ReplicatorOptions options;
    options.approach = approach;
    options.failure_model = model;
    group = make_replicator(sim, ids, service, options);
    group->set_commit_handler(
        [this](NodeId node, std::uint64_t, const Proposal& p) { applied[node].push_back(p.tag); });
    group->start();
  }

  void settle() {
    sim.run(sim.now() + 200'000, [&] { return group->leader().has_value(); });
  }

  bool all_committed(std::size_t k, std::size_t skip_first = 0) const {
    for (std::size_t i = skip_first; i < ids.size(); ++i) {
      if (committed_at(ids[i]) < k) return false;
    }
    return true;
  }

  std::size_t committed_at(NodeId node) const {
    auto it = applied.find(node);
    return it == applied.end() ? 0 : it->second.size();
  }
};

}  // namespace

TEST_CASE("quorum_size examples") {
  CHECK(quorum_size(5, FailureModel::CFT) == 3);
  CHECK(quorum_size(4, FailureModel::BFT) == 3);
  CHECK(quorum_size(1, FailureModel::CFT) == 1);
  CHECK(quorum_size(7, FailureModel::BFT) == 5);
  CHECK_THROWS_AS(quorum_size(5, FailureModel::BFT), std::invalid_argument);
  CHECK_THROWS_AS(quorum_size(0, FailureModel::CFT), std::invalid_argument);
  auto q = make_quorum_spec(10, FailureModel::BFT);
  CHECK(q.f == 3);
  CHECK(q.quorum_size == 7);
}

TEST_CASE("quorum arithmetic for all N up to 31") {
  for (std::uint32_t n = 1; n <= 31; ++n) {
    const auto qc = quorum_size(n, FailureModel::CFT);
    CHECK(qc == n / 2 + 1);
    CHECK(min_quorum_intersection(n, qc) >= 1);
    const auto f = max_tolerated_failures(n, FailureModel::BFT);
    const auto qp = protocol_quorum(n, FailureModel::BFT);
    CHECK(min_quorum_intersection(n, qp) >= f + 1);
    CHECK(qp + f <= n);  // liveness: f silent nodes cannot block a quorum
    if ((n - 1) % 3 == 0) {
      CHECK(quorum_size(n, FailureModel::BFT) == 2 * f + 1);
      CHECK(qp == 2 * f + 1);
    }
  }
}

TEST_CASE("quorum intersection by subset enumeration") {
  for (std::uint32_t n = 1; n <= 10; ++n) {
    for (auto model : {FailureModel::CFT, FailureModel::BFT}) {
      const auto q = protocol_quorum(n, model);
      const auto need = model == FailureModel::CFT ? 1u : max_tolerated_failures(n, model) + 1;
      std::uint32_t worst = n;
      for (std::uint32_t a = 0; a < (1u << n); ++a) {
        if (static_cast<std::uint32_t>(__builtin_popcount(a)) != q) continue;
        for (std::uint32_t b = 0; b < (1u << n); ++b) {
          if (static_cast<std::uint32_t>(__builtin_popcount(b)) != q) continue;
          worst = std::min<std::uint32_t>(worst, static_cast<std::uint32_t>(__builtin_popcount(a & b)));
        }
      }
      CHECK(worst >= need);
      CHECK(worst == min_quorum_intersection(n, q));
    }
  }
}

TEST_CASE("raft N=3 commits after one round trip") {
  Cluster c(3, ReplicationApproach::Consensus, FailureModel::CFT);
  c.settle();
  REQUIRE(c.group->leader());
  const auto start = c.sim.now();
  const auto leader = *c.group->leader();
  c.group->propose(proposal(1));
  c.sim.run(start + 100'000, [&] { return c.committed_at(leader) == 1; });
  CHECK(c.committed_at(leader) == 1);
  // Client hop plus Append and AppendReply: at most three one-way latencies.
  CHECK(c.sim.now() - start <= 3 * c.sim.options().latency.max());
}

TEST_CASE("raft tolerates two crashes of five but not three") {
  for (std::uint32_t crashes : {2u, 3u}) {
    Cluster c(5, ReplicationApproach::Consensus, FailureModel::CFT, 4);
    c.settle();
    const auto leader = *c.group->leader();
    std::uint32_t done = 0;
    for (auto id : c.ids) {
      if (done < crashes && id != leader) {
        c.sim.inject_fault(id, FaultKind::Crashed, c.sim.now());
        ++done;
      }
    }
    for (std::uint64_t t = 1; t <= 5; ++t) c.group->propose(proposal(t));
    c.sim.run(c.sim.now() + 500'000);
    if (crashes == 2) {
      CHECK(c.committed_at(leader) == 5);
    } else {
      for (auto id : c.ids) CHECK(c.committed_at(id) == 0);
      CHECK(c.group->outstanding() == 5);
    }
  }
}

TEST_CASE("raft leader crash elects a new leader and keeps the committed prefix") {
  Cluster c(5, ReplicationApproach::Consensus, FailureModel::CFT, 8);
  c.settle();
  const auto old_leader = *c.group->leader();
  for (std::uint64_t t = 1; t <= 10; ++t) c.group->propose(proposal(t));
  c.sim.run(c.sim.now() + 50'000, [&] { return c.group->outstanding() == 0; });
  REQUIRE(c.group->outstanding() == 0);
  const auto before = c.group->state(old_leader);
  c.sim.inject_fault(old_leader, FaultKind::Crashed, c.sim.now());
  for (std::uint64_t t = 11; t <= 15; ++t) c.group->propose(proposal(t));
  c.sim.run(c.sim.now() + 500'000, [&] { return c.group->outstanding() == 0; });
  auto now_leader = c.group->leader();
  REQUIRE(now_leader);
  CHECK(*now_leader != old_leader);
  CHECK(c.group->view_changes() >= 1);
  const auto after = c.group->state(*now_leader);
  REQUIRE(after.commit_index >= before.commit_index);
  for (std::uint64_t i = 0; i < before.commit_index; ++i) CHECK(after.log[i] == before.log[i]);
  CHECK(c.committed_at(*now_leader) == 15);
  CHECK_FALSE(find_divergence(*c.group, {}).has_value());
}

TEST_CASE("raft term stays put without faults") {
  Cluster c(5, ReplicationApproach::Consensus, FailureModel::CFT, 3);
  c.settle();
  const auto leader = *c.group->leader();
  auto* raft = dynamic_cast<RaftGroup*>(c.group.get());
  REQUIRE(raft);
  const auto term = raft->term_of(leader);
  for (std::uint64_t t = 1; t <= 50; ++t) {
    c.group->propose(proposal(t));
    c.sim.run(c.sim.now() + 3'000);
  }
  c.sim.run(c.sim.now() + 200'000);
  for (auto id : c.ids) CHECK(raft->term_of(id) == term);
  CHECK(c.group->leader() == leader);
  for (auto id : c.ids) CHECK(c.committed_at(id) == 50);
}

TEST_CASE("raft repeated leader crashes stall then resume") {
  Cluster c(5, ReplicationApproach::Consensus, FailureModel::CFT, 12);
  c.settle();
  std::uint64_t tag = 0;
  for (int round = 0; round < 2; ++round) {
    const auto leader = *c.group->leader();
    c.sim.inject_fault(leader, FaultKind::Crashed, c.sim.now());
    const auto crash_at = c.sim.now();
    c.group->propose(proposal(++tag));
    c.sim.run(c.sim.now() + 500'000, [&] { return c.group->outstanding() == 0; });
    CHECK(c.group->outstanding() == 0);
    // Nothing commits before a follower's election timer can fire.
    const auto opts = RaftOptions::for_latency(c.sim.options().latency);
    CHECK(c.sim.now() - crash_at >= opts.election_min);
  }
  CHECK_FALSE(find_divergence(*c.group, {}).has_value());
}

TEST_CASE("raft committed index never shrinks and stays within the log") {
  Cluster c(5, ReplicationApproach::Consensus, FailureModel::CFT, 21);
  std::map<NodeId, std::uint64_t> last;
  for (std::uint64_t t = 1; t <= 40; ++t) c.group->propose(proposal(t));
  c.sim.inject_fault(c.ids[0], FaultKind::Crashed, 20'000);
  c.sim.heal(c.ids[0], 60'000);
  c.sim.inject_fault(c.ids[1], FaultKind::Crashed, 70'000);
  while (c.sim.now() < 400'000 && c.sim.step()) {
    for (auto id : c.ids) {
      auto s = c.group->state(id);
      CHECK(s.commit_index <= s.log.size());
      CHECK(s.commit_index >= last[id]);
      last[id] = s.commit_index;
    }
  }
  // At most one leader per term.
  std::map<std::uint64_t, int> leaders;
  for (auto id : c.ids) {
    auto s = c.group->state(id);
    if (s.role == Role::Leader && !c.sim.crashed(id)) CHECK(++leaders[s.term] == 1);
  }
}

TEST_CASE("pbft N=4 commits with one silent node") {
  Cluster c(4, ReplicationApproach::Consensus, FailureModel::BFT, 2, true);
  c.sim.inject_fault(c.ids[3], FaultKind::ByzantineSilent, 0);
  for (std::uint64_t t = 1; t <= 10; ++t) c.group->propose(proposal(t));
  c.sim.run(200'000, [&] {
    return c.committed_at(c.ids[0]) == 10 && c.committed_at(c.ids[1]) == 10 && c.committed_at(c.ids[2]) == 10;
  });
  CHECK(c.group->outstanding() == 0);
  for (int i = 0; i < 3; ++i) CHECK(c.committed_at(c.ids[i]) == 10);
  CHECK(c.group->view_changes() == 0);
}

TEST_CASE("pbft silent primary triggers a view change") {
  Cluster c(4, ReplicationApproach::Consensus, FailureModel::BFT, 5, true);
  c.sim.inject_fault(c.ids[0], FaultKind::ByzantineSilent, 0);
  for (std::uint64_t t = 1; t <= 5; ++t) c.group->propose(proposal(t));
  c.sim.run(2'000'000, [&] { return c.all_committed(5, 1); });
  CHECK(c.group->outstanding() == 0);
  CHECK(c.group->view_changes() >= 1);
  CHECK(c.group->leader() != c.ids[0]);
  for (int i = 1; i < 4; ++i) CHECK(c.committed_at(c.ids[i]) == 5);
  CHECK_FALSE(find_divergence(*c.group, {c.ids[0]}).has_value());
}

TEST_CASE("pbft crashed primary mid-stream keeps committed entries") {
  Cluster c(4, ReplicationApproach::Consensus, FailureModel::BFT, 6, true);
  for (std::uint64_t t = 1; t <= 20; ++t) c.group->propose(proposal(t));
  c.sim.inject_fault(c.ids[0], FaultKind::Crashed, 1'500);
  for (std::uint64_t t = 21; t <= 25; ++t) c.group->propose(proposal(t));
  c.sim.run(5'000'000, [&] { return c.all_committed(25, 1); });
  CHECK(c.group->outstanding() == 0);
  for (int i = 1; i < 4; ++i) CHECK(c.committed_at(c.ids[i]) == 25);
  CHECK_FALSE(find_divergence(*c.group, {}).has_value());
}

TEST_CASE("pbft works for N not of the form 3f+1") {
  for (std::uint32_t n : {5u, 10u}) {
    Cluster c(n, ReplicationApproach::Consensus, FailureModel::BFT, n);
    for (std::uint64_t t = 1; t <= 5; ++t) c.group->propose(proposal(t));
    c.sim.run(1'000'000, [&] { return c.all_committed(5); });
    for (auto id : c.ids) CHECK(c.committed_at(id) == 5);
  }
}

TEST_CASE("pbft replica core drives a full round without a network") {
  std::vector<NodeId> members{0, 1, 2, 3};
  std::vector<PbftReplica> reps;
  for (auto id : members) reps.emplace_back(id, members, 3);
  std::vector<PbftOutgoing> inbox;
  for (auto& r : reps) {
    auto out = r.on_request(proposal(7));
    inbox.insert(inbox.end(), out.begin(), out.end());
  }
  std::size_t delivered = 0;
  while (!inbox.empty()) {
    auto o = inbox.front();
    inbox.erase(inbox.begin());
    ++delivered;
    auto out = reps[o.to].on_message(o.msg);
    inbox.insert(inbox.end(), out.begin(), out.end());
  }
  // 3 pre-prepares, 3x3 prepares, 4x3 commits.
  CHECK(delivered == 3 + 9 + 12);
  for (auto& r : reps) {
    auto done = r.take_executed();
    REQUIRE(done.size() == 1);
    CHECK(done[0].proposal == proposal(7));
    CHECK(r.last_executed() == 1);
  }
}

TEST_CASE("pbft equivocating primary explored exhaustively to a bounded depth") {
  ExploreOptions o;
  o.max_depth = 9;
  auto r = explore_pbft(o);
  CHECK_FALSE(r.violation);
  CHECK_FALSE(r.truncated);
  CHECK(r.states > 1000);
  INFO(r.detail);
}

TEST_CASE("pbft equivocating backup explored exhaustively to a bounded depth") {
  ExploreOptions o;
  o.equivocator = 2;
  o.max_depth = 9;
  auto r = explore_pbft(o);
  CHECK_FALSE(r.violation);
  CHECK_FALSE(r.truncated);
  CHECK(r.max_committed >= 1);  // the bound is deep enough to reach commits
}

TEST_CASE("seeded safety schedules") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    SafetySchedule cft;
    cft.max_crashes = 2;
    cft.partition = seed % 2 == 0;
    auto a = run_safety_schedule(cft, seed);
    CHECK_MESSAGE(!a.divergent, a.detail);

    SafetySchedule eq;
    eq.model = FailureModel::BFT;
    eq.n = 4;
    eq.equivocators = 1;
    auto b = run_safety_schedule(eq, seed);
    CHECK_MESSAGE(!b.divergent, b.detail);

    SafetySchedule silent = eq;
    silent.equivocators = 0;
    silent.silent = 1;
    auto s = run_safety_schedule(silent, seed);
    CHECK_MESSAGE(!s.divergent, s.detail);
    CHECK(s.committed == silent.proposals);
  }
}

TEST_CASE("shared log assigns dense positions") {
  SharedLog log;
  CHECK(log.append(proposal(1)) == 1);
  CHECK(log.append(proposal(2)) == 2);
  CHECK(log.read(1) == std::vector<Proposal>{proposal(1), proposal(2)});
  CHECK(log.read(2) == std::vector<Proposal>{proposal(2)});
  CHECK(log.read(3).empty());
}

TEST_CASE("shared log consumers see one order") {
  Cluster c(3, ReplicationApproach::SharedLog, FailureModel::CFT, 9);
  for (std::uint64_t t = 1; t <= 30; ++t) c.group->propose(proposal(t));
  c.sim.run(1'000'000);
  REQUIRE(c.applied[c.ids[0]].size() == 30);
  CHECK(c.applied[c.ids[1]] == c.applied[c.ids[0]]);
  CHECK(c.applied[c.ids[2]] == c.applied[c.ids[0]]);
  auto* svc = dynamic_cast<SharedLogService*>(c.group.get());
  REQUIRE(svc);
  CHECK(svc->log().read(1).size() == 30);
}

TEST_CASE("shared log throughput is flat in consumer count") {
  auto finish_time = [](std::uint32_t consumers) {
    Cluster c(consumers, ReplicationApproach::SharedLog, FailureModel::CFT, 10);
    for (std::uint64_t t = 1; t <= 500; ++t) c.group->propose(proposal(t));
    c.sim.run(100'000'000, [&] { return c.group->outstanding() == 0; });
    return c.sim.now();
  };
  const auto base = finish_time(1);
  for (std::uint32_t k : {4u, 10u, 19u}) {
    CHECK(static_cast<double>(finish_time(k)) <= 1.05 * static_cast<double>(base));
  }
}

TEST_CASE("primary-backup forwards along the chain") {
  Cluster c(3, ReplicationApproach::PrimaryBackup, FailureModel::CFT, 2);
  c.group->propose(proposal(1));
  c.sim.run(1'000'000);
  auto* chain = dynamic_cast<PrimaryBackupChain*>(c.group.get());
  REQUIRE(chain);
  CHECK(chain->acknowledged() == 1);
  CHECK(c.group->messages_sent() == 2);
  for (auto id : c.ids) CHECK(c.committed_at(id) == 1);
}

TEST_CASE("primary-backup has no failover") {
  Cluster c(3, ReplicationApproach::PrimaryBackup, FailureModel::CFT, 2);
  c.sim.inject_fault(c.ids[0], FaultKind::Crashed, 0);
  for (std::uint64_t t = 1; t <= 3; ++t) c.group->propose(proposal(t));
  c.sim.run(10'000'000);
  auto* chain = dynamic_cast<PrimaryBackupChain*>(c.group.get());
  CHECK(chain->acknowledged() == 0);
  CHECK_FALSE(c.group->leader().has_value());
}

TEST_CASE("messages per commit") {
  for (std::uint32_t n : {3u, 5u, 7u}) {
    auto chain = messages_per_commit(ReplicationApproach::PrimaryBackup, FailureModel::CFT, n, 20);
    auto raft = messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, n, 20);
    CHECK(chain.commits == 20);
    CHECK(chain.per_commit() == doctest::Approx(n - 1));
    CHECK(raft.per_commit() >= 2.0 * (n - 1));
  }
  CHECK(messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, 1, 10).messages == 0);
  CHECK(messages_per_commit(ReplicationApproach::Consensus, FailureModel::BFT, 1, 10).messages == 0);

  const auto raft5 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, 5).per_commit();
  const auto raft10 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::CFT, 10).per_commit();
  const auto bft5 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::BFT, 5).per_commit();
  const auto bft10 = messages_per_commit(ReplicationApproach::Consensus, FailureModel::BFT, 10).per_commit();
  CHECK(raft10 / raft5 <= 2.5);
  CHECK(bft10 / bft5 >= 3.0);
}
