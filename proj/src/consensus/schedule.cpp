// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/schedule.hpp"

#include <algorithm>
#include <map>

#include "bcdb/consensus/pbft.hpp"
#include "bcdb/core/digest.hpp"

namespace bcdb {

std::optional<std::string> find_divergence(const Replicator& group, const std::set<NodeId>& exclude) {
  std::map<std::uint64_t, std::pair<NodeId, Digest>> seen;
  for (auto node : group.nodes()) {
    if (exclude.contains(node)) continue;
    const auto s = group.state(node);
    for (const auto& e : s.log) {
      if (e.index > s.commit_index) continue;
      auto [it, inserted] = seen.emplace(e.index, std::make_pair(node, e.digest));
      if (!inserted && it->second.second != e.digest) {
        return "index " + std::to_string(e.index) + ": node " + std::to_string(it->second.first) + " and node " +
               std::to_string(node) + " committed different entries";
      }
    }
  }
  return std::nullopt;
}

SafetyResult run_safety_schedule(const SafetySchedule& schedule, std::uint64_t seed) {
  Simulator::Options sim_options;
  sim_options.allow_byzantine = schedule.model == FailureModel::BFT;
  Simulator sim(seed, sim_options);
  auto rng = Rng::derive(seed, "schedule");
  const auto first = sim.add_nodes(schedule.n);
  std::vector<NodeId> ids;
  for (std::uint32_t i = 0; i < schedule.n; ++i) ids.push_back(first + i);
  // Clients and fault scripts run on a node that never fails.
  const auto client = sim.add_nodes(1);

  ReplicatorOptions options;
  options.failure_model = schedule.model;
  options.window = 2;
  options.max_batch = 4;
  auto group = make_replicator(sim, ids, first, options);

  std::map<NodeId, std::vector<std::uint64_t>> applied;
  std::set<std::uint64_t> committed;
  group->set_commit_handler([&](NodeId node, std::uint64_t, const Proposal& p) {
    applied[node].push_back(p.tag);
    committed.insert(p.tag);
  });

  SafetyResult result;
  std::vector<NodeId> order = ids;
  rng.shuffle(std::span<NodeId>(order));
  const auto window = schedule.horizon / 2;
  std::size_t next = 0;
  for (std::uint32_t i = 0; i < schedule.equivocators && next < order.size(); ++i, ++next) {
    const auto at = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window) / 4 + 1));
    sim.inject_fault(order[next], FaultKind::ByzantineEquivocate, at);
    result.byzantine.insert(order[next]);
  }
  for (std::uint32_t i = 0; i < schedule.silent && next < order.size(); ++i, ++next) {
    const auto at = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window) / 4 + 1));
    sim.inject_fault(order[next], FaultKind::ByzantineSilent, at);
    result.byzantine.insert(order[next]);
  }
  const auto crashes = schedule.max_crashes == 0 ? 0 : rng.below(schedule.max_crashes + 1);
  for (std::uint64_t i = 0; i < crashes && next < order.size(); ++i, ++next) {
    const auto at = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window)));
    sim.inject_fault(order[next], FaultKind::Crashed, at);
    if (rng.bernoulli(0.5)) sim.heal(order[next], at + 1 + static_cast<VirtualTime>(rng.below(window)));
  }
  if (schedule.partition) {
    // Applied and lifted by timers on a dedicated channel.
    std::vector<NodeId> minority(order.begin(), order.begin() + (schedule.n - 1) / 2);
    std::vector<NodeId> majority(order.begin() + (schedule.n - 1) / 2, order.end());
    const auto start = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window)));
    const auto length = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window)));
    auto ch = sim.add_channel([&sim, minority, majority](const Event& ev) {
      if (ev.kind == "partition") sim.set_partition({minority, majority});
      if (ev.kind == "unpartition") sim.clear_partition();
    });
    sim.schedule(client, ch, "partition", {}, start);
    sim.schedule(client, ch, "unpartition", {}, start + length);
  }

  group->start();
  const auto submit = sim.add_channel([&group](const Event& ev) { group->propose(std::any_cast<Proposal>(ev.payload)); });
  for (std::uint32_t i = 1; i <= schedule.proposals; ++i) {
    const auto at = static_cast<VirtualTime>(rng.below(static_cast<std::uint64_t>(window)));
    sim.schedule(client, submit, "submit", Proposal{i, digest("proposal-" + std::to_string(i))}, at);
  }
  sim.run(schedule.horizon);

  if (auto d = find_divergence(*group, result.byzantine)) {
    result.divergent = true;
    result.detail = *d;
  }
  // Apply order must also agree: every honest sequence is a prefix of the longest.
  const std::vector<std::uint64_t>* longest = nullptr;
  for (const auto& [node, seq] : applied) {
    if (result.byzantine.contains(node)) continue;
    if (longest == nullptr || seq.size() > longest->size()) longest = &seq;
  }
  for (const auto& [node, seq] : applied) {
    if (result.byzantine.contains(node) || longest == nullptr || result.divergent) continue;
    if (!std::equal(seq.begin(), seq.end(), longest->begin())) {
      result.divergent = true;
      result.detail = "node " + std::to_string(node) + " applied proposals in a different order";
    }
  }
  if (auto* pbft = dynamic_cast<PbftGroup*>(group.get())) {
    for (auto id : ids) {
      if (!result.byzantine.contains(id) && pbft->replica(id).conflicting_commit()) {
        result.divergent = true;
        result.detail = "node " + std::to_string(id) + " saw two commit certificates for one slot";
      }
    }
  }
  result.committed = committed.size();
  result.view_changes = group->view_changes();
  return result;
}

}  // namespace bcdb
