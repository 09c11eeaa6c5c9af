// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/measure.hpp"

#include <map>
#include <stdexcept>

#include "bcdb/core/digest.hpp"

namespace bcdb {

MessageCount messages_per_commit(ReplicationApproach approach, FailureModel model, std::uint32_t n,
                                 std::uint32_t entries, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("messages_per_commit needs at least one replica");
  Simulator::Options sim_options;
  sim_options.record_trace = true;
  Simulator sim(seed, sim_options);
  const auto first = sim.add_nodes(n);
  const auto service = sim.add_nodes(1);
  std::vector<NodeId> ids;
  for (std::uint32_t i = 0; i < n; ++i) ids.push_back(first + i);

  ReplicatorOptions options;
  options.approach = approach;
  options.failure_model = model;
  options.window = 1;
  options.max_batch = 1;
  auto group = make_replicator(sim, ids, service, options);

  std::map<std::uint64_t, std::uint32_t> applied;
  group->set_commit_handler([&](NodeId, std::uint64_t, const Proposal& p) { ++applied[p.tag]; });
  group->start();
  const VirtualTime horizon = 1'000'000'000;
  sim.run(horizon, [&] { return group->leader().has_value(); });
  // Let the election's stragglers land before taking the baseline.
  sim.run(sim.now() + 4 * sim.options().latency.max());

  MessageCount out;
  const auto baseline = group->messages_sent();
  const auto mark = sim.trace().size();
  for (std::uint32_t i = 1; i <= entries; ++i) {
    group->propose(Proposal{i, digest("entry-" + std::to_string(i))});
    sim.run(horizon, [&] {
      auto it = applied.find(i);
      return it != applied.end() && it->second == n;
    });
  }
  out.commits = applied.size();
  out.sent = group->messages_sent() - baseline;
  for (auto i = mark; i < sim.trace().size(); ++i) out.messages += sim.trace()[i].network;
  return out;
}

}  // namespace bcdb
