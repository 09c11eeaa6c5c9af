// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/oracle.hpp"

#include "bcdb/pipeline/occ.hpp"

namespace bcdb {

namespace {

bool reads_current(const VersionedKV& kv, const Execution& ex) {
  for (const auto& r : ex.reads) {
    if (kv.version(r.key) != r.version) return false;
  }
  return true;
}

struct Search {
  const std::vector<std::pair<std::uint64_t, const Execution*>>& txns;
  const Digest& target;
  std::vector<bool> used;
  std::vector<std::uint64_t> order;

  bool dfs(const VersionedKV& kv) {
    if (order.size() == txns.size()) return state_digest(kv) == target;
    for (std::size_t k = 0; k < txns.size(); ++k) {
      if (used[k] || !reads_current(kv, *txns[k].second)) continue;
      VersionedKV next = kv;
      next.put_batch(txns[k].second->writes);
      used[k] = true;
      order.push_back(txns[k].first);
      if (dfs(next)) return true;
      order.pop_back();
      used[k] = false;
    }
    return false;
  }
};

}  // namespace

VersionedKV initial_state(const WorkloadSpec& spec) {
  VersionedKV kv;
  const auto records = initial_records(spec);
  kv.put_batch(records);
  return kv;
}

std::optional<std::vector<std::uint64_t>> find_serial_order(const VersionedKV& initial,
                                                            const std::map<std::uint64_t, Execution>& committed,
                                                            const Digest& final_state) {
  std::vector<std::pair<std::uint64_t, const Execution*>> txns;
  for (const auto& [id, ex] : committed) txns.emplace_back(id, &ex);
  Search s{txns, final_state, std::vector<bool>(txns.size()), {}};
  if (!s.dfs(initial)) return std::nullopt;
  return s.order;
}

bool committed_schedule_serializable(const WorkloadSpec& spec, const RunResult& r) {
  if (r.state_digests.empty()) return false;
  return find_serial_order(initial_state(spec), r.executions, r.state_digests.front()).has_value();
}

ReplayReport replay_blocks(const WorkloadSpec& spec, const RunResult& r) {
  std::map<std::uint64_t, Outcome> outcome;
  for (const auto& t : r.txns) outcome[t.id] = t.outcome;
  auto kv = initial_state(spec);
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    for (auto id : r.blocks[b]) {
      auto it = r.executions.find(id);
      if (it == r.executions.end()) return {false, "txn " + std::to_string(id) + " has no recorded execution"};
      const auto& ex = it->second;
      const auto verdict = occ_validate(ex.reads, [&](const Key& k) { return kv.version(k); });
      if (verdict != outcome[id]) {
        return {false, "block " + std::to_string(b) + " txn " + std::to_string(id) + ": replay says " +
                           std::string(to_string(verdict)) + ", run says " + std::string(to_string(outcome[id]))};
      }
      if (verdict == Outcome::Committed) kv.put_batch(ex.writes);
    }
  }
  const auto want = state_digest(kv);
  for (std::size_t i = 0; i < r.state_digests.size(); ++i) {
    if (r.healthy[i] && r.state_digests[i] != want) {
      return {false, "replica " + std::to_string(i) + " state differs from the replay"};
    }
  }
  return {};
}

}  // namespace bcdb
