// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/sharding/sharding.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bcdb/core/digest.hpp"

namespace bcdb {

namespace {

std::vector<std::vector<std::uint32_t>> permute_members(std::uint32_t shards, std::uint32_t per_shard,
                                                        std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::uint32_t> pool(static_cast<std::size_t>(shards) * per_shard);
  std::iota(pool.begin(), pool.end(), 0u);
  auto rng = Rng::derive(seed, "shard-formation-" + std::to_string(epoch));
  rng.shuffle(std::span<std::uint32_t>(pool));
  std::vector<std::vector<std::uint32_t>> out(shards);
  for (std::uint32_t s = 0; s < shards; ++s) {
    out[s].assign(pool.begin() + s * per_shard, pool.begin() + (s + 1) * per_shard);
    std::sort(out[s].begin(), out[s].end());
  }
  return out;
}

}  // namespace

ShardMap ShardMap::make(const ShardingConfig& cfg, std::uint64_t record_count, std::uint64_t seed) {
  if (cfg.shard_count < 1 || cfg.nodes_per_shard < 1) throw std::invalid_argument("empty shard layout");
  ShardMap m;
  m.shard_count = cfg.shard_count;
  m.scheme = cfg.scheme;
  m.seed = seed;
  if (m.scheme == ShardScheme::Range) {
    for (std::uint32_t s = 1; s < m.shard_count; ++s) {
      m.range_bounds.push_back(record_key(record_count * s / m.shard_count));
    }
  }
  m.members = permute_members(cfg.shard_count, cfg.nodes_per_shard, seed, 0);
  return m;
}

std::uint32_t assign_shard(const Key& key, const ShardMap& map) {
  if (map.shard_count <= 1) return 0;
  if (map.scheme == ShardScheme::Hash) {
    return static_cast<std::uint32_t>(digest_prefix_u64(digest(key)) % map.shard_count);
  }
  const auto it = std::upper_bound(map.range_bounds.begin(), map.range_bounds.end(), key);
  return static_cast<std::uint32_t>(it - map.range_bounds.begin());
}

ShardMap reconfigure(const ShardMap& map, std::uint64_t next_epoch) {
  if (next_epoch != map.epoch + 1) throw std::invalid_argument("reconfigure: epoch must advance by one");
  ShardMap next = map;
  next.epoch = next_epoch;
  const auto per_shard = map.members.empty() ? 1u : static_cast<std::uint32_t>(map.members.front().size());
  next.members = permute_members(map.shard_count, per_shard, map.seed, next_epoch);
  return next;
}

std::vector<std::uint32_t> shards_of(const Transaction& txn, const ShardMap& map) {
  std::vector<std::uint32_t> out;
  for (const auto& k : txn.touched_keys()) out.push_back(assign_shard(k, map));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double cross_shard_ratio(const std::vector<Transaction>& txns, const ShardMap& map) {
  if (txns.empty()) return 0;
  std::size_t cross = 0;
  for (const auto& t : txns) cross += shards_of(t, map).size() >= 2;
  return static_cast<double>(cross) / static_cast<double>(txns.size());
}

double cross_shard_ratio(const Metrics& m) { return m.shards.cross_shard_ratio; }

std::string_view to_string(Vote v) {
  switch (v) {
    case Vote::Yes: return "yes";
    case Vote::No: return "no";
    case Vote::Missing: return "missing";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Commit: return "commit";
    case Decision::Abort: return "abort";
    case Decision::Blocked: return "blocked";
  }
  return "?";
}

std::optional<Decision> decide(const std::map<std::uint32_t, Vote>& votes) {
  bool all_yes = !votes.empty();
  for (const auto& [s, v] : votes) {
    if (v == Vote::No) return Decision::Abort;
    if (v != Vote::Yes) all_yes = false;
  }
  if (all_yes) return Decision::Commit;
  return std::nullopt;
}

bool well_formed(const TwoPcRecord& rec) {
  if (!rec.decision) return true;
  for (auto s : rec.participants) {
    if (!rec.votes.contains(s)) return false;
  }
  bool any_no = false, all_yes = true;
  for (const auto& [s, v] : rec.votes) {
    any_no = any_no || v == Vote::No;
    all_yes = all_yes && v == Vote::Yes;
  }
  switch (*rec.decision) {
    case Decision::Commit: return all_yes;
    case Decision::Abort: return any_no;
    case Decision::Blocked: return !rec.bft_coordinator && !any_no;
  }
  return false;
}

AtomicityReport check_atomicity(const ShardedRunResult& r) {
  AtomicityReport rep;
  for (const auto& rec : r.records) {
    if (!rec.decision || *rec.decision == Decision::Blocked) continue;
    ++rep.checked;
    const bool want = *rec.decision == Decision::Commit;
    for (auto s : rec.participants) {
      for (std::size_t k = 0; k < r.applied[s].size(); ++k) {
        if (!r.shard_healthy[s][k]) continue;
        if (r.applied[s][k].contains(rec.txn_id) != want) {
          rep.ok = false;
          rep.detail = "txn " + std::to_string(rec.txn_id) + " decided " + std::string(to_string(*rec.decision)) +
                       " but shard " + std::to_string(s) + " replica " + std::to_string(k) +
                       (want ? " lacks it" : " applied it");
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace bcdb
