// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/occ.hpp"

namespace bcdb {

Outcome occ_validate(std::span<const ReadEntry> reads, const std::function<std::uint64_t(const Key&)>& version_of) {
  for (const auto& r : reads) {
    if (version_of(r.key) != r.version) return Outcome::AbortedRW;
  }
  return Outcome::Committed;
}

Outcome occ_validate(const Transaction& txn, const VersionedKV& store) {
  return occ_validate(txn.read_set, [&](const Key& k) { return store.version(k); });
}

Outcome occ_check(std::uint64_t start_ts, std::span<const Key> reads, std::span<const Key> writes,
                  const std::function<std::uint64_t(const Key&)>& last_commit) {
  for (const auto& k : writes) {
    if (last_commit(k) > start_ts) return Outcome::AbortedWW;
  }
  for (const auto& k : reads) {
    if (last_commit(k) > start_ts) return Outcome::AbortedRW;
  }
  return Outcome::Committed;
}

Outcome OccValidator::commit(std::uint64_t start_ts, std::span<const Key> reads, std::span<const Key> writes) {
  auto verdict = occ_check(start_ts, reads, writes, [&](const Key& k) { return last_commit(k); });
  if (verdict != Outcome::Committed) return verdict;
  ++clock_;
  for (const auto& k : writes) last_commit_[k] = clock_;
  return verdict;
}

std::uint64_t OccValidator::last_commit(const Key& key) const {
  auto it = last_commit_.find(key);
  return it == last_commit_.end() ? 0 : it->second;
}

}  // namespace bcdb
