// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <span>

#include "bcdb/authstore/kv.hpp"
#include "bcdb/core/transaction.hpp"

namespace bcdb {

/// Version check used by execute-order-validate: Committed iff every read
/// version equals the current one, else AbortedRW.
Outcome occ_validate(std::span<const ReadEntry> reads, const std::function<std::uint64_t(const Key&)>& version_of);
Outcome occ_validate(const Transaction& txn, const VersionedKV& store);

/// First-committer-wins check for storage-based OCC. `last_commit` gives
/// the commit timestamp of the latest committed writer of a key (0 if
/// none). A write key committed after `start_ts` is a write-write
/// conflict; otherwise a read key committed after it is a read-write one.
Outcome occ_check(std::uint64_t start_ts, std::span<const Key> reads, std::span<const Key> writes,
                  const std::function<std::uint64_t(const Key&)>& last_commit);

/// Commit-timestamp bookkeeping around occ_check. Validation and commit
/// are one atomic step, as in a single trusted transaction manager.
class OccValidator {
 public:
  /// Snapshot timestamp for a starting transaction.
  std::uint64_t begin() const { return clock_; }

  /// Validates and, on success, stamps every write key with a new commit
  /// timestamp.
  Outcome commit(std::uint64_t start_ts, std::span<const Key> reads, std::span<const Key> writes);

  std::uint64_t last_commit(const Key& key) const;
  std::uint64_t clock() const { return clock_; }

 private:
  std::uint64_t clock_ = 0;
  std::map<Key, std::uint64_t> last_commit_;
};

}  // namespace bcdb
