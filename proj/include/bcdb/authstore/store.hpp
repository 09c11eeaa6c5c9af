// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "bcdb/authstore/index.hpp"
#include "bcdb/authstore/kv.hpp"
#include "bcdb/authstore/ledger.hpp"

namespace bcdb {

struct StorageBreakdown {
  std::uint64_t records = 0;
  std::uint64_t state_bytes = 0;
  std::uint64_t block_bytes = 0;
  std::uint64_t index_bytes = 0;
  double index_overhead_per_record = 0.0;
};

/// One node's storage: versioned state, an optional authenticated index
/// kept in step with it, and an optional ledger.
class StateStore {
 public:
  explicit StateStore(StorageMode mode);
  StateStore(const StateStore& other);
  StateStore& operator=(const StateStore&) = delete;
  StateStore(StateStore&&) noexcept = default;

  const StorageMode& mode() const { return mode_; }
  const VersionedKV& kv() const { return kv_; }
  AuthIndex* index() { return index_.get(); }
  LedgerStore* ledger() { return ledger_ ? ledger_.get() : nullptr; }
  const LedgerStore* ledger() const { return ledger_ ? ledger_.get() : nullptr; }

  std::optional<VersionedValue> get(const Key& key) const { return kv_.get(key); }
  std::uint64_t version(const Key& key) const { return kv_.version(key); }

  /// Commits a write batch and brings the index root up to date. Returns
  /// the index hashing performed.
  HashWork apply(std::span<const WriteEntry> writes);

  /// Root of the authenticated index. Throws std::logic_error for a plain index.
  Digest index_root();

  /// Appends a block linked to the current tip (height and parent digest
  /// are filled in). Returns the bytes hashed to link it; a no-op when the
  /// ledger is disabled.
  HashWork append_block(Block block);

  StorageBreakdown storage_breakdown();

 private:
  StorageMode mode_;
  VersionedKV kv_;
  std::unique_ptr<AuthIndex> index_;
  std::unique_ptr<LedgerStore> ledger_;
};

}  // namespace bcdb
