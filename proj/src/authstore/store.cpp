// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/store.hpp"

#include <stdexcept>

namespace bcdb {

StateStore::StateStore(StorageMode mode) : mode_(mode), index_(make_index(mode.index)) {
  if (mode_.ledger_enabled) ledger_ = std::make_unique<LedgerStore>();
}

StateStore::StateStore(const StateStore& other)
    : mode_(other.mode_),
      kv_(other.kv_),
      index_(other.index_ ? other.index_->clone() : nullptr),
      ledger_(other.ledger_ ? std::make_unique<LedgerStore>(*other.ledger_) : nullptr) {}

HashWork StateStore::apply(std::span<const WriteEntry> writes) {
  kv_.put_batch(writes);
  if (!index_) return {};
  for (const auto& w : writes) index_->put(w.key, kv_.get(w.key)->value);
  index_->root();
  return index_->take_work();
}

Digest StateStore::index_root() {
  if (!index_) throw std::logic_error("index root requested from a plain index");
  auto r = index_->root();
  index_->take_work();
  return r;
}

HashWork StateStore::append_block(Block block) {
  if (!ledger_) return {};
  block.height = ledger_->next_height();
  block.parent_digest = ledger_->tip_digest();
  const auto before = ledger_->block_bytes();
  ledger_->append(block);
  return HashWork{1, ledger_->block_bytes() - before};
}

StorageBreakdown StateStore::storage_breakdown() {
  StorageBreakdown s;
  s.records = kv_.size();
  // Each record also stores its 8-byte version.
  s.state_bytes = kv_.raw_bytes() + 8 * kv_.size();
  s.block_bytes = ledger_ ? ledger_->block_bytes() : 0;
  if (index_) {
    s.index_bytes = index_->stored_bytes();
    index_->take_work();
    if (s.records > 0) {
      const double extra = static_cast<double>(s.index_bytes) - static_cast<double>(kv_.raw_bytes());
      s.index_overhead_per_record = extra / static_cast<double>(s.records);
    }
  }
  return s;
}

}  // namespace bcdb
