// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bcdb/core/transaction.hpp"

namespace bcdb {

struct VersionedValue {
  Bytes value;
  std::uint64_t version = 0;
  bool operator==(const VersionedValue&) const = default;
};

/// Committed key-value state with a per-key version counter.
class VersionedKV {
 public:
  std::optional<VersionedValue> get(const Key& key) const;
  /// Current version of `key`; 0 when absent.
  std::uint64_t version(const Key& key) const;

  /// Applies all writes atomically. A key written several times keeps the
  /// last value and its version moves up by exactly one. Returns the new
  /// version of each distinct key, in key order.
  std::vector<std::pair<Key, std::uint64_t>> put_batch(std::span<const WriteEntry> writes);

  std::size_t size() const { return data_.size(); }
  /// Raw bytes of keys plus values.
  std::uint64_t raw_bytes() const { return raw_bytes_; }
  const std::map<Key, VersionedValue>& entries() const { return data_; }

 private:
  std::map<Key, VersionedValue> data_;
  std::uint64_t raw_bytes_ = 0;
};

}  // namespace bcdb
