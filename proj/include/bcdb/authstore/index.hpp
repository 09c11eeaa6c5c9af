// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>

#include "bcdb/core/config.hpp"
#include "bcdb/core/types.hpp"

namespace bcdb {

/// Hashing performed by an index, for charging virtual CPU time.
struct HashWork {
  std::uint64_t hashes = 0;
  std::uint64_t bytes = 0;

  VirtualTime cost(const CostModel& c) const;
  HashWork& operator+=(const HashWork& o) {
    hashes += o.hashes;
    bytes += o.bytes;
    return *this;
  }
};

/// Authenticated key-value index. Writes mark paths dirty; root()
/// recomputes them and records the hashing done.
class AuthIndex {
 public:
  virtual ~AuthIndex() = default;

  virtual IndexKind kind() const = 0;
  virtual std::unique_ptr<AuthIndex> clone() const = 0;

  virtual void put(const Key& key, const Bytes& value) = 0;
  virtual Digest root() = 0;
  /// Serialized membership proof; nullopt when the key is absent.
  virtual std::optional<Bytes> prove(const Key& key) = 0;
  /// Never throws: malformed proofs are rejected.
  virtual bool verify(const Digest& root, const Key& key, const Bytes& value,
                      std::span<const std::uint8_t> proof) const = 0;

  /// Bytes the index stores: each node's 32-byte digest key plus its encoding.
  virtual std::uint64_t stored_bytes() = 0;

  /// Hashing since the last call.
  HashWork take_work() {
    auto w = work_;
    work_ = {};
    return w;
  }
  const HashWork& pending_work() const { return work_; }

 protected:
  Digest hash(std::span<const std::uint8_t> encoding);

 private:
  HashWork work_;
};

/// nullptr for IndexKind::Plain.
std::unique_ptr<AuthIndex> make_index(IndexKind kind);

}  // namespace bcdb
