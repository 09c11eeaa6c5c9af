// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>

#include "bcdb/core/types.hpp"

namespace bcdb {

/// SHA-256 of the given bytes. Every digest in the system (ledger links,
/// trie nodes, bucket trees, endorsement tokens) goes through here.
Digest digest(std::span<const std::uint8_t> data);
Digest digest(std::string_view data);

/// Digest of the empty byte string; also the root of an empty index.
const Digest& empty_digest();

/// Incremental hashing for data that is produced in pieces.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  void update(std::span<const std::uint8_t> data);
  Digest finish();

 private:
  void* ctx_;
};

/// Big-endian value of the first eight digest bytes.
std::uint64_t digest_prefix_u64(const Digest& d);

}  // namespace bcdb
