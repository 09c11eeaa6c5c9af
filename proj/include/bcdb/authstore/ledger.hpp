// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "bcdb/core/transaction.hpp"

namespace bcdb {

/// Append-only hash-chained block store. Blocks are kept in encoded form
/// so verification re-derives everything from the stored bytes.
class LedgerStore {
 public:
  /// Digest linking the next block: zero before genesis.
  const Digest& tip_digest() const { return tip_; }
  std::uint64_t height() const { return blocks_.size(); }
  std::uint64_t next_height() const { return blocks_.size(); }

  /// Appends `block` if its height and parent digest extend the chain;
  /// throws std::invalid_argument otherwise. Returns the block's digest.
  Digest append(const Block& block);

  /// Walks the chain back from the tip digest recomputing block digests.
  /// Returns the height of the highest block whose stored bytes no longer
  /// match the digest its successor (or the tip) recorded; with a single
  /// mutation that is the mutated block.
  std::optional<std::uint64_t> verify_chain() const;

  Block block(std::uint64_t height) const;
  std::uint64_t block_bytes() const { return bytes_; }

  /// Direct access to stored bytes, for tamper tests.
  Bytes& raw_block(std::uint64_t height) { return blocks_.at(height); }

 private:
  std::vector<Bytes> blocks_;
  Digest tip_{};
  std::uint64_t bytes_ = 0;
};

}  // namespace bcdb
