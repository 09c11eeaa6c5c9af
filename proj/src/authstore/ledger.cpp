// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/ledger.hpp"

#include <stdexcept>
#include <string>

#include "bcdb/core/digest.hpp"

namespace bcdb {

Digest LedgerStore::append(const Block& block) {
  if (block.height != blocks_.size()) {
    throw std::invalid_argument("block height " + std::to_string(block.height) + " does not extend chain of " +
                                std::to_string(blocks_.size()));
  }
  if (block.parent_digest != tip_) throw std::invalid_argument("block parent digest does not match tip");
  auto bytes = encode(block);
  tip_ = digest(bytes);
  bytes_ += bytes.size();
  blocks_.push_back(std::move(bytes));
  return tip_;
}

std::optional<std::uint64_t> LedgerStore::verify_chain() const {
  // Walk back from the tip digest, which is held outside the block bytes:
  // a block whose digest matches is authentic, so its parent link is too.
  Digest expected = tip_;
  for (std::uint64_t h = blocks_.size(); h-- > 0;) {
    if (digest(blocks_[h]) != expected) return h;
    Block b;
    try {
      b = decode_block(blocks_[h]);
    } catch (const DecodeError&) {
      return h;
    }
    if (b.height != h) return h;
    expected = b.parent_digest;
  }
  if (expected != Digest{}) return 0;
  return std::nullopt;
}

Block LedgerStore::block(std::uint64_t height) const { return decode_block(blocks_.at(height)); }

}  // namespace bcdb
