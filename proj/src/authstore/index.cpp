// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/index.hpp"

#include <cmath>

#include "bcdb/authstore/mbt.hpp"
#include "bcdb/authstore/mpt.hpp"
#include "bcdb/core/digest.hpp"

namespace bcdb {

VirtualTime HashWork::cost(const CostModel& c) const {
  return static_cast<VirtualTime>(hashes) * c.hash_time_base +
         static_cast<VirtualTime>(std::ceil(static_cast<double>(bytes) * c.hash_time_per_byte));
}

Digest AuthIndex::hash(std::span<const std::uint8_t> encoding) {
  ++work_.hashes;
  work_.bytes += encoding.size();
  return digest(encoding);
}

std::unique_ptr<AuthIndex> make_index(IndexKind kind) {
  switch (kind) {
    case IndexKind::MPT: return std::make_unique<MerklePatriciaTrie>();
    case IndexKind::MBT: return std::make_unique<MerkleBucketTree>();
    case IndexKind::Plain: break;
  }
  return nullptr;
}

}  // namespace bcdb
