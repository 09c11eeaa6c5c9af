// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <vector>

#include "bcdb/authstore/index.hpp"

namespace bcdb {

/// Fixed-shape Merkle tree over hash buckets. A key lives in bucket
/// prefix64(digest(key)) mod bucket_count; each bucket hashes its entries
/// sorted by key, and each internal node hashes up to `fanout` children.
///
///   bucket:   digest(u32 n, then bytes(key), bytes(value) per entry)
///   internal: digest(u32 k, then the k child digests)
/// The empty tree's root is the digest of the empty string.
class MerkleBucketTree final : public AuthIndex {
 public:
  explicit MerkleBucketTree(std::uint32_t bucket_count = 1000, std::uint32_t fanout = 4);

  IndexKind kind() const override { return IndexKind::MBT; }
  std::unique_ptr<AuthIndex> clone() const override { return std::make_unique<MerkleBucketTree>(*this); }

  void put(const Key& key, const Bytes& value) override;
  Digest root() override;
  std::optional<Bytes> prove(const Key& key) override;
  bool verify(const Digest& root, const Key& key, const Bytes& value,
              std::span<const std::uint8_t> proof) const override;
  std::uint64_t stored_bytes() override;

  /// Internal levels above the buckets: ceil(log_fanout(bucket_count)).
  std::uint32_t depth() const { return static_cast<std::uint32_t>(levels_.size()) - 1; }
  std::uint32_t bucket_of(const Key& key) const;
  std::uint32_t bucket_count() const { return bucket_count_; }
  std::uint32_t fanout() const { return fanout_; }
  /// Sibling groups a proof carries (one per internal level).
  std::uint32_t proof_levels() const { return depth(); }

 private:
  Bytes encode_bucket(std::uint32_t b) const;
  static Bytes encode_internal(std::span<const Digest> children);
  /// Size of each level, bottom (buckets) first.
  static std::vector<std::uint32_t> shape(std::uint32_t bucket_count, std::uint32_t fanout);

  std::uint32_t bucket_count_;
  std::uint32_t fanout_;
  std::size_t size_ = 0;
  std::vector<std::map<Key, Bytes>> buckets_;
  std::vector<std::vector<Digest>> levels_;  // levels_[0] = bucket digests
  std::set<std::uint32_t> dirty_;
  bool built_ = false;
};

}  // namespace bcdb
