// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/mbt.hpp"

#include <stdexcept>

#include "bcdb/core/digest.hpp"
#include "bcdb/core/encoding.hpp"

namespace bcdb {

std::vector<std::uint32_t> MerkleBucketTree::shape(std::uint32_t bucket_count, std::uint32_t fanout) {
  std::vector<std::uint32_t> sizes{bucket_count};
  while (sizes.back() > 1) sizes.push_back((sizes.back() + fanout - 1) / fanout);
  return sizes;
}

MerkleBucketTree::MerkleBucketTree(std::uint32_t bucket_count, std::uint32_t fanout)
    : bucket_count_(bucket_count), fanout_(fanout) {
  if (bucket_count_ == 0) throw std::invalid_argument("MBT needs at least one bucket");
  if (fanout_ < 2) throw std::invalid_argument("MBT fanout must be at least 2");
  buckets_.resize(bucket_count_);
  for (auto n : shape(bucket_count_, fanout_)) levels_.emplace_back(n);
  if (levels_.size() == 1) levels_.emplace_back(1);  // a single bucket still gets a root above it
}

std::uint32_t MerkleBucketTree::bucket_of(const Key& key) const {
  return static_cast<std::uint32_t>(digest_prefix_u64(digest(key)) % bucket_count_);
}

void MerkleBucketTree::put(const Key& key, const Bytes& value) {
  const auto b = bucket_of(key);
  auto [it, inserted] = buckets_[b].insert_or_assign(key, value);
  (void)it;
  if (inserted) ++size_;
  dirty_.insert(b);
}

Bytes MerkleBucketTree::encode_bucket(std::uint32_t b) const {
  Encoder e;
  e.put_u32(static_cast<std::uint32_t>(buckets_[b].size()));
  for (const auto& [k, v] : buckets_[b]) {
    e.put_string(k);
    e.put_bytes(v);
  }
  return std::move(e).take();
}

Bytes MerkleBucketTree::encode_internal(std::span<const Digest> children) {
  Encoder e;
  e.put_u32(static_cast<std::uint32_t>(children.size()));
  for (const auto& d : children) e.put_digest(d);
  return std::move(e).take();
}

Digest MerkleBucketTree::root() {
  if (size_ == 0) return empty_digest();
  if (!built_) {
    // First use hashes everything once.
    for (std::uint32_t b = 0; b < bucket_count_; ++b) dirty_.insert(b);
    built_ = true;
  }
  std::set<std::uint32_t> touched = dirty_;
  for (auto b : touched) levels_[0][b] = hash(encode_bucket(b));
  dirty_.clear();
  for (std::size_t l = 1; l < levels_.size(); ++l) {
    std::set<std::uint32_t> parents;
    for (auto i : touched) parents.insert(i / fanout_);
    for (auto p : parents) {
      const auto begin = static_cast<std::size_t>(p) * fanout_;
      const auto end = std::min<std::size_t>(begin + fanout_, levels_[l - 1].size());
      levels_[l][p] = hash(encode_internal(std::span<const Digest>(levels_[l - 1]).subspan(begin, end - begin)));
    }
    touched = std::move(parents);
  }
  return levels_.back()[0];
}

std::optional<Bytes> MerkleBucketTree::prove(const Key& key) {
  const auto b = bucket_of(key);
  if (!buckets_[b].contains(key)) return std::nullopt;
  root();
  Encoder e;
  e.put_u32(b);
  e.put_bytes(encode_bucket(b));
  e.put_u32(static_cast<std::uint32_t>(levels_.size() - 1));
  std::size_t index = b;
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l) {
    const auto begin = index / fanout_ * fanout_;
    const auto end = std::min<std::size_t>(begin + fanout_, levels_[l].size());
    e.put_u32(static_cast<std::uint32_t>(end - begin));
    for (auto i = begin; i < end; ++i) e.put_digest(levels_[l][i]);
    index /= fanout_;
  }
  return std::move(e).take();
}

bool MerkleBucketTree::verify(const Digest& root, const Key& key, const Bytes& value,
                              std::span<const std::uint8_t> proof) const {
  try {
    Decoder d(proof);
    const auto b = d.get_u32();
    if (b != bucket_of(key)) return false;
    const auto bucket_bytes = d.get_bytes();
    // The bucket must contain exactly this (key, value).
    Decoder bd(bucket_bytes);
    const auto n = bd.get_u32();
    bool found = false;
    Key prev;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto k = bd.get_string();
      auto v = bd.get_bytes();
      if (i > 0 && !(prev < k)) return false;
      if (k == key) found = v == value;
      prev = std::move(k);
    }
    bd.expect_done();
    if (!found) return false;

    const auto sizes = shape(bucket_count_, fanout_);
    const auto levels = d.get_u32();
    const std::size_t expected_levels = sizes.size() == 1 ? 1 : sizes.size() - 1;
    if (levels != expected_levels) return false;
    Digest current = digest(bucket_bytes);
    std::size_t index = b;
    for (std::uint32_t l = 0; l < levels; ++l) {
      const std::size_t level_size = l < sizes.size() ? sizes[l] : 1;
      const auto begin = index / fanout_ * fanout_;
      const auto end = std::min<std::size_t>(begin + fanout_, level_size);
      const auto count = d.get_u32();
      if (count != end - begin) return false;
      std::vector<Digest> group(count);
      for (auto& g : group) g = d.get_digest();
      if (group[index - begin] != current) return false;
      current = digest(encode_internal(group));
      index /= fanout_;
    }
    d.expect_done();
    return current == root;
  } catch (const DecodeError&) {
    return false;
  }
}

std::uint64_t MerkleBucketTree::stored_bytes() {
  if (size_ == 0) return 0;
  root();
  std::uint64_t total = 0;
  for (std::uint32_t b = 0; b < bucket_count_; ++b) total += 32 + encode_bucket(b).size();
  for (std::size_t l = 1; l < levels_.size(); ++l) {
    for (std::size_t p = 0; p < levels_[l].size(); ++p) {
      const auto begin = p * fanout_;
      const auto end = std::min<std::size_t>(begin + fanout_, levels_[l - 1].size());
      total += 32 + 4 + 32 * (end - begin);
    }
  }
  return total;
}

}  // namespace bcdb
