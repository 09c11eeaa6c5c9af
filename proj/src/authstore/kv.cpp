// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/kv.hpp"

namespace bcdb {

std::optional<VersionedValue> VersionedKV::get(const Key& key) const {
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t VersionedKV::version(const Key& key) const {
  auto it = data_.find(key);
  return it == data_.end() ? 0 : it->second.version;
}

std::vector<std::pair<Key, std::uint64_t>> VersionedKV::put_batch(std::span<const WriteEntry> writes) {
  std::map<Key, const Bytes*> last;
  for (const auto& w : writes) last[w.key] = &w.value;
  std::vector<std::pair<Key, std::uint64_t>> out;
  out.reserve(last.size());
  for (const auto& [key, value] : last) {
    auto [it, inserted] = data_.try_emplace(key);
    if (inserted) {
      raw_bytes_ += key.size();
    } else {
      raw_bytes_ -= it->second.value.size();
    }
    raw_bytes_ += value->size();
    it->second.value = *value;
    ++it->second.version;
    out.emplace_back(key, it->second.version);
  }
  return out;
}

}  // namespace bcdb
