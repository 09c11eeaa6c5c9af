// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/execute.hpp"

#include "bcdb/core/digest.hpp"
#include "bcdb/workload/workload.hpp"

namespace bcdb {

Execution execute_txn(const Transaction& txn, const StateReader& read) {
  Execution ex;
  std::map<Key, Bytes> seen;
  for (const auto& r : txn.read_set) {
    auto v = read(r.key);
    ex.reads.push_back({r.key, v ? v->version : 0});
    seen[r.key] = v ? v->value : Bytes{};
  }
  if (!txn.call) {
    ex.writes = txn.write_set;
    return ex;
  }
  auto res = execute_smallbank(*txn.call, [&](std::uint64_t id) {
    auto key = record_key(id);
    auto it = seen.find(key);
    if (it != seen.end()) return decode_account(it->second);
    auto v = read(key);
    return decode_account(v ? v->value : Bytes{});
  });
  ex.ok = res.ok;
  ex.writes = std::move(res.writes);
  return ex;
}

EndorsementResult make_endorsement(NodeId endorser, Execution ex) {
  Encoder e;
  e.put_u32(endorser);
  e.put_u32(static_cast<std::uint32_t>(ex.reads.size()));
  for (const auto& r : ex.reads) {
    e.put_string(r.key);
    e.put_u64(r.version);
  }
  e.put_u32(static_cast<std::uint32_t>(ex.writes.size()));
  for (const auto& w : ex.writes) {
    e.put_string(w.key);
    e.put_bytes(w.value);
  }
  e.put_u8(ex.ok ? 1 : 0);
  EndorsementResult r{endorser, std::move(ex), {}};
  r.token = digest(std::move(e).take());
  return r;
}

bool same_result(const EndorsementResult& a, const EndorsementResult& b) { return a.execution == b.execution; }

std::optional<VersionedValue> OverlayView::get(const Key& key) const {
  auto it = overlay_.find(key);
  if (it != overlay_.end()) return it->second;
  return base_->get(key);
}

void OverlayView::put(const std::vector<WriteEntry>& writes) {
  for (const auto& w : writes) {
    auto cur = get(w.key);
    overlay_[w.key] = VersionedValue{w.value, (cur ? cur->version : 0) + 1};
  }
}

}  // namespace bcdb
