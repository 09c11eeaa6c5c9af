// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "bcdb/authstore/kv.hpp"
#include "bcdb/core/transaction.hpp"

namespace bcdb {

/// Result of running a transaction against some view of the state.
struct Execution {
  std::vector<ReadEntry> reads;  // keys with the versions observed
  std::vector<WriteEntry> writes;
  /// False when a stored procedure refused (insufficient funds).
  bool ok = true;
  bool operator==(const Execution&) const = default;
};

/// A simulated execution signed by one endorser.
struct EndorsementResult {
  NodeId endorser = 0;
  Execution execution;
  /// Stands in for the endorser's signature: digest over the result and
  /// the endorser id.
  Digest token{};
};

EndorsementResult make_endorsement(NodeId endorser, Execution ex);
/// Endorsements agree when their reads and writes match; tokens differ
/// per endorser by construction.
bool same_result(const EndorsementResult& a, const EndorsementResult& b);

using StateReader = std::function<std::optional<VersionedValue>(const Key&)>;

/// Reads every key of the read set, then produces the write set: the
/// generated values for key-value transactions, or the procedure's output
/// for Smallbank calls.
Execution execute_txn(const Transaction& txn, const StateReader& read);

/// Reader over a committed store plus uncommitted writes layered on top;
/// each overlay write counts as one version bump.
class OverlayView {
 public:
  explicit OverlayView(const VersionedKV& base) : base_(&base) {}
  std::optional<VersionedValue> get(const Key& key) const;
  void put(const std::vector<WriteEntry>& writes);
  void clear() { overlay_.clear(); }
  StateReader reader() const {
    return [this](const Key& k) { return get(k); };
  }

 private:
  const VersionedKV* base_;
  std::map<Key, VersionedValue> overlay_;
};

}  // namespace bcdb
