// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bcdb/core/encoding.hpp"
#include "bcdb/core/types.hpp"

namespace bcdb {

enum class Outcome : std::uint8_t {
  Pending,
  Committed,
  AbortedRW,
  AbortedWW,
  AbortedInconsistentRead,
  AbortedBlocked,
  AbortedApplication,  // smallbank constraint violation, not a concurrency abort
  Dropped,             // endorsement timeout
};

std::string_view to_string(Outcome o);
inline bool is_terminal(Outcome o) { return o != Outcome::Pending; }
inline bool is_conflict_abort(Outcome o) {
  return o == Outcome::AbortedRW || o == Outcome::AbortedWW || o == Outcome::AbortedInconsistentRead ||
         o == Outcome::AbortedBlocked;
}

struct ReadEntry {
  Key key;
  std::uint64_t version = 0;
  bool operator==(const ReadEntry&) const = default;
};

struct WriteEntry {
  Key key;
  Bytes value;
  bool operator==(const WriteEntry&) const = default;
};

enum class SmallbankProc : std::uint8_t {
  Balance,
  DepositChecking,
  TransactSavings,
  WriteCheck,
  SendPayment,
  Amalgamate,
};

std::string_view to_string(SmallbankProc p);

/// Stored procedure call; its writes are computed from the values read at
/// execution time rather than fixed when the transaction is generated.
struct SmallbankCall {
  SmallbankProc proc = SmallbankProc::Balance;
  std::uint64_t account_a = 0;
  std::uint64_t account_b = 0;
  std::int64_t amount = 0;
  bool operator==(const SmallbankCall&) const = default;
};

struct Transaction {
  std::uint64_t id = 0;
  std::vector<ReadEntry> read_set;
  std::vector<WriteEntry> write_set;
  std::uint32_t op_count = 0;
  std::optional<VirtualTime> submit_time;
  std::optional<VirtualTime> order_time;
  std::optional<VirtualTime> commit_time;
  Outcome outcome = Outcome::Pending;
  std::optional<SmallbankCall> call;

  /// Sorted, de-duplicated union of read and write keys.
  std::vector<Key> touched_keys() const;

  /// Moves a pending transaction to a terminal outcome. Throws
  /// std::logic_error on any other transition.
  void finish(Outcome o);

  bool operator==(const Transaction&) const = default;
};

struct Block {
  std::uint64_t height = 0;
  Digest parent_digest{};
  std::vector<Transaction> txns;
  NodeId proposer = 0;
  std::optional<Digest> state_root;

  bool operator==(const Block&) const = default;
};

void encode_into(Encoder& enc, const Transaction& txn);
Transaction decode_transaction(Decoder& dec);
Bytes encode(const Transaction& txn);
Transaction decode_transaction(std::span<const std::uint8_t> bytes);

void encode_into(Encoder& enc, const Block& block);
Bytes encode(const Block& block);
Block decode_block(std::span<const std::uint8_t> bytes);

/// Digest of the canonical block encoding; the link stored in the successor.
Digest block_digest(const Block& block);

}  // namespace bcdb
