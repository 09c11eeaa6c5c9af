// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/core/transaction.hpp"

#include <algorithm>

#include "bcdb/core/digest.hpp"

namespace bcdb {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pending: return "pending";
    case Outcome::Committed: return "committed";
    case Outcome::AbortedRW: return "aborted_rw";
    case Outcome::AbortedWW: return "aborted_ww";
    case Outcome::AbortedInconsistentRead: return "aborted_inconsistent_read";
    case Outcome::AbortedBlocked: return "aborted_blocked";
    case Outcome::AbortedApplication: return "aborted_application";
    case Outcome::Dropped: return "dropped";
  }
  return "?";
}

std::string_view to_string(SmallbankProc p) {
  switch (p) {
    case SmallbankProc::Balance: return "balance";
    case SmallbankProc::DepositChecking: return "deposit_checking";
    case SmallbankProc::TransactSavings: return "transact_savings";
    case SmallbankProc::WriteCheck: return "write_check";
    case SmallbankProc::SendPayment: return "send_payment";
    case SmallbankProc::Amalgamate: return "amalgamate";
  }
  return "?";
}

std::vector<Key> Transaction::touched_keys() const {
  std::vector<Key> keys;
  keys.reserve(read_set.size() + write_set.size());
  for (const auto& r : read_set) keys.push_back(r.key);
  for (const auto& w : write_set) keys.push_back(w.key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

void Transaction::finish(Outcome o) {
  if (is_terminal(outcome)) throw std::logic_error("transaction outcome already decided");
  if (!is_terminal(o)) throw std::logic_error("finish requires a terminal outcome");
  outcome = o;
}

namespace {

void put_time(Encoder& enc, const std::optional<VirtualTime>& t) {
  enc.put_bool(t.has_value());
  if (t) enc.put_i64(*t);
}

std::optional<VirtualTime> get_time(Decoder& dec) {
  if (!dec.get_bool()) return std::nullopt;
  return dec.get_i64();
}

}  // namespace

void encode_into(Encoder& enc, const Transaction& txn) {
  enc.put_u64(txn.id);
  enc.put_u32(static_cast<std::uint32_t>(txn.read_set.size()));
  for (const auto& r : txn.read_set) {
    enc.put_string(r.key);
    enc.put_u64(r.version);
  }
  enc.put_u32(static_cast<std::uint32_t>(txn.write_set.size()));
  for (const auto& w : txn.write_set) {
    enc.put_string(w.key);
    enc.put_bytes(w.value);
  }
  enc.put_u32(txn.op_count);
  put_time(enc, txn.submit_time);
  put_time(enc, txn.order_time);
  put_time(enc, txn.commit_time);
  enc.put_u8(static_cast<std::uint8_t>(txn.outcome));
  enc.put_bool(txn.call.has_value());
  if (txn.call) {
    enc.put_u8(static_cast<std::uint8_t>(txn.call->proc));
    enc.put_u64(txn.call->account_a);
    enc.put_u64(txn.call->account_b);
    enc.put_i64(txn.call->amount);
  }
}

Transaction decode_transaction(Decoder& dec) {
  Transaction txn;
  txn.id = dec.get_u64();
  auto reads = dec.get_u32();
  for (std::uint32_t i = 0; i < reads; ++i) {
    ReadEntry r;
    r.key = dec.get_string();
    r.version = dec.get_u64();
    txn.read_set.push_back(std::move(r));
  }
  auto writes = dec.get_u32();
  for (std::uint32_t i = 0; i < writes; ++i) {
    WriteEntry w;
    w.key = dec.get_string();
    w.value = dec.get_bytes();
    txn.write_set.push_back(std::move(w));
  }
  txn.op_count = dec.get_u32();
  txn.submit_time = get_time(dec);
  txn.order_time = get_time(dec);
  txn.commit_time = get_time(dec);
  auto outcome = dec.get_u8();
  if (outcome > static_cast<std::uint8_t>(Outcome::Dropped)) throw DecodeError("invalid outcome");
  txn.outcome = static_cast<Outcome>(outcome);
  if (dec.get_bool()) {
    SmallbankCall call;
    auto proc = dec.get_u8();
    if (proc > static_cast<std::uint8_t>(SmallbankProc::Amalgamate)) throw DecodeError("invalid procedure");
    call.proc = static_cast<SmallbankProc>(proc);
    call.account_a = dec.get_u64();
    call.account_b = dec.get_u64();
    call.amount = dec.get_i64();
    txn.call = call;
  }
  return txn;
}

Bytes encode(const Transaction& txn) {
  Encoder enc;
  encode_into(enc, txn);
  return std::move(enc).take();
}

Transaction decode_transaction(std::span<const std::uint8_t> bytes) {
  Decoder dec(bytes);
  auto txn = decode_transaction(dec);
  dec.expect_done();
  return txn;
}

void encode_into(Encoder& enc, const Block& block) {
  enc.put_u64(block.height);
  enc.put_digest(block.parent_digest);
  enc.put_u32(block.proposer);
  enc.put_bool(block.state_root.has_value());
  if (block.state_root) enc.put_digest(*block.state_root);
  enc.put_u32(static_cast<std::uint32_t>(block.txns.size()));
  for (const auto& txn : block.txns) encode_into(enc, txn);
}

Bytes encode(const Block& block) {
  Encoder enc;
  encode_into(enc, block);
  return std::move(enc).take();
}

Block decode_block(std::span<const std::uint8_t> bytes) {
  Decoder dec(bytes);
  Block block;
  block.height = dec.get_u64();
  block.parent_digest = dec.get_digest();
  block.proposer = dec.get_u32();
  if (dec.get_bool()) block.state_root = dec.get_digest();
  auto count = dec.get_u32();
  for (std::uint32_t i = 0; i < count; ++i) block.txns.push_back(decode_transaction(dec));
  dec.expect_done();
  return block;
}

Digest block_digest(const Block& block) { return digest(encode(block)); }

}  // namespace bcdb
