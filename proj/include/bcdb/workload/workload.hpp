// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcdb/core/config.hpp"
#include "bcdb/core/transaction.hpp"

namespace bcdb {

enum class WorkloadKind { YcsbUpdate, YcsbQuery, YcsbMixed, Smallbank };
enum class ArrivalMode { OpenLoop, ClosedLoop };

std::string_view to_string(WorkloadKind k);
std::string_view to_string(ArrivalMode m);

/// How transactions reach the system: a fixed rate (open loop) or a fixed
/// number of clients each waiting for its previous transaction (closed loop).
struct Arrival {
  ArrivalMode mode = ArrivalMode::OpenLoop;
  /// Transactions per virtual second, open loop only.
  double rate = 2000;
  /// Concurrent clients, closed loop only.
  std::uint32_t clients = 16;
  bool operator==(const Arrival&) const = default;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::YcsbUpdate;
  /// Fraction of read-only operations, YcsbMixed only.
  double read_fraction = 0.5;
  std::uint64_t record_count = 10'000;
  std::uint32_t record_size_bytes = 1000;
  /// Keep bytes written per transaction fixed: each record gets
  /// record_size_bytes / ops_per_txn bytes.
  bool constant_total = false;
  double theta = 0.0;
  std::uint32_t ops_per_txn = 1;
  std::uint64_t txn_count = 1000;
  std::uint64_t seed = 1;
  /// Relative weights of the six Smallbank procedures, in SmallbankProc order.
  std::array<double, 6> smallbank_mix{1, 1, 1, 1, 1, 1};
  Arrival arrival;

  /// Bytes per written record after the constant-total adjustment.
  std::uint32_t effective_record_size() const;

  bool operator==(const WorkloadSpec&) const = default;
};

std::vector<Violation> validate_workload(const WorkloadSpec& spec);

/// Accepts bare keys or keys under a `[workload]` section.
WorkloadSpec workload_from(const FlatConfig& flat);
WorkloadSpec load_workload_file(const std::string& path);
FlatConfig to_flat(const WorkloadSpec& spec);
bool is_workload_key(const std::string& key);

/// Fixed-width (16 byte) key for record `index`.
Key record_key(std::uint64_t index);

/// Bijection on [0, n) that scatters neighbouring ranks across the key
/// space: x -> (a*x + c) mod n with a coprime to n.
std::uint64_t scramble(std::uint64_t x, std::uint64_t n);

/// The records a store holds before the first transaction.
std::vector<WriteEntry> initial_records(const WorkloadSpec& spec);

std::vector<Transaction> gen_ycsb(const WorkloadSpec& spec);
std::vector<Transaction> gen_smallbank(const WorkloadSpec& spec);
/// Dispatches on spec.kind.
std::vector<Transaction> generate(const WorkloadSpec& spec);

/// Line-based dump, one transaction per line:
/// `<id> <op> <op> ...` with ops `r:<key>`, `w:<key>:<len>:<hex8>` or
/// `sb:<proc>:<a>:<b>:<amount>`.
void write_stream(std::ostream& out, const std::vector<Transaction>& txns);
std::string stream_text(const std::vector<Transaction>& txns);

// Smallbank accounts live in one record each: checking then savings, as
// big-endian signed 64-bit cents.
struct Account {
  std::int64_t checking = 0;
  std::int64_t savings = 0;
  bool operator==(const Account&) const = default;
};

inline constexpr std::int64_t kInitialBalance = 10'000;

Bytes encode_account(const Account& a);
/// Missing or malformed records read as an empty account.
Account decode_account(const Bytes& bytes);

struct CallResult {
  /// False on a constraint violation (insufficient funds); nothing is written.
  bool ok = true;
  std::vector<WriteEntry> writes;
};

/// Runs one procedure against balances supplied by `read`.
CallResult execute_smallbank(const SmallbankCall& call, const std::function<Account(std::uint64_t)>& read);

}  // namespace bcdb
