// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/workload/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bcdb/core/digest.hpp"
#include "bcdb/core/rng.hpp"
#include "bcdb/workload/zipf.hpp"

namespace bcdb {

std::string_view to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::YcsbUpdate: return "ycsbupdate";
    case WorkloadKind::YcsbQuery: return "ycsbquery";
    case WorkloadKind::YcsbMixed: return "ycsbmixed";
    case WorkloadKind::Smallbank: return "smallbank";
  }
  return "?";
}

std::string_view to_string(ArrivalMode m) { return m == ArrivalMode::OpenLoop ? "open" : "closed"; }

std::uint32_t WorkloadSpec::effective_record_size() const {
  if (!constant_total || ops_per_txn == 0) return record_size_bytes;
  return std::max<std::uint32_t>(1, record_size_bytes / ops_per_txn);
}

std::vector<Violation> validate_workload(const WorkloadSpec& s) {
  std::vector<Violation> out;
  if (s.record_count < 1) out.push_back({"record_count", "must be positive"});
  if (s.record_size_bytes < 1) out.push_back({"record_size_bytes", "must be positive"});
  if (s.ops_per_txn < 1) out.push_back({"ops_per_txn", "must be positive"});
  if (s.ops_per_txn > s.record_count) out.push_back({"ops_per_txn", "exceeds record_count"});
  if (s.txn_count < 1) out.push_back({"txn_count", "must be positive"});
  if (!(s.theta >= 0) || !std::isfinite(s.theta)) out.push_back({"theta", "must be >= 0"});
  if (!(s.read_fraction >= 0 && s.read_fraction <= 1)) out.push_back({"read_fraction", "must be in [0, 1]"});
  if (s.kind == WorkloadKind::Smallbank) {
    if (s.record_count < 2) out.push_back({"record_count", "smallbank needs at least two accounts"});
    double total = 0;
    for (double w : s.smallbank_mix) {
      if (!(w >= 0) || !std::isfinite(w)) out.push_back({"smallbank_mix", "weights must be >= 0"});
      total += w;
    }
    if (!(total > 0)) out.push_back({"smallbank_mix", "weights must not all be zero"});
  }
  if (s.arrival.mode == ArrivalMode::OpenLoop && !(s.arrival.rate > 0 && std::isfinite(s.arrival.rate))) {
    out.push_back({"arrival_rate", "must be positive"});
  }
  if (s.arrival.mode == ArrivalMode::ClosedLoop && s.arrival.clients < 1) {
    out.push_back({"clients", "must be positive"});
  }
  return out;
}

namespace {

const char* const kWorkloadKeys[] = {"kind",          "read_fraction", "record_count", "record_size_bytes",
                                     "constant_total", "theta",         "ops_per_txn",  "txn_count",
                                     "seed",           "smallbank_mix", "arrival",      "arrival_rate",
                                     "clients"};

std::string bare(const std::string& key) {
  constexpr std::string_view prefix = "workload.";
  if (key.rfind(prefix, 0) == 0) return key.substr(prefix.size());
  return key;
}

std::array<double, 6> parse_mix(const std::string& key, const std::string& value) {
  std::array<double, 6> out{};
  std::size_t i = 0;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (i == out.size()) throw ConfigError(key + ": expected 6 weights");
    out[i++] = parse_double(key, item);
  }
  if (i != out.size()) throw ConfigError(key + ": expected 6 weights");
  return out;
}

}  // namespace

bool is_workload_key(const std::string& key) {
  auto b = bare(key);
  return std::any_of(std::begin(kWorkloadKeys), std::end(kWorkloadKeys), [&](const char* k) { return b == k; });
}

WorkloadSpec workload_from(const FlatConfig& flat) {
  WorkloadSpec s;
  for (const auto& [full, v] : flat) {
    const auto k = bare(full);
    if (k == "kind") {
      auto n = normalize_enum(v);
      bool found = false;
      for (auto kind : {WorkloadKind::YcsbUpdate, WorkloadKind::YcsbQuery, WorkloadKind::YcsbMixed,
                        WorkloadKind::Smallbank}) {
        if (n == to_string(kind)) {
          s.kind = kind;
          found = true;
        }
      }
      if (!found) throw ConfigError("invalid value '" + v + "' for " + full);
    } else if (k == "read_fraction") {
      s.read_fraction = parse_double(full, v);
    } else if (k == "record_count") {
      s.record_count = parse_u64(full, v);
    } else if (k == "record_size_bytes") {
      auto x = parse_u64(full, v);
      if (x > 1u << 30) throw ConfigError(full + ": too large");
      s.record_size_bytes = static_cast<std::uint32_t>(x);
    } else if (k == "constant_total") {
      s.constant_total = parse_bool(full, v);
    } else if (k == "theta") {
      s.theta = parse_double(full, v);
    } else if (k == "ops_per_txn") {
      auto x = parse_u64(full, v);
      if (x > 1u << 20) throw ConfigError(full + ": too large");
      s.ops_per_txn = static_cast<std::uint32_t>(x);
    } else if (k == "txn_count") {
      s.txn_count = parse_u64(full, v);
    } else if (k == "seed") {
      s.seed = parse_u64(full, v);
    } else if (k == "smallbank_mix") {
      s.smallbank_mix = parse_mix(full, v);
    } else if (k == "arrival") {
      auto n = normalize_enum(v);
      if (n == "open" || n == "openloop") {
        s.arrival.mode = ArrivalMode::OpenLoop;
      } else if (n == "closed" || n == "closedloop") {
        s.arrival.mode = ArrivalMode::ClosedLoop;
      } else {
        throw ConfigError("invalid value '" + v + "' for " + full);
      }
    } else if (k == "arrival_rate") {
      s.arrival.rate = parse_double(full, v);
    } else if (k == "clients") {
      auto x = parse_u64(full, v);
      if (x > 1u << 20) throw ConfigError(full + ": too large");
      s.arrival.clients = static_cast<std::uint32_t>(x);
    } else {
      throw ConfigError("unknown workload key: " + full);
    }
  }
  return s;
}

WorkloadSpec load_workload_file(const std::string& path) { return workload_from(load_config_file(path)); }

FlatConfig to_flat(const WorkloadSpec& s) {
  FlatConfig out;
  out["kind"] = std::string(to_string(s.kind));
  out["read_fraction"] = format_double(s.read_fraction);
  out["record_count"] = std::to_string(s.record_count);
  out["record_size_bytes"] = std::to_string(s.record_size_bytes);
  out["constant_total"] = s.constant_total ? "true" : "false";
  out["theta"] = format_double(s.theta);
  out["ops_per_txn"] = std::to_string(s.ops_per_txn);
  out["txn_count"] = std::to_string(s.txn_count);
  out["seed"] = std::to_string(s.seed);
  std::string mix;
  for (std::size_t i = 0; i < s.smallbank_mix.size(); ++i) {
    if (i) mix += ",";
    mix += format_double(s.smallbank_mix[i]);
  }
  out["smallbank_mix"] = mix;
  out["arrival"] = std::string(to_string(s.arrival.mode));
  out["arrival_rate"] = format_double(s.arrival.rate);
  out["clients"] = std::to_string(s.arrival.clients);
  return out;
}

Key record_key(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "k%015llu", static_cast<unsigned long long>(index % 1'000'000'000'000'000ULL));
  return buf;
}

std::uint64_t scramble(std::uint64_t x, std::uint64_t n) {
  if (n <= 1) return 0;
  // First odd multiplier at or above a fixed constant that is coprime to n.
  std::uint64_t a = 0x9E3779B97F4A7C15ULL % n;
  if (a < 2) a = 3;
  while (std::gcd(a, n) != 1) ++a;
  const std::uint64_t c = 0x632BE59BD9B4E019ULL % n;
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * (x % n) + c) % n);
}

namespace {

Bytes random_value(Rng& rng, std::uint32_t size) {
  Bytes out(size);
  std::uint64_t word = 0;
  for (std::uint32_t i = 0; i < size; ++i) {
    if (i % 8 == 0) word = rng.next();
    out[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

// `count` distinct record indices drawn by Zipf rank, then scrambled.
std::vector<std::uint64_t> draw_keys(const ZipfSampler& zipf, Rng& rng, std::uint32_t count, std::uint64_t n) {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  while (out.size() < count) {
    auto idx = scramble(zipf(rng) - 1, n);
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  return out;
}

void require_valid_workload(const WorkloadSpec& spec) {
  auto v = validate_workload(spec);
  if (v.empty()) return;
  std::string msg = "invalid workload:";
  for (const auto& x : v) msg += " " + x.field + ": " + x.message + ";";
  throw ConfigError(msg);
}

}  // namespace

std::vector<WriteEntry> initial_records(const WorkloadSpec& spec) {
  std::vector<WriteEntry> out;
  out.reserve(spec.record_count);
  if (spec.kind == WorkloadKind::Smallbank) {
    const auto enc = encode_account({kInitialBalance, kInitialBalance});
    for (std::uint64_t i = 0; i < spec.record_count; ++i) out.push_back({record_key(i), enc});
    return out;
  }
  Rng rng = Rng::derive(spec.seed, "records");
  const auto size = spec.effective_record_size();
  for (std::uint64_t i = 0; i < spec.record_count; ++i) out.push_back({record_key(i), random_value(rng, size)});
  return out;
}

std::vector<Transaction> gen_ycsb(const WorkloadSpec& spec) {
  require_valid_workload(spec);
  Rng rng = Rng::derive(spec.seed, "workload");
  ZipfSampler zipf(spec.record_count, spec.theta);
  const auto size = spec.effective_record_size();
  std::vector<Transaction> out;
  out.reserve(spec.txn_count);
  for (std::uint64_t id = 1; id <= spec.txn_count; ++id) {
    Transaction t;
    t.id = id;
    for (auto idx : draw_keys(zipf, rng, spec.ops_per_txn, spec.record_count)) {
      auto key = record_key(idx);
      bool write = spec.kind == WorkloadKind::YcsbUpdate ||
                   (spec.kind == WorkloadKind::YcsbMixed && !rng.bernoulli(spec.read_fraction));
      // Every operation reads first; updates then write the record back.
      t.read_set.push_back({key, 0});
      if (write) t.write_set.push_back({key, random_value(rng, size)});
    }
    t.op_count = spec.ops_per_txn;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Transaction> gen_smallbank(const WorkloadSpec& spec) {
  require_valid_workload(spec);
  Rng rng = Rng::derive(spec.seed, "workload");
  ZipfSampler zipf(spec.record_count, spec.theta);
  double total = 0;
  for (double w : spec.smallbank_mix) total += w;
  std::vector<Transaction> out;
  out.reserve(spec.txn_count);
  for (std::uint64_t id = 1; id <= spec.txn_count; ++id) {
    double pick = rng.unit() * total;
    std::size_t p = 0;
    while (p + 1 < spec.smallbank_mix.size() && (pick >= spec.smallbank_mix[p] || spec.smallbank_mix[p] == 0)) {
      pick -= spec.smallbank_mix[p];
      ++p;
    }
    SmallbankCall call;
    call.proc = static_cast<SmallbankProc>(p);
    const bool two = call.proc == SmallbankProc::SendPayment || call.proc == SmallbankProc::Amalgamate;
    auto accounts = draw_keys(zipf, rng, two ? 2 : 1, spec.record_count);
    call.account_a = accounts[0];
    call.account_b = two ? accounts[1] : accounts[0];
    call.amount = call.proc == SmallbankProc::TransactSavings ? rng.uniform(-100, 100) : rng.uniform(1, 100);
    if (call.proc == SmallbankProc::Balance || call.proc == SmallbankProc::Amalgamate) call.amount = 0;

    Transaction t;
    t.id = id;
    for (auto idx : accounts) {
      t.read_set.push_back({record_key(idx), 0});
      if (call.proc != SmallbankProc::Balance) t.write_set.push_back({record_key(idx), {}});
    }
    t.op_count = static_cast<std::uint32_t>(accounts.size());
    t.call = call;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Transaction> generate(const WorkloadSpec& spec) {
  return spec.kind == WorkloadKind::Smallbank ? gen_smallbank(spec) : gen_ycsb(spec);
}

void write_stream(std::ostream& out, const std::vector<Transaction>& txns) {
  for (const auto& t : txns) {
    out << t.id;
    if (t.call) {
      out << " sb:" << to_string(t.call->proc) << ':' << t.call->account_a << ':' << t.call->account_b << ':'
          << t.call->amount;
    } else {
      for (const auto& r : t.read_set) out << " r:" << r.key;
      for (const auto& w : t.write_set) {
        const auto d = digest(w.value);
        out << " w:" << w.key << ':' << w.value.size() << ':' << to_hex(d.data(), 4);
      }
    }
    out << '\n';
  }
}

std::string stream_text(const std::vector<Transaction>& txns) {
  std::ostringstream out;
  write_stream(out, txns);
  return out.str();
}

Bytes encode_account(const Account& a) {
  Encoder e;
  e.put_i64(a.checking);
  e.put_i64(a.savings);
  return std::move(e).take();
}

Account decode_account(const Bytes& bytes) {
  if (bytes.size() != 16) return {};
  Decoder d(bytes);
  Account a;
  a.checking = d.get_i64();
  a.savings = d.get_i64();
  return a;
}

CallResult execute_smallbank(const SmallbankCall& call, const std::function<Account(std::uint64_t)>& read) {
  CallResult r;
  Account a = read(call.account_a);
  auto put = [&](std::uint64_t id, const Account& acc) { r.writes.push_back({record_key(id), encode_account(acc)}); };
  switch (call.proc) {
    case SmallbankProc::Balance:
      break;
    case SmallbankProc::DepositChecking:
      if (call.amount < 0) return {false, {}};
      a.checking += call.amount;
      put(call.account_a, a);
      break;
    case SmallbankProc::TransactSavings:
      if (a.savings + call.amount < 0) return {false, {}};
      a.savings += call.amount;
      put(call.account_a, a);
      break;
    case SmallbankProc::WriteCheck:
      // Overdrawing is allowed but costs a one-cent penalty.
      a.checking -= (a.checking + a.savings < call.amount) ? call.amount + 1 : call.amount;
      put(call.account_a, a);
      break;
    case SmallbankProc::SendPayment: {
      if (call.amount < 0 || a.checking < call.amount) return {false, {}};
      Account b = read(call.account_b);
      a.checking -= call.amount;
      b.checking += call.amount;
      put(call.account_a, a);
      put(call.account_b, b);
      break;
    }
    case SmallbankProc::Amalgamate: {
      Account b = read(call.account_b);
      b.checking += a.checking + a.savings;
      a = {};
      put(call.account_a, a);
      put(call.account_b, b);
      break;
    }
  }
  return r;
}

}  // namespace bcdb
