// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>

#include "bcdb/harness/harness.hpp"

namespace bcdb {

std::string ForecastBand::label() const {
  static const char* const names[] = {"transaction-based/bft", "transaction-based/cft", "storage-based/bft",
                                      "storage-based/cft"};
  std::string s = "tier " + std::to_string(tier) + " (" + names[std::clamp(tier, 1, 4) - 1] + ")";
  if (high_variance) s += ", high variance under contention";
  return s;
}

ForecastBand forecast_band(const DesignConfig& cfg) {
  ForecastBand b;
  const bool storage = cfg.replication_model == ReplicationModel::StorageBased;
  const bool bft = cfg.failure_model == FailureModel::BFT;
  b.tier = storage ? (bft ? 3 : 4) : (bft ? 1 : 2);
  b.high_variance = cfg.concurrency_mode == ConcurrencyMode::ConcurrentOCC ||
                    cfg.concurrency_mode == ConcurrencyMode::ConcurrentLocking;
  return b;
}

namespace {

constexpr double kLightRate = 200;
constexpr double kMaxRate = 1'000'000;

Arrival open_at(double rate) {
  Arrival a;
  a.mode = ArrivalMode::OpenLoop;
  a.rate = rate;
  return a;
}

}  // namespace

PeakResult peak_throughput(const DesignConfig& cfg, const WorkloadSpec& spec, std::uint64_t seed, double factor) {
  PeakResult out;
  auto probe = [&](double rate) {
    ++out.probes;
    auto m = run_experiment(cfg, spec, open_at(rate), seed);
    out.peak_throughput = std::max(out.peak_throughput, m.throughput);
    return m;
  };
  const auto light = probe(kLightRate);
  out.unsaturated_latency = light.latency_mean;
  const double limit = factor * light.latency_mean;
  auto saturated = [&](const Metrics& m) { return m.stalled || m.committed_count == 0 || m.latency_mean > limit; };

  double lo = kLightRate, hi = 0;
  for (double r = 1000; r <= kMaxRate; r *= 2) {
    if (saturated(probe(r))) {
      hi = r;
      break;
    }
    lo = r;
  }
  if (hi == 0) return out;  // never saturated below kMaxRate
  while (hi / lo > 1.05) {
    const double mid = (lo + hi) / 2;
    (saturated(probe(mid)) ? hi : lo) = mid;
  }
  out.saturation_rate = hi;
  // Past the knee the delivered rate keeps climbing while batches fill.
  probe(2 * hi);
  probe(4 * hi);
  return out;
}

ConsistencyReport check_forecast_consistency(const std::vector<ForecastPoint>& points) {
  std::map<int, std::vector<const ForecastPoint*>> by_tier;
  bool contended = false, variance = false;
  for (const auto& p : points) {
    const auto band = forecast_band(p.cfg);
    by_tier[band.tier].push_back(&p);
    contended = contended || p.spec.theta >= kHighContentionTheta;
    variance = variance || band.high_variance;
  }
  ConsistencyReport rep;
  for (int t = 1; t <= 4; ++t) {
    if (!by_tier.contains(t)) rep.violations.push_back("precondition: no corner for tier " + std::to_string(t));
  }
  if (!rep.violations.empty()) return rep;
  if (contended && variance) {
    rep.skipped = true;
    rep.note = "high-contention workload with a high-variance corner: ordering not checked";
    return rep;
  }
  for (const auto& p : points) {
    for (const auto& q : points) {
      const auto tp = forecast_band(p.cfg).tier, tq = forecast_band(q.cfg).tier;
      if (tp < tq && !(p.peak_throughput < q.peak_throughput)) {
        rep.violations.push_back("tier " + std::to_string(tp) + " peak " + format_double(p.peak_throughput) +
                                 " is not below tier " + std::to_string(tq) + " peak " +
                                 format_double(q.peak_throughput));
      }
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

std::vector<ForecastPoint> forecast_corners(const DesignConfig& base, const WorkloadSpec& spec, std::uint64_t seed) {
  std::vector<ForecastPoint> out;
  for (auto model : {ReplicationModel::TransactionBased, ReplicationModel::StorageBased}) {
    for (auto failure : {FailureModel::BFT, FailureModel::CFT}) {
      ForecastPoint p;
      p.cfg = base;
      p.cfg.replication_model = model;
      p.cfg.failure_model = failure;
      p.cfg.replication_approach = ReplicationApproach::Consensus;
      p.cfg.sharding_mode = ShardingConfig{};
      p.cfg.concurrency_mode =
          model == ReplicationModel::TransactionBased ? ConcurrencyMode::OrderExecute : ConcurrencyMode::ConcurrentOCC;
      const auto f = std::max(1u, base.tolerated_failures);
      p.cfg.tolerated_failures = f;
      p.cfg.node_count = failure == FailureModel::BFT ? 3 * f + 1 : std::max(base.node_count, 2 * f + 1);
      p.spec = spec;
      p.peak_throughput = peak_throughput(p.cfg, spec, seed).peak_throughput;
      out.push_back(std::move(p));
    }
  }
  return out;
}

bool non_decreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

TrendResult throughput_drops_with_skew(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed) {
  TrendResult r{"throughput(theta=1) < throughput(theta=0)", false, {}};
  for (double theta : {0.0, 1.0}) {
    spec.theta = theta;
    r.values.push_back(run_experiment(cfg, spec, spec.arrival, seed).throughput);
  }
  r.ok = strictly_decreasing(r.values);
  return r;
}

TrendResult throughput_drops_with_ops(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed) {
  TrendResult r{"throughput(ops=10) < throughput(ops=1)", false, {}};
  for (std::uint32_t ops : {1u, 10u}) {
    spec.ops_per_txn = ops;
    r.values.push_back(run_experiment(cfg, spec, spec.arrival, seed).throughput);
  }
  r.ok = strictly_decreasing(r.values);
  return r;
}

TrendResult authenticated_storage_costs_throughput(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed) {
  TrendResult r{"throughput(ledger+mpt) < throughput(plain) at 5000 B", false, {}};
  spec.record_size_bytes = 5000;
  spec.constant_total = false;
  auto plain = cfg;
  plain.storage_mode = StorageMode{false, IndexKind::Plain};
  auto auth = cfg;
  auth.storage_mode = StorageMode{true, IndexKind::MPT};
  r.values.push_back(run_experiment(plain, spec, spec.arrival, seed).throughput);
  r.values.push_back(run_experiment(auth, spec, spec.arrival, seed).throughput);
  r.ok = strictly_decreasing(r.values);
  return r;
}

double pooled_abort_rate(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed, std::uint32_t seed_count) {
  std::uint64_t aborted = 0, submitted = 0;
  for (std::uint64_t k = seed; k < seed + seed_count; ++k) {
    spec.seed = k;
    const auto m = run_experiment(cfg, spec, spec.arrival, k);
    aborted += m.aborted();
    submitted += m.submitted;
  }
  return submitted == 0 ? 0.0 : static_cast<double>(aborted) / static_cast<double>(submitted);
}

TrendResult abort_rate_over_theta(const DesignConfig& cfg, WorkloadSpec spec, const std::vector<double>& thetas,
                                  std::uint64_t seed, std::uint32_t seed_count) {
  TrendResult r{"abort rate non-decreasing in theta", false, {}};
  for (double theta : thetas) {
    spec.theta = theta;
    r.values.push_back(pooled_abort_rate(cfg, spec, seed, seed_count));
  }
  r.ok = non_decreasing(r.values);
  return r;
}

TrendResult abort_rate_over_ops(const DesignConfig& cfg, WorkloadSpec spec, const std::vector<std::uint32_t>& ops,
                                std::uint64_t seed, std::uint32_t seed_count) {
  TrendResult r{"abort rate non-decreasing in ops per txn", false, {}};
  for (auto o : ops) {
    spec.ops_per_txn = o;
    r.values.push_back(pooled_abort_rate(cfg, spec, seed, seed_count));
  }
  r.ok = non_decreasing(r.values);
  return r;
}

}  // namespace bcdb
