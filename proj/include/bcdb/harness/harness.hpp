// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcdb/core/config.hpp"
#include "bcdb/pipeline/metrics.hpp"
#include "bcdb/workload/workload.hpp"

namespace bcdb {

struct ExperimentOutput {
  Metrics metrics;
  std::string trace;  // filled when requested
};

/// Runs one (config, workload) point under the given arrival process.
/// Sharded configs go through two-phase commit; everything else through
/// the pipeline the config selects. Throws ConfigError on invalid input.
Metrics run_experiment(const DesignConfig& cfg, const WorkloadSpec& spec, const Arrival& arrival,
                       std::uint64_t seed = 1);
/// Same, also recording the message trace.
ExperimentOutput run_experiment_traced(const DesignConfig& cfg, const WorkloadSpec& spec, const Arrival& arrival,
                                       std::uint64_t seed);

/// One CSV row: the point that was run and what it measured.
struct ResultRow {
  std::string label;
  DesignConfig cfg;
  WorkloadSpec spec;
  std::uint64_t seed = 1;
  Metrics metrics;
  std::string error;  // set when the cell could not run
};

/// Fixed column order of every CSV this library writes.
const std::vector<std::string>& csv_columns();
std::vector<std::string> csv_fields(const ResultRow& row);

/// Header plus one line per row; LF endings, `%.6f` decimals.
std::string csv_text(const std::vector<ResultRow>& rows);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Throws IoError (core/types.hpp) naming the path when the file cannot
/// be written.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

/// Parses text written by csv_text back into its fields. Throws
/// ConfigError when the header does not match csv_columns().
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// A sweep: one axis varied over a base point. The axis is any design
/// config or workload key.
struct Grid {
  DesignConfig base_cfg;
  WorkloadSpec base_spec;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds{1};
};

struct GridCell {
  std::string label;  // axis=value
  DesignConfig cfg;
  WorkloadSpec spec;
  std::uint64_t seed = 1;
  std::string error;  // the cell's value did not apply
};

/// Grid file: design and workload keys for the base point plus a
/// `[sweep]` section with `axis`, `values` (comma separated) and optional
/// `seeds`. Throws ConfigError for unknown keys or an empty grid.
Grid parse_grid(const FlatConfig& flat);
Grid load_grid_file(const std::string& path);
/// Cells in grid order (values outer, seeds inner). Throws ConfigError
/// for an empty grid.
std::vector<GridCell> expand(const Grid& grid);

/// Runs every cell, `jobs` at a time; rows come back in grid order. A cell
/// that throws becomes a row with its error set and the stall flag on.
std::vector<ResultRow> sweep(const std::vector<GridCell>& cells, unsigned jobs = 1, std::vector<std::string>* traces = nullptr);

/// Throughput ordering bands: tier 1 (TxnBased+BFT) is the slowest, tier
/// 4 (StorageBased+CFT) the fastest.
struct ForecastBand {
  int tier = 1;
  /// Concurrent OCC or locking: throughput swings under contention.
  bool high_variance = false;
  std::string label() const;
  bool operator==(const ForecastBand&) const = default;
};

ForecastBand forecast_band(const DesignConfig& cfg);

/// Saturation search over the open-loop rate. A rate is saturated once the
/// mean latency exceeds `factor` times the latency at a light load; the
/// boundary is found by doubling then bisection, and two probes at 2x and
/// 4x the boundary read the overloaded plateau. The peak is the highest
/// throughput any probe delivered.
struct PeakResult {
  double peak_throughput = 0;
  double saturation_rate = 0;  // lowest rate found saturated; 0 if none
  double unsaturated_latency = 0;
  int probes = 0;
};

PeakResult peak_throughput(const DesignConfig& cfg, const WorkloadSpec& spec, std::uint64_t seed = 1,
                           double factor = 5.0);

struct ForecastPoint {
  DesignConfig cfg;
  WorkloadSpec spec;
  double peak_throughput = 0;
};

struct ConsistencyReport {
  bool ok = false;
  bool skipped = false;
  std::vector<std::string> violations;
  std::string note;
};

/// Workloads at or above this skew count as high contention.
inline constexpr double kHighContentionTheta = 0.5;

/// Ok iff peak throughputs are strictly ordered by tier. All four
/// (replication model x failure model) corners must be present; a missing
/// one is reported as a precondition violation. Under high contention with
/// a high-variance corner present the check is skipped.
ConsistencyReport check_forecast_consistency(const std::vector<ForecastPoint>& points);

/// The four corners of `base`: replication model and failure model varied,
/// concurrency set to the model's default (order-execute or OCC), BFT with
/// N = 3f+1. Each corner's peak is measured by peak_throughput.
std::vector<ForecastPoint> forecast_corners(const DesignConfig& base, const WorkloadSpec& spec, std::uint64_t seed = 1);

// Trend checks over seeded runs. Each reports the values it compared.
struct TrendResult {
  std::string name;
  bool ok = false;
  std::vector<double> values;
};

bool non_decreasing(const std::vector<double>& v);
bool strictly_decreasing(const std::vector<double>& v);

/// Throughput at theta 1 below theta 0.
TrendResult throughput_drops_with_skew(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed = 1);
/// Throughput at 10 ops per transaction below 1 op.
TrendResult throughput_drops_with_ops(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed = 1);
/// Ledger plus MPT throughput below plain storage at 5000-byte records.
TrendResult authenticated_storage_costs_throughput(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed = 1);
/// Abort rate pooled over seeds [seed, seed + seed_count): total aborts over
/// total submitted. Each seed drives both the workload and the simulator.
double pooled_abort_rate(const DesignConfig& cfg, WorkloadSpec spec, std::uint64_t seed, std::uint32_t seed_count);
/// Pooled abort rate non-decreasing over the thetas.
TrendResult abort_rate_over_theta(const DesignConfig& cfg, WorkloadSpec spec, const std::vector<double>& thetas,
                                  std::uint64_t seed = 1, std::uint32_t seed_count = 1);
/// Pooled abort rate non-decreasing over the ops-per-transaction values.
TrendResult abort_rate_over_ops(const DesignConfig& cfg, WorkloadSpec spec, const std::vector<std::uint32_t>& ops,
                                std::uint64_t seed = 1, std::uint32_t seed_count = 1);

}  // namespace bcdb
