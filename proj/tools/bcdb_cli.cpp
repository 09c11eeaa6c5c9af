// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: single runs, sweeps and throughput-band forecasts.
//
// Exit codes: 0 success, 2 bad usage or config, 3 I/O failure, 1 anything else.

#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "bcdb/harness/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int cmd_run(const std::string& config, const std::string& workload, std::uint64_t seed, const std::string& out,
            const std::string& trace, const std::string& stream) {
  auto cfg = bcdb::design_config_from(bcdb::load_config_file(config));
  auto spec = bcdb::load_workload_file(workload);
  spec.seed = seed;
  bcdb::require_valid(cfg);
  if (!stream.empty()) bcdb::write_file(stream, bcdb::stream_text(bcdb::generate(spec)));

  bcdb::ResultRow row;
  row.label = "run";
  row.cfg = cfg;
  row.spec = spec;
  row.seed = seed;
  if (trace.empty()) {
    row.metrics = bcdb::run_experiment(cfg, spec, spec.arrival, seed);
  } else {
    auto r = bcdb::run_experiment_traced(cfg, spec, spec.arrival, seed);
    row.metrics = std::move(r.metrics);
    bcdb::write_file(trace, r.trace);
  }
  bcdb::emit_csv({row}, out);
  const auto& m = row.metrics;
  std::printf("committed %llu/%llu  throughput %.1f tps  mean latency %.0f ticks%s\n",
              static_cast<unsigned long long>(m.committed_count), static_cast<unsigned long long>(m.submitted),
              m.throughput, m.latency_mean, m.stalled ? "  (stalled)" : "");
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& out, unsigned jobs, const std::string& trace) {
  const auto cells = bcdb::expand(bcdb::load_grid_file(grid_path));
  std::vector<std::string> traces;
  const auto rows = bcdb::sweep(cells, jobs, trace.empty() ? nullptr : &traces);
  bcdb::emit_csv(rows, out);
  if (!trace.empty()) {
    std::string all;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      all += "# " + rows[i].label + " seed " + std::to_string(rows[i].seed) + "\n";
      all += traces[i];
    }
    bcdb::write_file(trace, all);
  }
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failed;
      std::fprintf(stderr, "%s: %s\n", r.label.c_str(), r.error.c_str());
    }
  }
  std::printf("%zu cells, %zu failed\n", rows.size(), failed);
  return 0;
}

int cmd_forecast(const std::string& config, const std::string& workload, bool check, std::uint64_t seed) {
  const auto cfg = bcdb::design_config_from(bcdb::load_config_file(config));
  bcdb::require_valid(cfg);
  std::printf("%s\n", bcdb::forecast_band(cfg).label().c_str());
  if (!check) return 0;
  auto spec = workload.empty() ? bcdb::WorkloadSpec{} : bcdb::load_workload_file(workload);
  spec.seed = seed;
  const auto corners = bcdb::forecast_corners(cfg, spec, seed);
  for (const auto& p : corners) {
    std::printf("  %-40s peak %.1f tps\n", bcdb::forecast_band(p.cfg).label().c_str(), p.peak_throughput);
  }
  const auto rep = bcdb::check_forecast_consistency(corners);
  if (rep.skipped) {
    std::printf("ordering: skipped (%s)\n", rep.note.c_str());
  } else {
    std::printf("ordering: %s\n", rep.ok ? "consistent" : "violated");
    for (const auto& v : rep.violations) std::printf("  %s\n", v.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space simulator for blockchain-database hybrids"};
  app.require_subcommand(1);

  std::string config, workload, out, trace, stream, grid;
  std::uint64_t seed = 1;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool check = false;

  auto* run = app.add_subcommand("run", "Run one design point and write a one-row CSV");
  run->add_option("--config", config, "Design config (key-value or JSON)")->required();
  run->add_option("--workload", workload, "Workload file (key-value or JSON)")->required();
  run->add_option("--seed", seed, "Seed for workload generation and the simulator");
  run->add_option("--out", out, "Output CSV")->required();
  run->add_option("--trace", trace, "Write the message trace (TSV) here");
  run->add_option("--stream", stream, "Write the generated transaction stream here");

  auto* sw = app.add_subcommand("sweep", "Run every cell of a grid file");
  sw->add_option("--grid", grid, "Grid file")->required();
  sw->add_option("--out", out, "Output CSV")->required();
  sw->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);
  sw->add_option("--trace", trace, "Write every cell's trace here, one block per cell");

  auto* fc = app.add_subcommand("forecast", "Print the throughput band of a design");
  fc->add_option("--config", config, "Design config")->required();
  fc->add_option("--workload", workload, "Workload for --check");
  fc->add_flag("--check", check, "Measure the four corners and check the band ordering");
  fc->add_option("--seed", seed, "Seed for --check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, workload, seed, out, trace, stream);
    if (*sw) return cmd_sweep(grid, out, jobs, trace);
    if (*fc) return cmd_forecast(config, workload, check, seed);
  } catch (const bcdb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const bcdb::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
