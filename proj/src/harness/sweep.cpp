// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "bcdb/harness/harness.hpp"

namespace bcdb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool is_sweep_key(const std::string& k) { return k.rfind("sweep.", 0) == 0; }

void apply_axis(DesignConfig& cfg, WorkloadSpec& spec, const std::string& axis, const std::string& value) {
  if (is_design_config_key(axis)) {
    apply_field(cfg, axis, value);
    return;
  }
  auto flat = to_flat(spec);
  const auto bare = axis.rfind("workload.", 0) == 0 ? axis.substr(9) : axis;
  flat[bare] = value;
  spec = workload_from(flat);
}

}  // namespace

Grid parse_grid(const FlatConfig& flat) {
  Grid g;
  FlatConfig design, workload;
  std::optional<std::string> seeds;
  for (const auto& [k, v] : flat) {
    if (k == "sweep.axis") {
      g.axis = trim(v);
    } else if (k == "sweep.values") {
      g.values = split_list(v);
    } else if (k == "sweep.seeds") {
      seeds = v;
    } else if (is_sweep_key(k)) {
      throw ConfigError("unknown grid key: " + k);
    } else if (is_workload_key(k)) {
      workload[k] = v;
    } else {
      design[k] = v;  // unknown keys surface from design_config_from
    }
  }
  g.base_cfg = design_config_from(design);
  g.base_spec = workload_from(workload);
  if (g.axis.empty()) throw ConfigError("grid: sweep.axis is required");
  if (!is_design_config_key(g.axis) && !is_workload_key(g.axis)) throw ConfigError("grid: unknown axis " + g.axis);
  if (g.values.empty()) throw ConfigError("grid: sweep.values is empty");
  if (seeds) {
    g.seeds.clear();
    for (const auto& s : split_list(*seeds)) g.seeds.push_back(parse_u64("sweep.seeds", s));
    if (g.seeds.empty()) throw ConfigError("grid: sweep.seeds is empty");
  } else {
    g.seeds = {g.base_spec.seed};
  }
  return g;
}

Grid load_grid_file(const std::string& path) { return parse_grid(load_config_file(path)); }

std::vector<GridCell> expand(const Grid& grid) {
  if (grid.values.empty() || grid.seeds.empty()) throw ConfigError("grid is empty");
  std::vector<GridCell> cells;
  for (const auto& v : grid.values) {
    for (auto seed : grid.seeds) {
      GridCell c;
      c.label = grid.axis + "=" + v;
      c.cfg = grid.base_cfg;
      c.spec = grid.base_spec;
      try {
        apply_axis(c.cfg, c.spec, grid.axis, v);
      } catch (const ConfigError& e) {
        c.error = e.what();
      }
      c.spec.seed = seed;
      c.seed = seed;
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<ResultRow> sweep(const std::vector<GridCell>& cells, unsigned jobs, std::vector<std::string>* traces) {
  std::vector<ResultRow> rows(cells.size());
  if (traces) traces->assign(cells.size(), "");
  auto run_cell = [&](std::size_t i) {
    const auto& c = cells[i];
    ResultRow& row = rows[i];
    row.label = c.label;
    row.cfg = c.cfg;
    row.spec = c.spec;
    row.seed = c.seed;
    row.error = c.error;
    if (row.error.empty()) {
      try {
        if (traces) {
          auto out = run_experiment_traced(c.cfg, c.spec, c.spec.arrival, c.seed);
          row.metrics = std::move(out.metrics);
          (*traces)[i] = std::move(out.trace);
        } else {
          row.metrics = run_experiment(c.cfg, c.spec, c.spec.arrival, c.seed);
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    if (!row.error.empty()) {
      row.metrics = Metrics{};
      row.metrics.stalled = true;
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (auto i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) run_cell(i);
    });
  }
  workers.clear();  // joins
  return rows;
}

}  // namespace bcdb
