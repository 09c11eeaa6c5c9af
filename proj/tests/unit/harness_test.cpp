// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "bcdb/harness/harness.hpp"
#include "bcdb/pipeline/pipeline.hpp"

using namespace bcdb;

namespace {

WorkloadSpec small_spec(std::uint64_t txns = 300) {
  WorkloadSpec s;
  s.txn_count = txns;
  return s;
}

DesignConfig eov_config() {
  DesignConfig c;
  c.concurrency_mode = ConcurrencyMode::ExecuteOrderValidate;
  c.replication_approach = ReplicationApproach::SharedLog;
  return c;
}

DesignConfig storage_occ() {
  DesignConfig c;
  c.replication_model = ReplicationModel::StorageBased;
  c.concurrency_mode = ConcurrencyMode::ConcurrentOCC;
  return c;
}

ResultRow default_row() {
  ResultRow row;
  row.label = "run";
  row.seed = 1;
  row.metrics = run_experiment(row.cfg, row.spec, row.spec.arrival, 1);
  return row;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bcdb_harness_" + name)).string();
}

}  // namespace

TEST_CASE("run_experiment dispatches on the sharding mode") {
  const auto spec = small_spec();
  DesignConfig plain;
  RunOptions opts;
  opts.arrival = spec.arrival;
  const auto direct = run_pipeline(plain, spec, opts);
  const auto m = run_experiment(plain, spec, spec.arrival, 1);
  CHECK(m.committed_count == direct.metrics.committed_count);
  CHECK(m.span == direct.metrics.span);
  CHECK(m.shards.shard_count == 1);

  auto sharded = storage_occ();
  sharded.sharding_mode.mode = ShardingMode::Trusted2PC;
  sharded.sharding_mode.shard_count = 4;
  const auto s = run_experiment(sharded, spec, spec.arrival, 1);
  CHECK(s.shards.shard_count == 4);
  CHECK(s.shards.cross_shard_ratio == 0.0);  // one op per txn
  CHECK(s.accounting_holds());

  sharded.sharding_mode.shard_count = 0;
  CHECK_THROWS_AS(run_experiment(sharded, spec, spec.arrival, 1), ConfigError);
}

TEST_CASE("traced run records one tab-separated line per message") {
  const auto out = run_experiment_traced(DesignConfig{}, small_spec(50), Arrival{}, 3);
  REQUIRE_FALSE(out.trace.empty());
  const auto first = out.trace.substr(0, out.trace.find('\n'));
  CHECK(std::count(first.begin(), first.end(), '\t') == 4);
  const auto plain = run_experiment(DesignConfig{}, small_spec(50), Arrival{}, 3);
  CHECK(out.metrics.span == plain.span);
  CHECK(out.metrics.messages == plain.messages);
}

TEST_CASE("csv: header only for zero rows, fixed columns") {
  const auto text = csv_text({});
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(parse_csv(text).empty());
  const auto& cols = csv_columns();
  REQUIRE(cols.size() >= 4);
  // Shard columns close every row.
  CHECK(cols[cols.size() - 4] == "shard_count");
  CHECK(cols[cols.size() - 3] == "cross_shard_ratio");
  CHECK(cols[cols.size() - 2] == "blocked_count");
  CHECK(cols[cols.size() - 1] == "reconfig_interval");
}

TEST_CASE("csv: parse reproduces emitted rows") {
  auto a = default_row();
  auto b = a;
  b.label = "odd, label\nwith newline";
  b.error = "bad \"value\", twice";
  b.metrics.shards.reconfig_interval = 50'000;
  b.metrics.shards.shard_count = 4;
  const auto rows = parse_csv(csv_text({a, b}));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv_fields(a));
  CHECK(rows[1] == csv_fields(b));
  CHECK(rows[1][0] == "odd; label with newline");
  CHECK(rows[1].back() == "50000");
  CHECK(rows[0].back().empty());
}

TEST_CASE("csv: parse rejects foreign headers and ragged rows") {
  CHECK_THROWS_AS(parse_csv(""), ConfigError);
  CHECK_THROWS_AS(parse_csv("a,b,c\n"), ConfigError);
  auto text = csv_text({default_row()});
  text.insert(text.size() - 1, ",extra");
  CHECK_THROWS_AS(parse_csv(text), ConfigError);
}

TEST_CASE("csv: default run matches the golden file") {
  const auto golden = read_file(std::string(BCDB_TEST_DATA_DIR) + "/golden/default_run.csv");
  CHECK(csv_text({default_row()}) == golden);
}

TEST_CASE("csv: same seed gives byte-identical output") {
  auto cfg = eov_config();
  auto spec = small_spec(500);
  spec.theta = 0.9;
  auto run_once = [&] {
    ResultRow r;
    r.cfg = cfg;
    r.spec = spec;
    r.metrics = run_experiment(cfg, spec, spec.arrival, 42);
    return csv_text({r});
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("file errors carry the path") {
  const std::string bad = "/nonexistent-dir/out.csv";
  try {
    emit_csv({}, bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
  CHECK_THROWS_AS(read_file("/nonexistent-dir/in.csv"), IoError);

  const auto p = tmp_path("empty.csv");
  emit_csv({}, p);
  CHECK(read_file(p) == csv_text({}));
  std::filesystem::remove(p);
}

TEST_CASE("grid: key-value and JSON forms agree") {
  const auto kv = parse_config_text(R"(
concurrency_mode = execute_order_validate
replication_approach = shared_log
[workload]
txn_count = 200
[sweep]
axis = theta
values = 0, 0.5, 1
seeds = 3, 4
)");
  const auto js = parse_config_text(R"({
  "concurrency_mode": "execute_order_validate",
  "replication_approach": "shared_log",
  "workload": {"txn_count": 200},
  "sweep": {"axis": "theta", "values": [0, 0.5, 1], "seeds": [3, 4]}
})");
  const auto a = parse_grid(kv), b = parse_grid(js);
  CHECK(a.base_cfg == b.base_cfg);
  CHECK(a.base_spec == b.base_spec);
  CHECK(a.axis == "theta");
  CHECK(a.values.size() == 3);
  CHECK(b.values.size() == 3);
  CHECK(a.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(a.base_cfg.concurrency_mode == ConcurrencyMode::ExecuteOrderValidate);
  CHECK(a.base_spec.txn_count == 200);

  const auto cells = expand(a);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].label == "theta=0");
  CHECK(cells[0].seed == 3);
  CHECK(cells[1].seed == 4);
  CHECK(cells[5].label == "theta=1");
  CHECK(cells[5].spec.theta == 1.0);
  CHECK(cells[5].spec.seed == 4);
}

TEST_CASE("grid: malformed grids are rejected") {
  CHECK_THROWS_AS(parse_grid(parse_config_text("[sweep]\naxis = theta\nvalues =\n")), ConfigError);
  CHECK_THROWS_AS(parse_grid(parse_config_text("[sweep]\nvalues = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_grid(parse_config_text("[sweep]\naxis = colour\nvalues = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_grid(parse_config_text("[sweep]\naxis = theta\nvalues = 1\nfoo = 2\n")), ConfigError);
  CHECK_THROWS_AS(parse_grid(parse_config_text("bogus = 1\n[sweep]\naxis = theta\nvalues = 1\n")), ConfigError);
  CHECK_THROWS_AS(expand(Grid{}), ConfigError);
  CHECK_THROWS_AS(load_grid_file("/nonexistent-dir/g.grid"), IoError);
}

TEST_CASE("sweep: failing cells become stall rows in grid order") {
  Grid g;
  g.base_spec = small_spec(200);
  g.axis = "concurrency_mode";
  g.values = {"order_execute", "concurrent_occ", "not_a_mode", "execute_order_validate"};
  const auto cells = expand(g);
  const auto rows = sweep(cells, 2);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].label == cells[i].label);
  CHECK(rows[0].error.empty());
  CHECK(rows[0].metrics.committed_count == 200);
  // Storage pipeline under transaction-based replication: invalid combination.
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[1].metrics.stalled);
  CHECK(rows[1].metrics.submitted == 0);
  CHECK_FALSE(rows[2].error.empty());
  CHECK(rows[2].metrics.stalled);
  CHECK(rows[3].error.empty());
  const auto parsed = parse_csv(csv_text(rows));
  CHECK(parsed.size() == 4);
}

TEST_CASE("sweep: parallel and serial runs agree byte for byte") {
  Grid g;
  g.base_cfg = eov_config();
  g.base_spec = small_spec(300);
  g.axis = "theta";
  g.values = {"0", "0.5", "0.9", "1"};
  g.seeds = {1, 2};
  const auto cells = expand(g);
  std::vector<std::string> t1, t4;
  const auto serial = sweep(cells, 1, &t1);
  const auto parallel = sweep(cells, 4, &t4);
  CHECK(csv_text(serial) == csv_text(parallel));
  CHECK(t1 == t4);
  for (const auto& r : serial) CHECK(r.metrics.accounting_holds());
}

TEST_CASE("sweep: workload and design axes both apply") {
  Grid g;
  g.base_spec = small_spec(100);
  g.axis = "workload.record_size_bytes";
  g.values = {"10", "5000"};
  auto cells = expand(g);
  CHECK(cells[0].spec.record_size_bytes == 10);
  CHECK(cells[1].spec.record_size_bytes == 5000);
  g.axis = "storage_mode.index";
  g.values = {"plain", "mpt"};
  cells = expand(g);
  CHECK(cells[1].cfg.storage_mode.index == IndexKind::MPT);
}

TEST_CASE("single serial node with plain storage commits everything") {
  DesignConfig c;
  c.node_count = 1;
  c.tolerated_failures = 0;
  c.concurrency_mode = ConcurrencyMode::Serial;
  c.storage_mode = StorageMode{false, IndexKind::Plain};
  const auto m = run_experiment(c, small_spec(100), Arrival{});
  CHECK(m.committed_count == 100);
  CHECK(m.aborted() == 0);
  CHECK_FALSE(m.stalled);
}

TEST_CASE("sweep: node counts give one row per value") {
  Grid g;
  g.base_spec = small_spec(50);
  g.axis = "node_count";
  g.values = {"3", "5", "7", "11", "15", "19"};
  const auto rows = sweep(expand(g), 2);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].cfg.node_count == std::stoul(g.values[i]));
    CHECK(rows[i].metrics.committed_count == 50);
  }
  const auto parsed = parse_csv(csv_text(rows));
  CHECK(parsed.size() == 6);
}

TEST_CASE("forecast bands cover the four corners") {
  DesignConfig c;
  CHECK(forecast_band(c) == ForecastBand{2, false});
  c.failure_model = FailureModel::BFT;
  CHECK(forecast_band(c).tier == 1);
  c = storage_occ();
  CHECK(forecast_band(c) == ForecastBand{4, true});
  c.failure_model = FailureModel::BFT;
  CHECK(forecast_band(c).tier == 3);
  c.concurrency_mode = ConcurrencyMode::ConcurrentLocking;
  CHECK(forecast_band(c).high_variance);
  c.concurrency_mode = ConcurrencyMode::Serial;
  CHECK_FALSE(forecast_band(c).high_variance);
  CHECK(forecast_band(c).label().find("tier 3") == 0);
}

namespace {

std::vector<ForecastPoint> synthetic_corners(std::array<double, 4> peaks, double theta = 0) {
  std::vector<ForecastPoint> out;
  int i = 0;
  for (auto model : {ReplicationModel::TransactionBased, ReplicationModel::StorageBased}) {
    for (auto failure : {FailureModel::BFT, FailureModel::CFT}) {
      ForecastPoint p;
      p.cfg.replication_model = model;
      p.cfg.failure_model = failure;
      if (model == ReplicationModel::StorageBased) p.cfg.concurrency_mode = ConcurrencyMode::ConcurrentOCC;
      p.spec.theta = theta;
      p.peak_throughput = peaks[i++];
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("forecast consistency on synthetic corners") {
  auto ok = check_forecast_consistency(synthetic_corners({100, 200, 300, 400}));
  CHECK(ok.ok);
  CHECK_FALSE(ok.skipped);
  CHECK(ok.violations.empty());

  auto bad = check_forecast_consistency(synthetic_corners({100, 300, 200, 400}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.violations.size() == 1);

  auto tie = check_forecast_consistency(synthetic_corners({100, 200, 200, 400}));
  CHECK_FALSE(tie.ok);

  auto contended = check_forecast_consistency(synthetic_corners({400, 300, 200, 100}, 1.0));
  CHECK(contended.skipped);
  CHECK_FALSE(contended.ok);
  CHECK_FALSE(contended.note.empty());

  auto one = synthetic_corners({1, 2, 3, 4});
  one.resize(1);
  const auto single = check_forecast_consistency(one);
  CHECK_FALSE(single.ok);
  REQUIRE(single.violations.size() == 3);
  CHECK(single.violations[0].rfind("precondition", 0) == 0);
  CHECK(check_forecast_consistency({}).violations.size() == 4);
}

TEST_CASE("peak throughput search separates slow and fast corners") {
  auto spec = small_spec(1000);
  DesignConfig bft;
  bft.failure_model = FailureModel::BFT;
  bft.node_count = 4;
  const auto slow = peak_throughput(bft, spec);
  const auto fast = peak_throughput(storage_occ(), spec);
  CHECK(slow.probes > 2);
  CHECK(slow.unsaturated_latency > 0);
  CHECK(slow.saturation_rate > 0);
  CHECK(slow.peak_throughput > 1000);
  CHECK(slow.peak_throughput < 2 * slow.saturation_rate);
  CHECK(fast.peak_throughput > 3 * slow.peak_throughput);
}

TEST_CASE("trend checks on seeded runs") {
  auto spec = small_spec(2000);
  const auto skew = throughput_drops_with_skew(eov_config(), spec);
  CHECK(skew.ok);
  CHECK(skew.values.size() == 2);

  const auto ops = throughput_drops_with_ops(eov_config(), spec);
  CHECK(ops.ok);

  auto auth_spec = small_spec(500);
  const auto auth = authenticated_storage_costs_throughput(DesignConfig{}, auth_spec);
  CHECK(auth.ok);

  const auto theta = abort_rate_over_theta(eov_config(), spec, {0, 0.2, 0.4, 0.6, 0.8, 1.0});
  CHECK(theta.ok);
  CHECK(theta.values.front() == 0.0);
  CHECK(theta.values.back() > 0.0);

  const auto by_ops = abort_rate_over_ops(eov_config(), small_spec(500), {1, 2, 4, 8});
  CHECK(by_ops.ok);

  CHECK(non_decreasing({0, 0, 1}));
  CHECK_FALSE(non_decreasing({1, 0}));
  CHECK(strictly_decreasing({3, 2, 1}));
  CHECK_FALSE(strictly_decreasing({3, 3}));
}
