// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace bcdb {

std::uint64_t Metrics::aborted() const {
  std::uint64_t n = 0;
  for (const auto& [o, c] : aborts) n += c;
  return n;
}

std::uint64_t Metrics::conflict_aborts() const {
  std::uint64_t n = 0;
  for (const auto& [o, c] : aborts) {
    if (is_conflict_abort(o)) n += c;
  }
  return n;
}

double Metrics::abort_rate() const {
  return submitted == 0 ? 0.0 : static_cast<double>(aborted()) / static_cast<double>(submitted);
}

bool Metrics::accounting_holds() const { return submitted == committed_count + aborted() + pending + dropped; }

double percentile(std::vector<double> sample, double p) {
  if (sample.empty()) return 0;
  std::sort(sample.begin(), sample.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sample.size())));
  if (rank < 1) rank = 1;
  return sample[std::min(rank, sample.size()) - 1];
}

void summarize(Metrics& m, const std::vector<Transaction>& txns, const std::vector<TxnTimeline>& timelines) {
  m.submitted = m.committed_count = m.dropped = m.pending = 0;
  m.aborts.clear();
  std::optional<VirtualTime> first_submit, last_commit;
  std::vector<double> latencies;
  PhaseTimings sum;
  std::size_t phased = 0;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto& t = txns[i];
    if (!t.submit_time) continue;
    ++m.submitted;
    if (!first_submit || *t.submit_time < *first_submit) first_submit = t.submit_time;
    switch (t.outcome) {
      case Outcome::Pending: ++m.pending; break;
      case Outcome::Dropped: ++m.dropped; break;
      case Outcome::Committed: {
        ++m.committed_count;
        const auto commit = t.commit_time.value_or(*t.submit_time);
        if (!last_commit || commit > *last_commit) last_commit = commit;
        latencies.push_back(static_cast<double>(commit - *t.submit_time));
        if (i < timelines.size() && timelines[i].executed && timelines[i].ordered) {
          const auto& tl = timelines[i];
          sum.execute += static_cast<double>(*tl.executed - *t.submit_time);
          sum.order += static_cast<double>(*tl.ordered - *tl.executed);
          sum.validate_commit += static_cast<double>(commit - *tl.ordered);
          ++phased;
        }
        break;
      }
      default: ++m.aborts[t.outcome]; break;
    }
  }
  m.span = (first_submit && last_commit) ? *last_commit - *first_submit : 0;
  m.throughput = m.span > 0 ? static_cast<double>(m.committed_count) * kTicksPerSecond / static_cast<double>(m.span)
                            : 0.0;
  // A lone commit at the submit instant still counts as progress.
  if (m.committed_count > 0 && m.throughput == 0) m.throughput = static_cast<double>(m.committed_count) * kTicksPerSecond;
  if (!latencies.empty()) {
    double total = 0;
    for (double l : latencies) total += l;
    m.latency_mean = total / static_cast<double>(latencies.size());
  } else {
    m.latency_mean = 0;
  }
  m.latency_p50 = percentile(latencies, 0.50);
  m.latency_p95 = percentile(latencies, 0.95);
  m.latency_p99 = percentile(latencies, 0.99);
  if (phased > 0) {
    const auto n = static_cast<double>(phased);
    m.phase_means = {sum.execute / n, sum.order / n, sum.validate_commit / n};
  } else {
    m.phase_means = {};
  }
  m.messages_per_commit =
      m.committed_count == 0 ? 0.0 : static_cast<double>(m.messages) / static_cast<double>(m.committed_count);
}

}  // namespace bcdb
