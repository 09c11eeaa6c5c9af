// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>

#include "bcdb/consensus/replicator.hpp"

namespace bcdb {

/// A randomized fault schedule for one consensus group.
struct SafetySchedule {
  FailureModel model = FailureModel::CFT;
  std::uint32_t n = 5;
  /// Crashes are drawn in [0, max_crashes]; some crashed nodes heal later.
  std::uint32_t max_crashes = 0;
  std::uint32_t equivocators = 0;
  std::uint32_t silent = 0;
  /// Adds a transient partition that isolates a random minority.
  bool partition = false;
  std::uint32_t proposals = 20;
  VirtualTime horizon = 400'000;
};

struct SafetyResult {
  bool divergent = false;
  std::string detail;
  std::set<NodeId> byzantine;
  std::uint64_t committed = 0;  // distinct proposals committed somewhere
  std::uint64_t view_changes = 0;
};

/// Compares committed prefixes pairwise (entry digest per index) across
/// every node outside `exclude`. Returns a description of the first
/// disagreement found.
std::optional<std::string> find_divergence(const Replicator& group, const std::set<NodeId>& exclude);

/// Builds a group, applies the schedule drawn from `seed`, and checks that
/// no two nodes outside the Byzantine set commit different entries at any
/// index or apply proposals in different orders.
SafetyResult run_safety_schedule(const SafetySchedule& schedule, std::uint64_t seed);

}  // namespace bcdb
