// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <any>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "bcdb/core/rng.hpp"
#include "bcdb/core/types.hpp"

namespace bcdb {

using EventId = std::uint64_t;
using ChannelId = std::uint32_t;

enum class FaultKind { Healthy, Crashed, ByzantineEquivocate, ByzantineSilent };
std::string_view to_string(FaultKind k);

struct NodeFault {
  NodeId node = 0;
  FaultKind kind = FaultKind::Healthy;
  VirtualTime since = 0;
};

/// Uniform over [min, 2*mean - min].
struct LatencyModel {
  VirtualTime min = 100;
  VirtualTime mean = 250;
  VirtualTime max() const { return 2 * mean - min; }
};

struct Event {
  VirtualTime fire_time = 0;
  std::uint64_t seq = 0;
  NodeId src = 0;
  NodeId target = 0;
  ChannelId channel = 0;
  /// Static label, used for tracing and per-kind counters.
  std::string_view kind;
  /// True for messages that crossed the network (counted as protocol
  /// traffic); false for local timers and client-side deliveries.
  bool network = false;
  bool dropped = false;
  std::any payload;
};

struct TraceRecord {
  VirtualTime time = 0;
  std::uint64_t seq = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::string_view kind;
  bool network = true;  // false for timers
  bool operator==(const TraceRecord&) const = default;
};

/// Kind delivered to every channel when a node heals, so protocols can
/// re-arm timers that were dropped while the node was down.
inline constexpr std::string_view kHealEvent = "heal";

/// Deterministic discrete-event network simulator. Events fire in
/// (fire_time, seq) order; a single instance is single-threaded.
class Simulator {
 public:
  using Handler = std::function<void(const Event&)>;

  struct Options {
    LatencyModel latency;
    bool allow_byzantine = false;
    /// Per-link FIFO delivery (a message never overtakes an earlier one on
    /// the same directed link).
    bool fifo_links = true;
    bool record_trace = false;
  };

  Simulator(std::uint64_t seed, Options options);

  VirtualTime now() const { return now_; }
  const Options& options() const { return options_; }

  /// Adds `count` nodes and returns the id of the first one.
  NodeId add_nodes(std::uint32_t count);
  std::uint32_t node_count() const { return static_cast<std::uint32_t>(faults_.size()); }

  ChannelId add_channel(Handler handler);

  /// Local event at `target` after `delay` (timers, client deliveries).
  EventId schedule(NodeId target, ChannelId channel, std::string_view kind, std::any payload, VirtualTime delay);

  /// Network message with latency drawn from the latency model. Returns
  /// nullopt when the sender is crashed or silent and nothing is enqueued.
  std::optional<EventId> send(NodeId src, NodeId dst, ChannelId channel, std::string_view kind, std::any payload);

  /// Pops the minimal event, advances the clock, and dispatches it unless
  /// the target is crashed or the endpoints are partitioned. Returns
  /// nullopt when the queue is exhausted.
  std::optional<Event> step();

  /// Runs until the queue is empty, `stop` returns true, or the clock would
  /// pass `deadline`.
  void run(VirtualTime deadline, const std::function<bool()>& stop = {});

  bool empty() const { return queue_.empty(); }
  /// Fire time of the next queued event.
  std::optional<VirtualTime> next_time() const;
  std::size_t pending_events() const { return queue_.size(); }

  void inject_fault(NodeId node, FaultKind kind, VirtualTime at_time);
  void heal(NodeId node, VirtualTime at_time);
  FaultKind fault_at(NodeId node, VirtualTime t) const;
  FaultKind fault(NodeId node) const { return fault_at(node, now_); }
  bool crashed(NodeId node) const { return fault(node) == FaultKind::Crashed; }
  /// Crash time of a node, if it is crashed now.
  std::optional<VirtualTime> crashed_since(NodeId node) const;

  /// Nodes in different groups cannot exchange messages; nodes not listed
  /// form their own singleton groups.
  void set_partition(const std::vector<std::vector<NodeId>>& groups);
  void clear_partition();
  bool partitioned(NodeId a, NodeId b) const;

  /// Serial CPU lanes per node. Reserves `duration` after the lane frees up
  /// and returns the completion time.
  VirtualTime reserve_cpu(NodeId node, VirtualTime duration, std::uint32_t lane = 0);
  VirtualTime cpu_free_at(NodeId node, std::uint32_t lane = 0) const;

  VirtualTime draw_latency();
  Rng& rng() { return rng_; }

  std::uint64_t messages_sent() const { return messages_sent_; }
  std::uint64_t messages_sent(ChannelId channel) const;
  std::uint64_t events_dropped() const { return dropped_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  void write_trace(std::ostream& out) const;

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.fire_time != b.fire_time ? a.fire_time > b.fire_time : a.seq > b.seq;
    }
  };

  void push(Event ev);
  void check_node(NodeId node) const;

  Options options_;
  Rng rng_;
  VirtualTime now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::vector<Event> queue_;
  std::vector<Handler> channels_;
  std::vector<std::vector<NodeFault>> faults_;  // per node, ordered by `since`
  std::vector<std::uint32_t> partition_group_;
  bool partition_active_ = false;
  std::map<std::pair<NodeId, NodeId>, VirtualTime> link_tail_;
  std::map<std::pair<NodeId, std::uint32_t>, VirtualTime> cpu_;
  std::vector<std::uint64_t> channel_sent_;
  std::uint64_t messages_sent_ = 0;
  std::uint64_t dropped_ = 0;
  std::vector<TraceRecord> trace_;
};

}  // namespace bcdb
