// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/simnet/simulator.hpp"

#include <algorithm>
#include <ostream>

namespace bcdb {

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::Healthy: return "healthy";
    case FaultKind::Crashed: return "crashed";
    case FaultKind::ByzantineEquivocate: return "byzantine_equivocate";
    case FaultKind::ByzantineSilent: return "byzantine_silent";
  }
  return "?";
}

Simulator::Simulator(std::uint64_t seed, Options options)
    : options_(options), rng_(Rng::derive(seed, "net")) {
  if (options_.latency.min < 0 || options_.latency.mean < options_.latency.min) {
    throw std::invalid_argument("latency model requires 0 <= min <= mean");
  }
}

NodeId Simulator::add_nodes(std::uint32_t count) {
  auto first = static_cast<NodeId>(faults_.size());
  for (std::uint32_t i = 0; i < count; ++i) {
    faults_.emplace_back();
    partition_group_.push_back(0);
  }
  return first;
}

ChannelId Simulator::add_channel(Handler handler) {
  channels_.push_back(std::move(handler));
  channel_sent_.push_back(0);
  return static_cast<ChannelId>(channels_.size() - 1);
}

void Simulator::check_node(NodeId node) const {
  if (node >= faults_.size()) throw std::out_of_range("unknown node " + std::to_string(node));
}

void Simulator::push(Event ev) {
  ev.seq = next_seq_++;
  queue_.push_back(std::move(ev));
  std::push_heap(queue_.begin(), queue_.end(), Later{});
}

EventId Simulator::schedule(NodeId target, ChannelId channel, std::string_view kind, std::any payload,
                            VirtualTime delay) {
  if (delay < 0) throw std::invalid_argument("negative delay");
  check_node(target);
  Event ev;
  ev.fire_time = now_ + delay;
  ev.src = target;
  ev.target = target;
  ev.channel = channel;
  ev.kind = kind;
  ev.payload = std::move(payload);
  push(std::move(ev));
  return next_seq_ - 1;
}

std::optional<EventId> Simulator::send(NodeId src, NodeId dst, ChannelId channel, std::string_view kind,
                                       std::any payload) {
  check_node(src);
  check_node(dst);
  auto f = fault(src);
  if (f == FaultKind::Crashed || f == FaultKind::ByzantineSilent) return std::nullopt;
  VirtualTime at = now_ + draw_latency();
  if (options_.fifo_links) {
    auto& tail = link_tail_[{src, dst}];
    at = std::max(at, tail);
    tail = at;
  }
  Event ev;
  ev.fire_time = at;
  ev.src = src;
  ev.target = dst;
  ev.channel = channel;
  ev.kind = kind;
  ev.network = true;
  ev.payload = std::move(payload);
  push(std::move(ev));
  ++messages_sent_;
  ++channel_sent_.at(channel);
  return next_seq_ - 1;
}

std::optional<Event> Simulator::step() {
  if (queue_.empty()) return std::nullopt;
  std::pop_heap(queue_.begin(), queue_.end(), Later{});
  Event ev = std::move(queue_.back());
  queue_.pop_back();
  now_ = ev.fire_time;

  const auto target_fault = fault_at(ev.target, now_);
  if (target_fault == FaultKind::Crashed) {
    ev.dropped = true;
  } else if (ev.network && (fault_at(ev.src, now_) == FaultKind::Crashed || partitioned(ev.src, ev.target))) {
    ev.dropped = true;
  }
  if (ev.dropped) {
    ++dropped_;
    return ev;
  }
  if (options_.record_trace) trace_.push_back({ev.fire_time, ev.seq, ev.src, ev.target, ev.kind, ev.network});
  const auto& handler = channels_.at(ev.channel);
  if (handler) handler(ev);
  return ev;
}

std::optional<VirtualTime> Simulator::next_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.front().fire_time;
}

void Simulator::run(VirtualTime deadline, const std::function<bool()>& stop) {
  while (!queue_.empty()) {
    if (queue_.front().fire_time > deadline) return;
    step();
    if (stop && stop()) return;
  }
}

void Simulator::inject_fault(NodeId node, FaultKind kind, VirtualTime at_time) {
  check_node(node);
  if (at_time < now_) throw std::invalid_argument("fault time in the past");
  if ((kind == FaultKind::ByzantineEquivocate || kind == FaultKind::ByzantineSilent) && !options_.allow_byzantine) {
    throw std::invalid_argument("Byzantine faults require a BFT experiment");
  }
  auto& list = faults_[node];
  auto it = std::upper_bound(list.begin(), list.end(), at_time,
                             [](VirtualTime t, const NodeFault& f) { return t < f.since; });
  list.insert(it, NodeFault{node, kind, at_time});
}

void Simulator::heal(NodeId node, VirtualTime at_time) {
  inject_fault(node, FaultKind::Healthy, at_time);
  for (ChannelId c = 0; c < channels_.size(); ++c) {
    schedule(node, c, kHealEvent, {}, at_time - now_);
  }
}

FaultKind Simulator::fault_at(NodeId node, VirtualTime t) const {
  const auto& list = faults_.at(node);
  FaultKind kind = FaultKind::Healthy;
  for (const auto& f : list) {
    if (f.since > t) break;
    kind = f.kind;
  }
  return kind;
}

std::optional<VirtualTime> Simulator::crashed_since(NodeId node) const {
  const auto& list = faults_.at(node);
  std::optional<VirtualTime> since;
  for (const auto& f : list) {
    if (f.since > now_) break;
    if (f.kind == FaultKind::Crashed) {
      if (!since) since = f.since;
    } else {
      since.reset();
    }
  }
  return since;
}

void Simulator::set_partition(const std::vector<std::vector<NodeId>>& groups) {
  // Group 0 is never assigned, so unlisted nodes get unique singleton ids.
  std::uint32_t next = static_cast<std::uint32_t>(groups.size()) + 1;
  for (auto& g : partition_group_) g = next++;
  for (std::uint32_t i = 0; i < groups.size(); ++i) {
    for (auto n : groups[i]) {
      check_node(n);
      partition_group_[n] = i + 1;
    }
  }
  partition_active_ = true;
}

void Simulator::clear_partition() {
  std::fill(partition_group_.begin(), partition_group_.end(), 0);
  partition_active_ = false;
}

bool Simulator::partitioned(NodeId a, NodeId b) const {
  return partition_active_ && partition_group_.at(a) != partition_group_.at(b);
}

VirtualTime Simulator::reserve_cpu(NodeId node, VirtualTime duration, std::uint32_t lane) {
  auto& free_at = cpu_[{node, lane}];
  free_at = std::max(free_at, now_) + duration;
  return free_at;
}

VirtualTime Simulator::cpu_free_at(NodeId node, std::uint32_t lane) const {
  auto it = cpu_.find({node, lane});
  return it == cpu_.end() ? now_ : std::max(now_, it->second);
}

VirtualTime Simulator::draw_latency() {
  return rng_.uniform(options_.latency.min, options_.latency.max());
}

std::uint64_t Simulator::messages_sent(ChannelId channel) const { return channel_sent_.at(channel); }

void Simulator::write_trace(std::ostream& out) const {
  for (const auto& r : trace_) {
    out << r.time << '\t' << r.seq << '\t' << r.src << '\t' << r.dst << '\t' << r.kind << '\n';
  }
}

}  // namespace bcdb
