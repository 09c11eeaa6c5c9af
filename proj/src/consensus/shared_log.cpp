// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/shared_log.hpp"

#include <stdexcept>

namespace bcdb {

namespace {
constexpr std::string_view kAppend = "log_append";
constexpr std::string_view kSequenced = "log_sequenced";
constexpr std::string_view kDeliver = "log_deliver";
}  // namespace

std::uint64_t SharedLog::append(const Proposal& p) {
  entries_.push_back(p);
  return entries_.size();
}

std::vector<Proposal> SharedLog::read(std::uint64_t from_seq) const {
  if (from_seq == 0) from_seq = 1;
  if (from_seq > entries_.size()) return {};
  return {entries_.begin() + static_cast<std::ptrdiff_t>(from_seq - 1), entries_.end()};
}

SharedLogService::SharedLogService(Simulator& sim, NodeId service_node, std::vector<NodeId> consumers,
                                   SharedLogOptions options)
    : sim_(sim), service_(service_node), ids_(std::move(consumers)), options_(options) {
  if (ids_.empty()) throw std::invalid_argument("shared log needs at least one consumer");
  for (auto id : ids_) {
    if (id == service_) throw std::invalid_argument("shared log service cannot also be a consumer");
    consumers_[id];
  }
  channel_ = sim_.add_channel([this](const Event& ev) { on_event(ev); });
}

void SharedLogService::propose(const Proposal& p) {
  if (p.tag == kNoopTag) throw std::invalid_argument("proposal tag 0 is reserved");
  outstanding_[p.tag] = p;
  sim_.schedule(service_, channel_, kAppend, Append{p}, sim_.draw_latency());
}

ReplicaState SharedLogService::state(NodeId node) const {
  const auto& c = consumers_.at(node);
  return ReplicaState{node, 0, Role::Follower, c.log, c.applied};
}

void SharedLogService::on_event(const Event& ev) {
  if (ev.kind == kAppend) {
    const auto& p = std::any_cast<const Append&>(ev.payload).p;
    auto done = sim_.reserve_cpu(service_, options_.service_time);
    sim_.schedule(service_, channel_, kSequenced, Sequenced{p}, done - sim_.now() + options_.internal_delay);
    return;
  }
  if (ev.kind == kSequenced) {
    const auto& p = std::any_cast<const Sequenced&>(ev.payload).p;
    if (!sequenced_tags_.insert(p.tag).second) return;
    const auto seq = log_.append(p);
    for (auto id : ids_) sim_.send(service_, id, channel_, kDeliver, Deliver{seq, p});
    return;
  }
  if (ev.kind == kDeliver) {
    const auto& d = std::any_cast<const Deliver&>(ev.payload);
    auto& c = consumers_.at(ev.target);
    if (d.seq <= c.applied) return;
    c.buffered.emplace(d.seq, d.p);
    for (auto it = c.buffered.begin(); it != c.buffered.end() && it->first == c.applied + 1;
         it = c.buffered.erase(it)) {
      ++c.applied;
      c.log.push_back(LogEntry{it->first, 0, it->second.digest, {it->second}});
      outstanding_.erase(it->second.tag);
      notify_commit(ev.target, it->first, it->second);
    }
  }
}

}  // namespace bcdb
