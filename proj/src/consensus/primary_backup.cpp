// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/primary_backup.hpp"

#include <stdexcept>

namespace bcdb {

namespace {
constexpr std::string_view kClient = "chain_client_request";
constexpr std::string_view kForward = "chain_forward";
constexpr std::string_view kAck = "chain_ack";
constexpr std::string_view kApply = "chain_apply";
}  // namespace

PrimaryBackupChain::PrimaryBackupChain(Simulator& sim, std::vector<NodeId> nodes, VirtualTime message_cost,
                                       std::uint32_t cpu_lane)
    : sim_(sim), ids_(std::move(nodes)), message_cost_(message_cost), cpu_lane_(cpu_lane) {
  if (ids_.empty()) throw std::invalid_argument("primary-backup needs at least one node");
  replicas_.resize(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) position_[ids_[i]] = i;
  channel_ = sim_.add_channel([this](const Event& ev) { on_event(ev); });
}

void PrimaryBackupChain::propose(const Proposal& p) {
  if (p.tag == kNoopTag) throw std::invalid_argument("proposal tag 0 is reserved");
  outstanding_[p.tag] = p;
  sim_.schedule(ids_.front(), channel_, kClient, p, sim_.draw_latency());
}

std::optional<NodeId> PrimaryBackupChain::leader() const {
  if (sim_.crashed(ids_.front())) return std::nullopt;
  return ids_.front();
}

ReplicaState PrimaryBackupChain::state(NodeId node) const {
  const auto pos = position_.at(node);
  const auto& r = replicas_[pos];
  return ReplicaState{node, 0, pos == 0 ? Role::Primary : Role::Backup, r.log,
                      pos == 0 ? r.acked : r.log.size()};
}

void PrimaryBackupChain::apply(std::size_t pos, const LogEntry& e) {
  replicas_[pos].log.push_back(e);
  if (pos + 1 < ids_.size()) {
    sim_.send(ids_[pos], ids_[pos + 1], channel_, kForward, Forward{e});
  } else if (pos > 0) {
    // Reply to the primary; not a replication message.
    sim_.schedule(ids_.front(), channel_, kAck, Ack{e.index}, sim_.draw_latency());
  }
  if (pos > 0) notify_commit(ids_[pos], e.index, e.batch.front());
}

void PrimaryBackupChain::on_event(const Event& ev) {
  const auto pos = position_.at(ev.target);
  if (ev.kind == kClient) {
    const auto& p = std::any_cast<const Proposal&>(ev.payload);
    LogEntry e{replicas_[0].log.size() + 1, 0, p.digest, {p}};
    apply(0, e);
    if (ids_.size() == 1) sim_.schedule(ids_.front(), channel_, kAck, Ack{e.index}, 0);
    return;
  }
  if (ev.kind == kForward) {
    const auto& e = std::any_cast<const Forward&>(ev.payload).entry;
    if (message_cost_ > 0) {
      auto done = sim_.reserve_cpu(ev.target, message_cost_, cpu_lane_);
      sim_.schedule(ev.target, channel_, kApply, Forward{e}, done - sim_.now());
      return;
    }
    apply(pos, e);
    return;
  }
  if (ev.kind == kApply) {
    apply(pos, std::any_cast<const Forward&>(ev.payload).entry);
    return;
  }
  if (ev.kind == kAck) {
    auto& primary = replicas_[0];
    const auto index = std::any_cast<const Ack&>(ev.payload).index;
    while (primary.acked < index) {
      const auto& e = primary.log[primary.acked++];
      ++acknowledged_;
      outstanding_.erase(e.batch.front().tag);
      notify_commit(ids_.front(), e.index, e.batch.front());
    }
  }
}

}  // namespace bcdb
