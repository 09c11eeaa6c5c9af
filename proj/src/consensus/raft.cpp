// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/raft.hpp"

#include <algorithm>

#include "bcdb/consensus/quorum.hpp"

namespace bcdb {

struct RaftGroup::Deferred {
  NodeId src;
  std::string_view kind;
  std::any payload;
};

namespace {
constexpr std::string_view kVote = "raft_request_vote";
constexpr std::string_view kVoteReply = "raft_vote_reply";
constexpr std::string_view kAppend = "raft_append";
constexpr std::string_view kAppendReply = "raft_append_reply";
constexpr std::string_view kTimer = "raft_timer";
constexpr std::string_view kClient = "raft_client_request";
constexpr std::string_view kDeferred = "raft_deferred";
}  // namespace

RaftOptions RaftOptions::for_latency(const LatencyModel& latency) {
  RaftOptions o;
  const auto mean = std::max<VirtualTime>(latency.mean, 1);
  o.election_min = 10 * mean;
  o.election_max = 20 * mean;
  o.heartbeat = 4 * mean;
  return o;
}

RaftGroup::RaftGroup(Simulator& sim, std::vector<NodeId> nodes, RaftOptions options)
    : sim_(sim), options_(options), ids_(std::move(nodes)) {
  if (ids_.empty()) throw std::invalid_argument("raft group needs at least one node");
  quorum_ = protocol_quorum(static_cast<std::uint32_t>(ids_.size()), FailureModel::CFT);
  for (auto id : ids_) {
    index_of_[id] = replicas_.size();
    Node n;
    n.id = id;
    replicas_.push_back(std::move(n));
  }
  channel_ = sim_.add_channel([this](const Event& ev) { on_event(ev); });
}

RaftGroup::Node& RaftGroup::node_at(NodeId id) { return replicas_.at(index_of_.at(id)); }
const RaftGroup::Node& RaftGroup::node_at(NodeId id) const { return replicas_.at(index_of_.at(id)); }

void RaftGroup::start() {
  for (auto& n : replicas_) arm_election(n);
}

void RaftGroup::propose(const Proposal& p) {
  outstanding_[p.tag] = p;
  route_to_leader(p);
}

void RaftGroup::route_to_leader(const Proposal& p) {
  if (auto l = leader()) sim_.schedule(*l, channel_, kClient, p, sim_.draw_latency());
}

std::optional<NodeId> RaftGroup::leader() const {
  const Node* best = nullptr;
  for (const auto& n : replicas_) {
    if (n.role != Role::Leader || sim_.crashed(n.id)) continue;
    if (best == nullptr || n.term > best->term) best = &n;
  }
  if (best == nullptr) return std::nullopt;
  return best->id;
}

ReplicaState RaftGroup::state(NodeId node) const {
  const auto& n = node_at(node);
  return ReplicaState{n.id, n.term, n.role, n.log, n.commit};
}

void RaftGroup::on_event(const Event& ev) {
  auto it = index_of_.find(ev.target);
  if (it == index_of_.end()) return;
  Node& node = replicas_[it->second];
  if (ev.network && options_.message_cost > 0) {
    auto done = sim_.reserve_cpu(node.id, options_.message_cost, options_.cpu_lane);
    sim_.schedule(node.id, channel_, kDeferred, Deferred{ev.src, ev.kind, ev.payload}, done - sim_.now());
    return;
  }
  dispatch(node, ev);
}

void RaftGroup::dispatch(Node& node, const Event& ev) {
  if (ev.kind == kDeferred) {
    const auto& d = std::any_cast<const Deferred&>(ev.payload);
    Event inner;
    inner.src = d.src;
    inner.target = node.id;
    inner.kind = d.kind;
    inner.payload = d.payload;
    dispatch(node, inner);
    return;
  }
  if (ev.kind == kHealEvent) {
    arm_election(node);
    if (node.role == Role::Leader) arm_heartbeat(node);
    return;
  }
  if (ev.kind == kTimer) {
    const auto& t = std::any_cast<const Timer&>(ev.payload);
    if (t.election) {
      if (t.generation == node.election_gen && node.role != Role::Leader) start_election(node);
    } else if (t.generation == node.heartbeat_gen && node.role == Role::Leader) {
      for (auto peer : ids_) {
        if (peer == node.id) continue;
        if (sim_.now() - node.last_sent[peer] >= options_.heartbeat) send_append(node, peer, true);
      }
      arm_heartbeat(node);
    }
    return;
  }
  if (ev.kind == kClient) {
    const auto& p = std::any_cast<const Proposal&>(ev.payload);
    if (!outstanding_.contains(p.tag)) return;
    if (node.role == Role::Leader) {
      leader_append(node, p);
    } else {
      route_to_leader(p);
    }
    return;
  }
  if (ev.kind == kVote) return handle(node, ev.src, std::any_cast<const RequestVote&>(ev.payload));
  if (ev.kind == kVoteReply) return handle(node, ev.src, std::any_cast<const VoteReply&>(ev.payload));
  if (ev.kind == kAppend) return handle(node, ev.src, std::any_cast<const Append&>(ev.payload));
  if (ev.kind == kAppendReply) return handle(node, ev.src, std::any_cast<const AppendReply&>(ev.payload));
}

void RaftGroup::arm_election(Node& node) {
  ++node.election_gen;
  auto timeout = sim_.rng().uniform(options_.election_min, options_.election_max);
  sim_.schedule(node.id, channel_, kTimer, Timer{node.election_gen, true}, timeout);
}

void RaftGroup::arm_heartbeat(Node& node) {
  ++node.heartbeat_gen;
  sim_.schedule(node.id, channel_, kTimer, Timer{node.heartbeat_gen, false}, options_.heartbeat);
}

void RaftGroup::start_election(Node& node) {
  node.term += 1;
  node.role = Role::Candidate;
  node.voted_for = node.id;
  node.votes = {node.id};
  arm_election(node);
  if (node.votes.size() >= quorum_) {
    become_leader(node);
    return;
  }
  RequestVote rv{node.term, node.last_index(), node.term_at(node.last_index())};
  for (auto peer : ids_) {
    if (peer != node.id) sim_.send(node.id, peer, channel_, kVote, rv);
  }
}

void RaftGroup::become_leader(Node& node) {
  node.role = Role::Leader;
  ++leaders_elected_;
  ++node.election_gen;  // cancels the pending election timer
  for (auto peer : ids_) {
    if (peer == node.id) continue;
    node.next[peer] = node.last_index() + 1;
    node.match[peer] = 0;
    node.last_sent[peer] = sim_.now();
  }
  // A no-op from the new term lets earlier-term entries commit.
  LogEntry noop;
  noop.index = node.last_index() + 1;
  noop.term = node.term;
  noop.digest = batch_digest({});
  node.log.push_back(noop);
  // Clients whose requests were lost with the old leader retry here.
  for (const auto& [tag, p] : outstanding_) {
    if (!node.tag_index.contains(tag) && !node.applied_tags.contains(tag)) {
      LogEntry e;
      e.index = node.last_index() + 1;
      e.term = node.term;
      e.digest = p.digest;
      e.batch = {p};
      node.tag_index[tag] = e.index;
      node.log.push_back(std::move(e));
    }
  }
  broadcast_append(node);
  advance_commit(node);
  arm_heartbeat(node);
}

void RaftGroup::step_down(Node& node, std::uint64_t term) {
  const bool was_leader = node.role == Role::Leader;
  if (term > node.term) {
    node.term = term;
    node.voted_for.reset();
  }
  node.role = Role::Follower;
  node.votes.clear();
  if (was_leader) {
    ++node.heartbeat_gen;
    arm_election(node);
  }
}

void RaftGroup::leader_append(Node& node, const Proposal& p) {
  if (node.tag_index.contains(p.tag) || node.applied_tags.contains(p.tag)) return;
  LogEntry e;
  e.index = node.last_index() + 1;
  e.term = node.term;
  e.digest = p.digest;
  e.batch = {p};
  node.tag_index[p.tag] = e.index;
  node.log.push_back(std::move(e));
  broadcast_append(node);
  advance_commit(node);
}

void RaftGroup::broadcast_append(Node& leader) {
  for (auto peer : ids_) {
    if (peer != leader.id) send_append(leader, peer, false);
  }
}

void RaftGroup::send_append(Node& leader, NodeId follower, bool force_empty) {
  auto& next = leader.next[follower];
  next = std::clamp<std::uint64_t>(next, 1, leader.last_index() + 1);
  Append m;
  m.term = leader.term;
  m.prev_index = next - 1;
  m.prev_term = leader.term_at(m.prev_index);
  m.leader_commit = leader.commit;
  if (!force_empty) {
    auto end = std::min<std::uint64_t>(leader.last_index(), m.prev_index + options_.max_entries_per_append);
    for (auto i = next; i <= end; ++i) m.entries.push_back(leader.log[i - 1]);
    if (m.entries.empty() && next <= leader.last_index()) return;
    next = end + 1;
  }
  leader.last_sent[follower] = sim_.now();
  sim_.send(leader.id, follower, channel_, kAppend, std::move(m));
}

void RaftGroup::advance_commit(Node& leader) {
  auto new_commit = leader.commit;
  for (auto idx = leader.last_index(); idx > leader.commit; --idx) {
    if (leader.term_at(idx) != leader.term) break;
    std::uint32_t acks = 1;
    for (const auto& [peer, m] : leader.match) acks += m >= idx ? 1 : 0;
    if (acks >= quorum_) {
      new_commit = idx;
      break;
    }
  }
  if (new_commit == leader.commit) return;
  leader.commit = new_commit;
  apply(leader);
  // Followers learn the new commit index right away.
  for (auto peer : ids_) {
    if (peer != leader.id) send_append(leader, peer, true);
  }
}

void RaftGroup::apply(Node& node) {
  while (node.applied < node.commit) {
    ++node.applied;
    const auto& e = node.log[node.applied - 1];
    for (const auto& p : e.batch) {
      if (p.tag == kNoopTag || !node.applied_tags.insert(p.tag).second) continue;
      outstanding_.erase(p.tag);
      notify_commit(node.id, e.index, p);
    }
  }
}

void RaftGroup::truncate(Node& node, std::uint64_t from_index) {
  if (from_index <= node.commit) throw std::logic_error("raft: committed entry would be overwritten");
  for (auto i = from_index; i <= node.last_index(); ++i) {
    for (const auto& p : node.log[i - 1].batch) {
      auto it = node.tag_index.find(p.tag);
      if (it != node.tag_index.end() && it->second == i) node.tag_index.erase(it);
    }
  }
  node.log.resize(from_index - 1);
}

void RaftGroup::handle(Node& node, NodeId src, const RequestVote& m) {
  if (m.term > node.term) step_down(node, m.term);
  bool granted = false;
  if (m.term == node.term && (!node.voted_for || *node.voted_for == src)) {
    const auto my_last_term = node.term_at(node.last_index());
    const bool up_to_date =
        m.last_term > my_last_term || (m.last_term == my_last_term && m.last_index >= node.last_index());
    if (up_to_date) {
      granted = true;
      node.voted_for = src;
      arm_election(node);
    }
  }
  sim_.send(node.id, src, channel_, kVoteReply, VoteReply{node.term, granted});
}

void RaftGroup::handle(Node& node, NodeId src, const VoteReply& m) {
  if (m.term > node.term) {
    step_down(node, m.term);
    return;
  }
  if (node.role != Role::Candidate || m.term != node.term || !m.granted) return;
  node.votes.insert(src);
  if (node.votes.size() >= quorum_) become_leader(node);
}

void RaftGroup::handle(Node& node, NodeId src, const Append& m) {
  if (m.term < node.term) {
    sim_.send(node.id, src, channel_, kAppendReply, AppendReply{node.term, false, 0});
    return;
  }
  if (m.term > node.term || node.role != Role::Follower) step_down(node, m.term);
  arm_election(node);

  if (m.prev_index > node.last_index() || node.term_at(m.prev_index) != m.prev_term) {
    auto hint = std::min(node.last_index(), m.prev_index > 0 ? m.prev_index - 1 : 0);
    sim_.send(node.id, src, channel_, kAppendReply, AppendReply{node.term, false, hint});
    return;
  }
  auto index = m.prev_index;
  for (const auto& e : m.entries) {
    ++index;
    if (index <= node.last_index()) {
      if (node.term_at(index) == e.term) continue;
      truncate(node, index);
    }
    for (const auto& p : e.batch) node.tag_index[p.tag] = index;
    node.log.push_back(e);
  }
  const auto match = m.prev_index + m.entries.size();
  if (m.leader_commit > node.commit) {
    node.commit = std::max(node.commit, std::min<std::uint64_t>(m.leader_commit, match));
    apply(node);
  }
  // Bare commit notifications need no reply.
  if (!m.entries.empty()) {
    sim_.send(node.id, src, channel_, kAppendReply, AppendReply{node.term, true, match});
  }
}

void RaftGroup::handle(Node& node, NodeId src, const AppendReply& m) {
  if (m.term > node.term) {
    step_down(node, m.term);
    return;
  }
  if (node.role != Role::Leader || m.term != node.term) return;
  if (m.success) {
    if (m.match_index > node.match[src]) {
      node.match[src] = m.match_index;
      node.next[src] = std::max(node.next[src], m.match_index + 1);
      advance_commit(node);
    }
  } else {
    node.next[src] = std::max(node.match[src], m.match_index) + 1;
    send_append(node, src, false);
  }
}

}  // namespace bcdb
