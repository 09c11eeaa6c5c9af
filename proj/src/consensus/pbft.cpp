// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/pbft.hpp"

#include <algorithm>
#include <stdexcept>

#include "bcdb/consensus/quorum.hpp"
#include "bcdb/core/digest.hpp"
#include "bcdb/core/encoding.hpp"

namespace bcdb {

namespace {
constexpr std::string_view kClient = "pbft_client_request";
constexpr std::string_view kTimer = "pbft_timer";
constexpr std::string_view kDeferred = "pbft_deferred";

bool batch_matches(const BatchPtr& batch, const Digest& d) { return batch && batch_digest(*batch) == d; }

// The conflicting value an equivocating replica shows to half its peers:
// the same requests plus a no-op, so it carries a different digest.
BatchPtr conflicting_batch(const BatchPtr& batch, std::uint64_t seq) {
  auto alt = std::make_shared<Batch>(batch ? *batch : Batch{});
  Encoder e;
  e.put_string("equivocate");
  e.put_u64(seq);
  alt->push_back(Proposal{kNoopTag, digest(e.bytes())});
  return alt;
}
}  // namespace

std::string_view to_string(PbftMessage::Type t) {
  switch (t) {
    case PbftMessage::Type::PrePrepare: return "pbft_pre_prepare";
    case PbftMessage::Type::Prepare: return "pbft_prepare";
    case PbftMessage::Type::Commit: return "pbft_commit";
    case PbftMessage::Type::ViewChange: return "pbft_view_change";
    case PbftMessage::Type::NewView: return "pbft_new_view";
  }
  return "pbft_unknown";
}

PbftReplica::PbftReplica(NodeId id, std::vector<NodeId> members, std::uint32_t quorum, Behavior behavior,
                         std::uint32_t window, std::uint32_t max_batch)
    : id_(id),
      members_(std::move(members)),
      quorum_(quorum),
      f_(max_tolerated_failures(static_cast<std::uint32_t>(members_.size()), FailureModel::BFT)),
      behavior_(behavior),
      window_(std::max<std::uint32_t>(window, 1)),
      max_batch_(std::max<std::uint32_t>(max_batch, 1)) {
  if (members_.empty()) throw std::invalid_argument("pbft needs at least one replica");
  if (std::find(members_.begin(), members_.end(), id_) == members_.end()) {
    throw std::invalid_argument("pbft replica is not a member of its group");
  }
  if (quorum_ == 0 || quorum_ > members_.size()) throw std::invalid_argument("pbft quorum out of range");
}

void PbftReplica::broadcast(const PbftMessage& m, std::vector<PbftOutgoing>& out) const {
  std::vector<NodeId> peers;
  for (auto n : members_) {
    if (n != id_) peers.push_back(n);
  }
  const bool split = behavior_ == Behavior::Equivocate &&
                     (m.type == PbftMessage::Type::PrePrepare || m.type == PbftMessage::Type::Prepare ||
                      m.type == PbftMessage::Type::Commit);
  if (!split) {
    for (auto n : peers) out.push_back({n, m});
    return;
  }
  PbftMessage alt = m;
  if (m.type == PbftMessage::Type::Prepare) {
    alt.digest[0] ^= 0xff;
  } else {
    alt.batch = conflicting_batch(m.batch, m.seq);
    alt.digest = batch_digest(*alt.batch);
  }
  const auto half = peers.size() / 2;
  for (std::size_t i = 0; i < peers.size(); ++i) out.push_back({peers[i], i < half ? m : alt});
}

std::vector<PbftOutgoing> PbftReplica::on_request(const Proposal& p) {
  std::vector<PbftOutgoing> out;
  if (p.tag == kNoopTag || executed_tags_.contains(p.tag) || pending_.contains(p.tag)) return out;
  pending_[p.tag] = p;
  if (primary_of(view_) == id_ && !in_view_change_) {
    queue_.push_back(p.tag);
    try_propose(out);
  }
  return out;
}

void PbftReplica::try_propose(std::vector<PbftOutgoing>& out) {
  if (primary_of(view_) != id_ || in_view_change_) return;
  while (!queue_.empty() && next_seq_ - last_executed_ < window_) {
    auto batch = std::make_shared<Batch>();
    while (!queue_.empty() && batch->size() < max_batch_) {
      auto tag = queue_.front();
      queue_.pop_front();
      auto it = pending_.find(tag);
      if (it == pending_.end() || proposed_.contains(tag)) continue;
      proposed_.insert(tag);
      batch->push_back(it->second);
    }
    if (batch->empty()) break;
    const auto seq = ++next_seq_;
    const auto d = batch_digest(*batch);
    auto& s = slot(view_, seq);
    s.pre_prepared = d;
    s.batch = batch;
    PbftMessage m;
    m.type = PbftMessage::Type::PrePrepare;
    m.view = view_;
    m.seq = seq;
    m.digest = d;
    m.from = id_;
    m.batch = batch;
    broadcast(m, out);
    check_prepared(view_, seq, out);
  }
}

std::vector<PbftOutgoing> PbftReplica::on_message(const PbftMessage& m) {
  std::vector<PbftOutgoing> out;
  if (m.from == id_) return out;
  switch (m.type) {
    case PbftMessage::Type::PrePrepare: on_pre_prepare(m, out); break;
    case PbftMessage::Type::Prepare: on_prepare(m, out); break;
    case PbftMessage::Type::Commit: on_commit(m, out); break;
    case PbftMessage::Type::ViewChange: on_view_change(m, out); break;
    case PbftMessage::Type::NewView: on_new_view(m, out); break;
  }
  return out;
}

void PbftReplica::on_pre_prepare(const PbftMessage& m, std::vector<PbftOutgoing>& out) {
  if (m.from != primary_of(m.view) || m.view < view_ || !batch_matches(m.batch, m.digest)) return;
  if (committed_.contains(m.seq) && !slots_.contains({m.view, m.seq})) return;
  accept_pre_prepare(m.view, m.seq, m.digest, m.batch, out);
}

void PbftReplica::accept_pre_prepare(std::uint64_t view, std::uint64_t seq, const Digest& d, BatchPtr batch,
                                     std::vector<PbftOutgoing>& out) {
  auto& s = slot(view, seq);
  if (s.pre_prepared && *s.pre_prepared != d) return;
  s.pre_prepared = d;
  s.batch = std::move(batch);
  for (const auto& p : *s.batch) {
    if (p.tag != kNoopTag && !executed_tags_.contains(p.tag)) pending_.emplace(p.tag, p);
  }
  if (view == view_ && !in_view_change_) {
    send_prepare(view, seq, out);
    check_prepared(view, seq, out);
  }
}

void PbftReplica::send_prepare(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out) {
  auto& s = slot(view, seq);
  if (s.prepare_sent || !s.pre_prepared || primary_of(view) == id_) return;
  s.prepare_sent = true;
  s.prepares[*s.pre_prepared].insert(id_);
  PbftMessage m;
  m.type = PbftMessage::Type::Prepare;
  m.view = view;
  m.seq = seq;
  m.digest = *s.pre_prepared;
  m.from = id_;
  broadcast(m, out);
}

void PbftReplica::on_prepare(const PbftMessage& m, std::vector<PbftOutgoing>& out) {
  if (m.from == primary_of(m.view) || m.view < view_) return;
  if (committed_.contains(m.seq) && !slots_.contains({m.view, m.seq})) return;
  slot(m.view, m.seq).prepares[m.digest].insert(m.from);
  if (m.view == view_ && !in_view_change_) check_prepared(m.view, m.seq, out);
}

void PbftReplica::check_prepared(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out) {
  auto& s = slot(view, seq);
  if (s.prepared || !s.pre_prepared) return;
  auto it = s.prepares.find(*s.pre_prepared);
  const std::size_t have = it == s.prepares.end() ? 0 : it->second.size();
  if (have + 1 < quorum_) return;
  s.prepared = true;
  auto& cert = prepared_certs_[seq];
  if (!cert.batch || cert.view <= view) cert = PreparedCert{seq, view, *s.pre_prepared, s.batch};
  s.commits[*s.pre_prepared].insert(id_);
  s.commit_batches[*s.pre_prepared] = s.batch;
  PbftMessage m;
  m.type = PbftMessage::Type::Commit;
  m.view = view;
  m.seq = seq;
  m.digest = *s.pre_prepared;
  m.from = id_;
  m.batch = s.batch;
  broadcast(m, out);
  check_committed(view, seq, out);
}

void PbftReplica::on_commit(const PbftMessage& m, std::vector<PbftOutgoing>& out) {
  if (!batch_matches(m.batch, m.digest)) return;
  if (committed_.contains(m.seq) && !slots_.contains({m.view, m.seq})) return;
  auto& s = slot(m.view, m.seq);
  s.commits[m.digest].insert(m.from);
  s.commit_batches.emplace(m.digest, m.batch);
  for (const auto& p : *m.batch) {
    if (p.tag != kNoopTag && !executed_tags_.contains(p.tag)) pending_.emplace(p.tag, p);
  }
  check_committed(m.view, m.seq, out);
}

void PbftReplica::check_committed(std::uint64_t view, std::uint64_t seq, std::vector<PbftOutgoing>& out) {
  auto& s = slot(view, seq);
  for (const auto& [d, voters] : s.commits) {
    if (voters.size() < quorum_) continue;
    auto existing = committed_.find(seq);
    if (existing != committed_.end()) {
      if (existing->second.digest != d) conflicting_commit_ = true;
      return;
    }
    const auto& batch = s.commit_batches.at(d);
    committed_[seq] = CommittedSlot{d, batch, view};
    auto& cert = prepared_certs_[seq];
    if (!cert.batch || cert.view <= view) cert = PreparedCert{seq, view, d, batch};
    execute(out);
    return;
  }
}

void PbftReplica::execute(std::vector<PbftOutgoing>& out) {
  bool progressed = false;
  for (auto it = committed_.find(last_executed_ + 1); it != committed_.end();
       it = committed_.find(last_executed_ + 1)) {
    ++last_executed_;
    progressed = true;
    for (const auto& p : *it->second.batch) {
      if (p.tag == kNoopTag || !executed_tags_.insert(p.tag).second) continue;
      pending_.erase(p.tag);
      proposed_.erase(p.tag);
      executed_out_.push_back({last_executed_, p});
    }
    if (!in_view_change_) slots_.erase({view_, last_executed_});
  }
  if (progressed) try_propose(out);
}

std::vector<PbftExecuted> PbftReplica::take_executed() {
  std::vector<PbftExecuted> out;
  out.swap(executed_out_);
  return out;
}

std::vector<PbftOutgoing> PbftReplica::on_timeout() {
  std::vector<PbftOutgoing> out;
  start_view_change(in_view_change_ ? view_change_target_ + 1 : view_ + 1, out);
  return out;
}

void PbftReplica::start_view_change(std::uint64_t target, std::vector<PbftOutgoing>& out) {
  if (target <= view_ || (in_view_change_ && target <= view_change_target_)) return;
  in_view_change_ = true;
  view_change_target_ = target;
  ViewChangeVote vote;
  vote.new_view = target;
  vote.from = id_;
  for (const auto& [seq, cert] : prepared_certs_) vote.prepared.push_back(cert);
  view_changes_[target][id_] = vote;
  // A Byzantine replica sits out view changes rather than help its
  // successor form a quorum.
  if (behavior_ == Behavior::Honest) {
    PbftMessage m;
    m.type = PbftMessage::Type::ViewChange;
    m.view = target;
    m.from = id_;
    m.view_change = std::make_shared<const ViewChangeVote>(std::move(vote));
    broadcast(m, out);
  }
  maybe_send_new_view(target, out);
}

void PbftReplica::on_view_change(const PbftMessage& m, std::vector<PbftOutgoing>& out) {
  if (!m.view_change || m.view_change->from != m.from || m.view_change->new_view != m.view) return;
  if (m.view <= view_) return;
  auto& votes = view_changes_[m.view];
  votes.emplace(m.from, *m.view_change);
  // f+1 replicas asking for a view means at least one correct one timed out.
  if (votes.size() >= f_ + 1 && (!in_view_change_ || view_change_target_ < m.view)) {
    start_view_change(m.view, out);
  }
  maybe_send_new_view(m.view, out);
}

void PbftReplica::maybe_send_new_view(std::uint64_t target, std::vector<PbftOutgoing>& out) {
  if (primary_of(target) != id_ || behavior_ != Behavior::Honest) return;
  if (!in_view_change_ || view_change_target_ != target || new_view_sent_.contains(target)) return;
  const auto& votes = view_changes_[target];
  if (votes.size() < quorum_) return;
  new_view_sent_.insert(target);
  auto proofs = std::make_shared<std::vector<ViewChangeVote>>();
  for (const auto& [from, vote] : votes) proofs->push_back(vote);
  auto assignments = std::make_shared<const std::vector<SlotAssignment>>(compute_assignments(*proofs));
  PbftMessage m;
  m.type = PbftMessage::Type::NewView;
  m.view = target;
  m.from = id_;
  m.proofs = proofs;
  m.assignments = assignments;
  broadcast(m, out);
  enter_view(target, *assignments, out);
}

std::vector<SlotAssignment> PbftReplica::compute_assignments(const std::vector<ViewChangeVote>& votes) const {
  std::map<std::uint64_t, const PreparedCert*> best;
  for (const auto& v : votes) {
    for (const auto& c : v.prepared) {
      auto& b = best[c.seq];
      if (b == nullptr || c.view > b->view) b = &c;
    }
  }
  std::vector<SlotAssignment> out;
  const std::uint64_t max_seq = best.empty() ? 0 : best.rbegin()->first;
  static const BatchPtr kNull = std::make_shared<const Batch>();
  for (std::uint64_t seq = 1; seq <= max_seq; ++seq) {
    auto it = best.find(seq);
    if (it == best.end()) {
      out.push_back({seq, batch_digest(*kNull), kNull});
    } else {
      out.push_back({seq, it->second->digest, it->second->batch});
    }
  }
  return out;
}

void PbftReplica::on_new_view(const PbftMessage& m, std::vector<PbftOutgoing>& out) {
  if (m.from != primary_of(m.view) || !m.proofs || !m.assignments) return;
  if (m.view < view_ || (m.view == view_ && !in_view_change_)) return;
  std::set<NodeId> senders;
  for (const auto& v : *m.proofs) {
    if (v.new_view != m.view) return;
    senders.insert(v.from);
  }
  if (senders.size() < quorum_ || senders.size() != m.proofs->size()) return;
  const auto expected = compute_assignments(*m.proofs);
  if (expected.size() != m.assignments->size()) return;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& a = (*m.assignments)[i];
    if (a.seq != expected[i].seq || a.digest != expected[i].digest || !batch_matches(a.batch, a.digest)) return;
  }
  enter_view(m.view, *m.assignments, out);
}

void PbftReplica::enter_view(std::uint64_t view, const std::vector<SlotAssignment>& assignments,
                             std::vector<PbftOutgoing>& out) {
  view_ = view;
  in_view_change_ = false;
  view_change_target_ = view;
  proposed_.clear();
  queue_.clear();
  for (auto it = view_changes_.begin(); it != view_changes_.end() && it->first <= view;) {
    it = view_changes_.erase(it);
  }
  for (auto it = slots_.begin(); it != slots_.end() && it->first.first < view;) it = slots_.erase(it);

  std::uint64_t max_seq = last_executed_;
  for (const auto& a : assignments) {
    max_seq = std::max(max_seq, a.seq);
    auto& s = slot(view, a.seq);
    if (!s.pre_prepared) {
      s.pre_prepared = a.digest;
      s.batch = a.batch;
    }
    for (const auto& p : *a.batch) {
      if (p.tag == kNoopTag) continue;
      proposed_.insert(p.tag);
      if (!executed_tags_.contains(p.tag)) pending_.emplace(p.tag, p);
    }
  }
  next_seq_ = max_seq;
  // Pre-prepares for this view that arrived before the NEW-VIEW.
  std::vector<std::uint64_t> seqs;
  for (const auto& [key, s] : slots_) {
    if (key.first == view && s.pre_prepared) seqs.push_back(key.second);
  }
  for (auto seq : seqs) {
    send_prepare(view, seq, out);
    check_prepared(view, seq, out);
  }
  if (primary_of(view) == id_) {
    for (const auto& [tag, p] : pending_) {
      if (!proposed_.contains(tag)) queue_.push_back(tag);
    }
    try_propose(out);
  }
}

Digest PbftReplica::fingerprint() const {
  Encoder e;
  e.put_u64(view_);
  e.put_bool(in_view_change_);
  e.put_u64(view_change_target_);
  e.put_u64(next_seq_);
  e.put_u64(last_executed_);
  e.put_bool(behavior_ == Behavior::Equivocate);
  e.put_u32(static_cast<std::uint32_t>(committed_.size()));
  for (const auto& [seq, c] : committed_) {
    e.put_u64(seq);
    e.put_digest(c.digest);
  }
  e.put_u32(static_cast<std::uint32_t>(slots_.size()));
  for (const auto& [key, s] : slots_) {
    e.put_u64(key.first);
    e.put_u64(key.second);
    e.put_bool(s.pre_prepared.has_value());
    if (s.pre_prepared) e.put_digest(*s.pre_prepared);
    e.put_bool(s.prepare_sent);
    e.put_bool(s.prepared);
    for (const auto* votes : {&s.prepares, &s.commits}) {
      e.put_u32(static_cast<std::uint32_t>(votes->size()));
      for (const auto& [d, who] : *votes) {
        e.put_digest(d);
        e.put_u32(static_cast<std::uint32_t>(who.size()));
        for (auto n : who) e.put_u32(n);
      }
    }
  }
  e.put_u32(static_cast<std::uint32_t>(pending_.size()));
  for (const auto& [tag, p] : pending_) e.put_u64(tag);
  e.put_u32(static_cast<std::uint32_t>(view_changes_.size()));
  for (const auto& [v, votes] : view_changes_) {
    e.put_u64(v);
    for (const auto& [from, vote] : votes) e.put_u32(from);
  }
  return digest(e.bytes());
}

// ---------------------------------------------------------------------------

PbftGroup::PbftGroup(Simulator& sim, std::vector<NodeId> nodes, PbftOptions options)
    : sim_(sim), options_(options), ids_(std::move(nodes)) {
  if (ids_.empty()) throw std::invalid_argument("pbft group needs at least one node");
  const auto n = static_cast<std::uint32_t>(ids_.size());
  const auto q = protocol_quorum(n, FailureModel::BFT);
  for (auto id : ids_) {
    index_of_[id] = replicas_.size();
    replicas_.emplace_back(id, ids_, q, PbftReplica::Behavior::Honest, options_.window, options_.max_batch);
    timers_.emplace_back();
  }
  channel_ = sim_.add_channel([this](const Event& ev) { on_event(ev); });
}

void PbftGroup::propose(const Proposal& p) {
  if (p.tag == kNoopTag) throw std::invalid_argument("proposal tag 0 is reserved");
  outstanding_[p.tag] = p;
  for (auto id : ids_) sim_.schedule(id, channel_, kClient, p, sim_.draw_latency());
}

std::optional<NodeId> PbftGroup::leader() const {
  std::optional<std::uint64_t> view;
  for (const auto& r : replicas_) {
    if (sim_.crashed(r.id()) || r.in_view_change()) continue;
    if (!view || r.view() > *view) view = r.view();
  }
  if (!view) return std::nullopt;
  return replicas_.front().primary_of(*view);
}

std::uint64_t PbftGroup::view_changes() const {
  std::uint64_t v = 0;
  for (const auto& r : replicas_) v = std::max(v, r.view());
  return v;
}

ReplicaState PbftGroup::state(NodeId node) const {
  const auto& r = replica(node);
  ReplicaState s;
  s.node = node;
  s.term = r.view();
  s.role = r.primary_of(r.view()) == node ? Role::Primary : Role::Backup;
  for (const auto& [seq, c] : r.committed()) {
    s.log.push_back(LogEntry{seq, c.view, c.digest, *c.batch});
  }
  s.commit_index = r.last_executed();
  return s;
}

void PbftGroup::sync_behavior(std::size_t idx) {
  auto kind = sim_.fault(ids_[idx]);
  replicas_[idx].set_behavior(kind == FaultKind::ByzantineEquivocate ? PbftReplica::Behavior::Equivocate
                                                                     : PbftReplica::Behavior::Honest);
}

void PbftGroup::on_event(const Event& ev) {
  auto it = index_of_.find(ev.target);
  if (it == index_of_.end()) return;
  const auto idx = it->second;
  sync_behavior(idx);
  auto& r = replicas_[idx];
  if (ev.kind == kHealEvent) {
    timers_[idx].armed = false;
    arm_timer(idx);
    return;
  }
  if (ev.kind == kTimer) {
    auto& t = timers_[idx];
    if (std::any_cast<const Timer&>(ev.payload).generation != t.generation) return;
    t.armed = false;
    if (!r.has_pending()) {
      t.backoff = 0;
      return;
    }
    if (r.last_executed() > t.executed_at_arm && !r.in_view_change()) {
      t.backoff = 0;
      arm_timer(idx);
      return;
    }
    ++t.backoff;
    deliver(idx, r.on_timeout());
    return;
  }
  if (ev.kind == kClient) {
    deliver(idx, r.on_request(std::any_cast<const Proposal&>(ev.payload)));
    return;
  }
  if (ev.kind == kDeferred) {
    deliver(idx, r.on_message(std::any_cast<const Deferred&>(ev.payload).msg));
    return;
  }
  if (!ev.network) return;
  const auto& msg = std::any_cast<const PbftMessage&>(ev.payload);
  if (options_.message_cost > 0) {
    auto done = sim_.reserve_cpu(ids_[idx], options_.message_cost, options_.cpu_lane);
    sim_.schedule(ids_[idx], channel_, kDeferred, Deferred{msg}, done - sim_.now());
    return;
  }
  deliver(idx, r.on_message(msg));
}

void PbftGroup::deliver(std::size_t idx, std::vector<PbftOutgoing> out) {
  const auto self = ids_[idx];
  for (auto& o : out) sim_.send(self, o.to, channel_, to_string(o.msg.type), std::move(o.msg));
  for (const auto& e : replicas_[idx].take_executed()) {
    outstanding_.erase(e.proposal.tag);
    notify_commit(self, e.seq, e.proposal);
  }
  arm_timer(idx);
}

void PbftGroup::arm_timer(std::size_t idx) {
  auto& t = timers_[idx];
  const auto& r = replicas_[idx];
  if (t.armed || !r.has_pending()) return;
  t.armed = true;
  ++t.generation;
  t.executed_at_arm = r.last_executed();
  const auto delay = options_.view_timeout << std::min<std::uint32_t>(t.backoff, 6);
  sim_.schedule(ids_[idx], channel_, kTimer, Timer{t.generation}, delay);
}

}  // namespace bcdb
