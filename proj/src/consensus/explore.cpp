// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/explore.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "bcdb/consensus/quorum.hpp"
#include "bcdb/core/digest.hpp"
#include "bcdb/core/encoding.hpp"

namespace bcdb {

namespace {

struct InFlight {
  NodeId to;
  PbftMessage msg;
  Digest id;
};

Digest message_id(NodeId to, const PbftMessage& m) {
  Encoder e;
  e.put_u32(to);
  e.put_u8(static_cast<std::uint8_t>(m.type));
  e.put_u64(m.view);
  e.put_u64(m.seq);
  e.put_digest(m.digest);
  e.put_u32(m.from);
  if (m.view_change) {
    for (const auto& c : m.view_change->prepared) {
      e.put_u64(c.seq);
      e.put_u64(c.view);
      e.put_digest(c.digest);
    }
  }
  if (m.assignments) {
    for (const auto& a : *m.assignments) {
      e.put_u64(a.seq);
      e.put_digest(a.digest);
    }
  }
  return digest(e.bytes());
}

struct World {
  std::vector<PbftReplica> replicas;
  std::vector<InFlight> network;
  std::vector<std::uint32_t> timeouts;

  Digest fingerprint() const {
    Encoder e;
    for (const auto& r : replicas) e.put_digest(r.fingerprint());
    std::vector<Digest> ids;
    for (const auto& m : network) ids.push_back(m.id);
    std::sort(ids.begin(), ids.end());
    for (const auto& d : ids) e.put_digest(d);
    for (auto t : timeouts) e.put_u32(t);
    return digest(e.bytes());
  }

  void post(std::vector<PbftOutgoing> out) {
    for (auto& o : out) {
      auto id = message_id(o.to, o.msg);
      network.push_back({o.to, std::move(o.msg), id});
    }
  }
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const { return static_cast<std::size_t>(digest_prefix_u64(d)); }
};

class Explorer {
 public:
  explicit Explorer(const ExploreOptions& o) : options_(o) {}

  ExploreResult run() {
    std::vector<NodeId> members;
    for (std::uint32_t i = 0; i < options_.n; ++i) members.push_back(i);
    const auto q = protocol_quorum(options_.n, FailureModel::BFT);
    World w;
    for (auto id : members) {
      auto behavior =
          id == options_.equivocator ? PbftReplica::Behavior::Equivocate : PbftReplica::Behavior::Honest;
      w.replicas.emplace_back(id, members, q, behavior, 2, 1);
    }
    w.timeouts.assign(options_.n, 0);
    for (std::uint32_t r = 1; r <= options_.requests; ++r) {
      Proposal p{r, digest("request-" + std::to_string(r))};
      for (auto& rep : w.replicas) w.post(rep.on_request(p));
    }
    dfs(w, 0);
    return result_;
  }

 private:
  bool check(const World& w) {
    std::map<std::uint64_t, Digest> decided;
    for (const auto& r : w.replicas) {
      if (r.id() == options_.equivocator) continue;
      if (r.conflicting_commit()) {
        fail("replica " + std::to_string(r.id()) + " saw conflicting commit certificates");
        return false;
      }
      result_.max_committed = std::max<std::uint64_t>(result_.max_committed, r.committed().size());
      for (const auto& [seq, c] : r.committed()) {
        auto [it, inserted] = decided.emplace(seq, c.digest);
        if (!inserted && it->second != c.digest) {
          fail("divergent commit at seq " + std::to_string(seq));
          return false;
        }
      }
    }
    return true;
  }

  void fail(std::string detail) {
    result_.violation = true;
    result_.detail = std::move(detail);
  }

  void dfs(const World& w, std::uint32_t depth) {
    if (result_.violation) return;
    // A state seen before at the same or a shallower depth has nothing new below it.
    auto [it, inserted] = visited_.emplace(w.fingerprint(), depth);
    if (!inserted) {
      if (it->second <= depth) return;
      it->second = depth;
    } else {
      ++result_.states;
    }
    if (result_.states >= options_.max_states) {
      result_.truncated = true;
      return;
    }
    if (!check(w) || depth >= options_.max_depth) return;

    // Deliveries. Identical messages in flight lead to identical successors.
    std::unordered_set<Digest, DigestHash> tried;
    for (std::size_t i = 0; i < w.network.size(); ++i) {
      if (!tried.insert(w.network[i].id).second) continue;
      World next = w;
      auto m = std::move(next.network[i]);
      next.network.erase(next.network.begin() + static_cast<std::ptrdiff_t>(i));
      next.post(next.replicas[m.to].on_message(m.msg));
      ++result_.transitions;
      dfs(next, depth + 1);
      if (result_.violation || result_.truncated) return;
    }
    // Timeouts at honest replicas.
    for (std::uint32_t r = 0; r < options_.n; ++r) {
      if (r == options_.equivocator || w.timeouts[r] >= options_.max_timeouts_per_replica) continue;
      World next = w;
      ++next.timeouts[r];
      next.post(next.replicas[r].on_timeout());
      ++result_.transitions;
      dfs(next, depth + 1);
      if (result_.violation || result_.truncated) return;
    }
  }

  ExploreOptions options_;
  ExploreResult result_;
  std::unordered_map<Digest, std::uint32_t, DigestHash> visited_;
};

}  // namespace

ExploreResult explore_pbft(const ExploreOptions& options) { return Explorer(options).run(); }

}  // namespace bcdb
