// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/authstore/mpt.hpp"

#include <algorithm>
#include <functional>

#include "bcdb/core/digest.hpp"
#include "bcdb/core/encoding.hpp"

namespace bcdb {

namespace {

std::size_t common_prefix(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return i;
}

}  // namespace

std::vector<std::uint8_t> MerklePatriciaTrie::nibbles(const Key& key) {
  std::vector<std::uint8_t> out;
  out.reserve(key.size() * 2);
  for (unsigned char c : key) {
    out.push_back(static_cast<std::uint8_t>(c >> 4));
    out.push_back(static_cast<std::uint8_t>(c & 0x0f));
  }
  return out;
}

MerklePatriciaTrie::MerklePatriciaTrie(const MerklePatriciaTrie& other) : AuthIndex(other), root_(copy(other.root_.get())) {}

std::unique_ptr<MerklePatriciaTrie::Node> MerklePatriciaTrie::copy(const Node* n) {
  if (n == nullptr) return nullptr;
  auto c = std::make_unique<Node>();
  c->kind = n->kind;
  c->path = n->path;
  c->value = n->value;
  c->has_value = n->has_value;
  for (std::size_t i = 0; i < 16; ++i) c->children[i] = copy(n->children[i].get());
  c->child = copy(n->child.get());
  c->digest = n->digest;
  c->encoding = n->encoding;
  c->dirty = n->dirty;
  return c;
}

void MerklePatriciaTrie::put(const Key& key, const Bytes& value) {
  auto path = nibbles(key);
  root_ = insert(std::move(root_), path, value);
}

std::unique_ptr<MerklePatriciaTrie::Node> MerklePatriciaTrie::insert(std::unique_ptr<Node> node,
                                                                     std::span<const std::uint8_t> path,
                                                                     const Bytes& value) {
  if (!node) {
    auto leaf = std::make_unique<Node>();
    leaf->kind = Node::Kind::Leaf;
    leaf->path.assign(path.begin(), path.end());
    leaf->value = value;
    return leaf;
  }
  node->dirty = true;
  switch (node->kind) {
    case Node::Kind::Branch: {
      if (path.empty()) {
        node->value = value;
        node->has_value = true;
      } else {
        auto& slot = node->children[path[0]];
        slot = insert(std::move(slot), path.subspan(1), value);
      }
      return node;
    }
    case Node::Kind::Leaf: {
      const auto c = common_prefix(node->path, path);
      if (c == node->path.size() && c == path.size()) {
        node->value = value;
        return node;
      }
      auto branch = std::make_unique<Node>();
      branch->kind = Node::Kind::Branch;
      // Re-home the existing leaf below the branch.
      std::vector<std::uint8_t> old_rest(node->path.begin() + static_cast<std::ptrdiff_t>(c), node->path.end());
      if (old_rest.empty()) {
        branch->value = std::move(node->value);
        branch->has_value = true;
      } else {
        const auto nib = old_rest[0];
        node->path.assign(old_rest.begin() + 1, old_rest.end());
        branch->children[nib] = std::move(node);
      }
      branch = insert(std::move(branch), path.subspan(c), value);
      if (c == 0) return branch;
      auto ext = std::make_unique<Node>();
      ext->kind = Node::Kind::Extension;
      ext->path.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(c));
      ext->child = std::move(branch);
      return ext;
    }
    case Node::Kind::Extension: {
      const auto c = common_prefix(node->path, path);
      if (c == node->path.size()) {
        node->child = insert(std::move(node->child), path.subspan(c), value);
        return node;
      }
      auto branch = std::make_unique<Node>();
      branch->kind = Node::Kind::Branch;
      const auto nib = node->path[c];
      if (c + 1 == node->path.size()) {
        branch->children[nib] = std::move(node->child);
      } else {
        auto tail = std::make_unique<Node>();
        tail->kind = Node::Kind::Extension;
        tail->path.assign(node->path.begin() + static_cast<std::ptrdiff_t>(c) + 1, node->path.end());
        tail->child = std::move(node->child);
        branch->children[nib] = std::move(tail);
      }
      branch = insert(std::move(branch), path.subspan(c), value);
      if (c == 0) return branch;
      node->path.resize(c);
      node->child = std::move(branch);
      return node;
    }
  }
  return node;
}

Bytes MerklePatriciaTrie::encode_node(const Node& n) {
  Encoder e;
  e.put_u8(static_cast<std::uint8_t>(n.kind));
  switch (n.kind) {
    case Node::Kind::Leaf:
      e.put_bytes(n.path);
      e.put_bytes(n.value);
      break;
    case Node::Kind::Extension:
      e.put_bytes(n.path);
      e.put_digest(n.child->digest);
      break;
    case Node::Kind::Branch: {
      std::uint16_t bitmap = 0;
      for (std::size_t i = 0; i < 16; ++i) {
        if (n.children[i]) bitmap = static_cast<std::uint16_t>(bitmap | (1u << i));
      }
      e.put_u16(bitmap);
      for (const auto& c : n.children) {
        if (c) e.put_digest(c->digest);
      }
      e.put_bool(n.has_value);
      if (n.has_value) e.put_bytes(n.value);
      break;
    }
  }
  return std::move(e).take();
}

void MerklePatriciaTrie::refresh(Node& n) {
  if (!n.dirty) return;
  if (n.kind == Node::Kind::Branch) {
    for (auto& c : n.children) {
      if (c) refresh(*c);
    }
  } else if (n.kind == Node::Kind::Extension) {
    refresh(*n.child);
  }
  n.encoding = encode_node(n);
  n.digest = hash(n.encoding);
  n.dirty = false;
}

Digest MerklePatriciaTrie::root() {
  if (!root_) return empty_digest();
  refresh(*root_);
  return root_->digest;
}

std::optional<Bytes> MerklePatriciaTrie::prove(const Key& key) {
  if (!root_) return std::nullopt;
  refresh(*root_);
  const auto path = nibbles(key);
  std::span<const std::uint8_t> rest(path);
  std::vector<const Bytes*> nodes;
  const Node* n = root_.get();
  while (n != nullptr) {
    nodes.push_back(&n->encoding);
    if (n->kind == Node::Kind::Leaf) {
      if (!std::equal(n->path.begin(), n->path.end(), rest.begin(), rest.end())) return std::nullopt;
      break;
    }
    if (n->kind == Node::Kind::Extension) {
      if (rest.size() < n->path.size() || !std::equal(n->path.begin(), n->path.end(), rest.begin())) {
        return std::nullopt;
      }
      rest = rest.subspan(n->path.size());
      n = n->child.get();
      continue;
    }
    if (rest.empty()) {
      if (!n->has_value) return std::nullopt;
      break;
    }
    n = n->children[rest[0]].get();
    rest = rest.subspan(1);
    if (n == nullptr) return std::nullopt;
  }
  Encoder e;
  e.put_u32(static_cast<std::uint32_t>(nodes.size()));
  for (const auto* b : nodes) e.put_bytes(*b);
  return std::move(e).take();
}

bool MerklePatriciaTrie::verify(const Digest& root, const Key& key, const Bytes& value,
                                std::span<const std::uint8_t> proof) const {
  try {
    Decoder d(proof);
    const auto count = d.get_u32();
    if (count == 0 || count > 1024) return false;
    const auto path = nibbles(key);
    std::span<const std::uint8_t> rest(path);
    Digest expected = root;
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto enc = d.get_bytes();
      if (digest(enc) != expected) return false;
      const bool last = i + 1 == count;
      Decoder nd(enc);
      const auto kind = nd.get_u8();
      if (kind == 0) {
        const auto lp = nd.get_bytes();
        const auto lv = nd.get_bytes();
        nd.expect_done();
        d.expect_done();
        return last && std::equal(lp.begin(), lp.end(), rest.begin(), rest.end()) && lv == value;
      }
      if (kind == 1) {
        const auto ep = nd.get_bytes();
        expected = nd.get_digest();
        nd.expect_done();
        if (ep.empty() || rest.size() < ep.size() || !std::equal(ep.begin(), ep.end(), rest.begin())) return false;
        rest = rest.subspan(ep.size());
        continue;
      }
      if (kind != 2) return false;
      const auto bitmap = nd.get_u16();
      std::array<Digest, 16> kids{};
      for (std::size_t b = 0; b < 16; ++b) {
        if (bitmap & (1u << b)) kids[b] = nd.get_digest();
      }
      const bool has_value = nd.get_bool();
      Bytes bv;
      if (has_value) bv = nd.get_bytes();
      nd.expect_done();
      if (rest.empty()) {
        d.expect_done();
        return last && has_value && bv == value;
      }
      if (!(bitmap & (1u << rest[0]))) return false;
      expected = kids[rest[0]];
      rest = rest.subspan(1);
    }
    return false;
  } catch (const DecodeError&) {
    return false;
  }
}

std::uint64_t MerklePatriciaTrie::stored_bytes() {
  if (!root_) return 0;
  refresh(*root_);
  std::uint64_t total = 0;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    total += 32 + n.encoding.size();
    for (const auto& c : n.children) {
      if (c) walk(*c);
    }
    if (n.child) walk(*n.child);
  };
  walk(*root_);
  return total;
}

std::size_t MerklePatriciaTrie::max_nibble_depth() const {
  std::function<std::size_t(const Node*)> depth = [&](const Node* n) -> std::size_t {
    if (n == nullptr) return 0;
    switch (n->kind) {
      case Node::Kind::Leaf: return n->path.size();
      case Node::Kind::Extension: return n->path.size() + depth(n->child.get());
      case Node::Kind::Branch: {
        std::size_t best = 0;
        for (const auto& c : n->children) {
          if (c) best = std::max(best, 1 + depth(c.get()));
        }
        return best;
      }
    }
    return 0;
  };
  return depth(root_.get());
}

std::size_t MerklePatriciaTrie::node_count() const {
  std::function<std::size_t(const Node*)> count = [&](const Node* n) -> std::size_t {
    if (n == nullptr) return 0;
    std::size_t c = 1 + count(n->child.get());
    for (const auto& k : n->children) c += count(k.get());
    return c;
  };
  return count(root_.get());
}

}  // namespace bcdb
