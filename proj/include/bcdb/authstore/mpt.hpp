// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "bcdb/authstore/index.hpp"

namespace bcdb {

/// Nibble-keyed Merkle trie with leaf, extension and branch nodes.
///
/// Node encodings (hash input):
///   leaf:      u8 0, bytes(path nibbles, one per byte), bytes(value)
///   extension: u8 1, bytes(path nibbles), child digest
///   branch:    u8 2, u16 child bitmap, digests of present children in
///              nibble order, u8 has_value, [bytes(value)]
/// The empty trie's root is the digest of the empty string.
class MerklePatriciaTrie final : public AuthIndex {
 public:
  MerklePatriciaTrie() = default;
  MerklePatriciaTrie(const MerklePatriciaTrie& other);
  MerklePatriciaTrie& operator=(const MerklePatriciaTrie&) = delete;

  IndexKind kind() const override { return IndexKind::MPT; }
  std::unique_ptr<AuthIndex> clone() const override { return std::make_unique<MerklePatriciaTrie>(*this); }

  void put(const Key& key, const Bytes& value) override;
  Digest root() override;
  std::optional<Bytes> prove(const Key& key) override;
  bool verify(const Digest& root, const Key& key, const Bytes& value,
              std::span<const std::uint8_t> proof) const override;
  std::uint64_t stored_bytes() override;

  /// Longest root-to-leaf path measured in consumed nibbles.
  std::size_t max_nibble_depth() const;
  std::size_t node_count() const;

  static std::vector<std::uint8_t> nibbles(const Key& key);

 private:
  struct Node {
    enum class Kind : std::uint8_t { Leaf = 0, Extension = 1, Branch = 2 };
    Kind kind = Kind::Leaf;
    std::vector<std::uint8_t> path;
    Bytes value;
    bool has_value = false;
    std::array<std::unique_ptr<Node>, 16> children;
    std::unique_ptr<Node> child;
    Digest digest{};
    Bytes encoding;
    bool dirty = true;
  };

  static std::unique_ptr<Node> copy(const Node* n);
  std::unique_ptr<Node> insert(std::unique_ptr<Node> node, std::span<const std::uint8_t> path, const Bytes& value);
  void refresh(Node& n);
  static Bytes encode_node(const Node& n);

  std::unique_ptr<Node> root_;
};

}  // namespace bcdb
