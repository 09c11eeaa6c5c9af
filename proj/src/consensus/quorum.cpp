// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/consensus/quorum.hpp"

#include <stdexcept>
#include <string>

namespace bcdb {

std::uint32_t max_tolerated_failures(std::uint32_t n, FailureModel model) {
  if (n == 0) return 0;
  return model == FailureModel::CFT ? (n - 1) / 2 : (n - 1) / 3;
}

std::uint32_t quorum_size(std::uint32_t n, FailureModel model) {
  if (n == 0) throw std::invalid_argument("quorum of zero replicas");
  if (model == FailureModel::CFT) return n / 2 + 1;
  if ((n - 1) % 3 != 0) {
    throw std::invalid_argument("BFT replica count " + std::to_string(n) + " is not of the form 3f+1");
  }
  return 2 * ((n - 1) / 3) + 1;
}

QuorumSpec make_quorum_spec(std::uint32_t n, FailureModel model) {
  return QuorumSpec{n, max_tolerated_failures(n, model), quorum_size(n, model), model};
}

std::uint32_t protocol_quorum(std::uint32_t n, FailureModel model) {
  if (n == 0) throw std::invalid_argument("quorum of zero replicas");
  if (model == FailureModel::CFT) return n / 2 + 1;
  const auto f = (n - 1) / 3;
  return (n + f + 2) / 2;
}

}  // namespace bcdb
