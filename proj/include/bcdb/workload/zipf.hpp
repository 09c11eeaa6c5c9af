// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "bcdb/core/rng.hpp"

namespace bcdb {

/// Zipf sampler over ranks [1, n] with P(i) proportional to 1 / i^theta.
/// Rejection-inversion (Hormann and Derflinger), so setup is O(1) and the
/// draw is exact in distribution for any n.
class ZipfSampler {
 public:
  /// Throws std::invalid_argument for n == 0 or a negative/non-finite theta.
  ZipfSampler(std::uint64_t n, double theta);

  std::uint64_t operator()(Rng& rng) const;

  std::uint64_t n() const { return n_; }
  double theta() const { return theta_; }

  /// Exact probability of rank i, by direct summation. For tests.
  static double pmf(std::uint64_t n, double theta, std::uint64_t i);

 private:
  double h(double x) const;
  double h_integral(double x) const;
  double h_integral_inverse(double x) const;

  std::uint64_t n_;
  double theta_;
  double h_integral_x1_;
  double h_integral_n_;
  double s_;
};

/// One draw; builds the sampler on the spot.
std::uint64_t zipfian_sample(std::uint64_t n, double theta, Rng& rng);

}  // namespace bcdb
