// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/workload/zipf.hpp"

#include <cmath>
#include <stdexcept>

namespace bcdb {

namespace {

// log1p(x)/x, continuous at 0.
double helper1(double x) {
  if (std::fabs(x) > 1e-8) return std::log1p(x) / x;
  return 1 - x * (0.5 - x * (1.0 / 3 - 0.25 * x));
}

// expm1(x)/x, continuous at 0.
double helper2(double x) {
  if (std::fabs(x) > 1e-8) return std::expm1(x) / x;
  return 1 + x * 0.5 * (1 + x * (1.0 / 3) * (1 + 0.25 * x));
}

}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t n, double theta) : n_(n), theta_(theta) {
  if (n == 0) throw std::invalid_argument("zipf: n must be positive");
  if (!(theta >= 0) || !std::isfinite(theta)) throw std::invalid_argument("zipf: theta must be >= 0");
  h_integral_x1_ = h_integral(1.5) - 1;
  h_integral_n_ = h_integral(static_cast<double>(n) + 0.5);
  s_ = 2 - h_integral_inverse(h_integral(2.5) - h(2));
}

double ZipfSampler::h(double x) const { return std::exp(-theta_ * std::log(x)); }

double ZipfSampler::h_integral(double x) const {
  const double lx = std::log(x);
  return helper2((1 - theta_) * lx) * lx;
}

double ZipfSampler::h_integral_inverse(double x) const {
  double t = x * (1 - theta_);
  if (t < -1) t = -1;  // guards rounding at the lower end
  return std::exp(helper1(t) * x);
}

std::uint64_t ZipfSampler::operator()(Rng& rng) const {
  if (n_ == 1) return 1;
  const double n = static_cast<double>(n_);
  for (;;) {
    const double u = h_integral_n_ + rng.unit() * (h_integral_x1_ - h_integral_n_);
    const double x = h_integral_inverse(u);
    double k = std::floor(x + 0.5);
    if (k < 1) k = 1;
    if (k > n) k = n;
    if (k - x <= s_ || u >= h_integral(k + 0.5) - h(k)) return static_cast<std::uint64_t>(k);
  }
}

double ZipfSampler::pmf(std::uint64_t n, double theta, std::uint64_t i) {
  if (i < 1 || i > n) return 0.0;
  double norm = 0;
  for (std::uint64_t j = 1; j <= n; ++j) norm += std::pow(static_cast<double>(j), -theta);
  return std::pow(static_cast<double>(i), -theta) / norm;
}

std::uint64_t zipfian_sample(std::uint64_t n, double theta, Rng& rng) { return ZipfSampler(n, theta)(rng); }

}  // namespace bcdb
