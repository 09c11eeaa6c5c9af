// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bcdb {

/// Virtual time is an integer tick count (microsecond-like units).
using VirtualTime = std::int64_t;
using NodeId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;
using Key = std::string;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr VirtualTime kTicksPerSecond = 1'000'000;

std::string to_hex(const std::uint8_t* data, std::size_t size);
inline std::string to_hex(const Digest& d) { return to_hex(d.data(), d.size()); }
inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

Bytes to_bytes(std::string_view s);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bcdb
