// Copyright 2026 The bcdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "bcdb/core/encoding.hpp"

#include <limits>

namespace bcdb {

void Encoder::put_u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void Encoder::put_u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::put_u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::put_bytes(std::span<const std::uint8_t> b) {
  if (b.size() > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("field too large");
  put_u32(static_cast<std::uint32_t>(b.size()));
  put_raw(b);
}

void Encoder::put_string(std::string_view s) {
  put_bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::span<const std::uint8_t> Decoder::take(std::size_t n) {
  if (n > remaining()) throw DecodeError("truncated input");
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t Decoder::get_u8() { return take(1)[0]; }

std::uint16_t Decoder::get_u16() {
  auto s = take(2);
  return static_cast<std::uint16_t>((s[0] << 8) | s[1]);
}

std::uint32_t Decoder::get_u32() {
  std::uint32_t v = 0;
  for (auto b : take(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t Decoder::get_u64() {
  std::uint64_t v = 0;
  for (auto b : take(8)) v = (v << 8) | b;
  return v;
}

bool Decoder::get_bool() {
  auto v = get_u8();
  if (v > 1) throw DecodeError("invalid bool");
  return v == 1;
}

Bytes Decoder::get_bytes() {
  auto n = get_u32();
  auto s = take(n);
  return Bytes(s.begin(), s.end());
}

std::string Decoder::get_string() {
  auto n = get_u32();
  auto s = take(n);
  return std::string(s.begin(), s.end());
}

Digest Decoder::get_digest() {
  Digest d{};
  auto s = take(d.size());
  std::copy(s.begin(), s.end(), d.begin());
  return d;
}

void Decoder::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes");
}

}  // namespace bcdb
