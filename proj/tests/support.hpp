/*
 * Copyright 2026 The rvlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Test-only helpers. The enc_* packers place fields by hand from the RV32I
// base encoding tables and share no code with rvlab::encode.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rvlab/assembler.hpp"
#include "rvlab/memory.hpp"

namespace rvlab::test {

constexpr std::uint32_t enc_r(std::uint32_t op, std::uint32_t rd, std::uint32_t f3, std::uint32_t rs1,
                              std::uint32_t rs2, std::uint32_t f7) {
  return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op;
}
constexpr std::uint32_t enc_i(std::uint32_t op, std::uint32_t rd, std::uint32_t f3, std::uint32_t rs1, std::int32_t imm) {
  return ((static_cast<std::uint32_t>(imm) & 0xfff) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op;
}
constexpr std::uint32_t enc_s(std::uint32_t op, std::uint32_t f3, std::uint32_t rs1, std::uint32_t rs2, std::int32_t imm) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (((u >> 5) & 0x7f) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | ((u & 0x1f) << 7) | op;
}
constexpr std::uint32_t enc_b(std::uint32_t f3, std::uint32_t rs1, std::uint32_t rs2, std::int32_t imm) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3f) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) |
         (((u >> 1) & 0xf) << 8) | (((u >> 11) & 1) << 7) | 0x63;
}
constexpr std::uint32_t enc_u(std::uint32_t op, std::uint32_t rd, std::uint32_t imm20) {
  return ((imm20 & 0xfffff) << 12) | (rd << 7) | op;
}
constexpr std::uint32_t enc_j(std::uint32_t rd, std::int32_t imm) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3ff) << 21) | (((u >> 11) & 1) << 20) | (((u >> 12) & 0xff) << 12) |
         (rd << 7) | 0x6f;
}

constexpr std::uint32_t addi(std::uint32_t rd, std::uint32_t rs1, std::int32_t imm) { return enc_i(0x13, rd, 0, rs1, imm); }
constexpr std::uint32_t add(std::uint32_t rd, std::uint32_t rs1, std::uint32_t rs2) {
  return enc_r(0x33, rd, 0, rs1, rs2, 0);
}
constexpr std::uint32_t lw(std::uint32_t rd, std::uint32_t rs1, std::int32_t imm) { return enc_i(0x03, rd, 2, rs1, imm); }
constexpr std::uint32_t sw(std::uint32_t rs2, std::uint32_t rs1, std::int32_t imm) { return enc_s(0x23, 2, rs1, rs2, imm); }
constexpr std::uint32_t bne(std::uint32_t rs1, std::uint32_t rs2, std::int32_t imm) { return enc_b(1, rs1, rs2, imm); }
constexpr std::uint32_t beq(std::uint32_t rs1, std::uint32_t rs2, std::int32_t imm) { return enc_b(0, rs1, rs2, imm); }
constexpr std::uint32_t kEcall = 0x00000073;
constexpr std::uint32_t kEbreak = 0x00100073;
constexpr std::uint32_t kNop = 0x00000013;

/// Image with `words` laid out from address 0.
inline MemoryImage image_of(std::initializer_list<std::uint32_t> words) {
  MemoryImage img;
  std::uint32_t a = 0;
  for (auto w : words) {
    img.write_word(a, w);
    a += 4;
  }
  return img;
}

inline MemoryImage image_of(const std::vector<std::uint32_t>& words) {
  MemoryImage img;
  for (std::size_t i = 0; i < words.size(); ++i) img.write_word(static_cast<std::uint32_t>(4 * i), words[i]);
  return img;
}

}  // namespace rvlab::test
