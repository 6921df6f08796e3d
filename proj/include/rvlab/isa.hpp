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

/**
 * @file isa.hpp
 * @brief RV32I instruction representation: decode, encode and disassembly.
 *
 * Every execution model (reference, single-cycle, pipeline) and the assembler
 * go through this header, so it is the only place that knows bit layouts.
 * Supported subset is the RV32I base ISA. FENCE decodes and executes as a
 * no-op; CSR instructions, FENCE.I and every extension are illegal.
 */

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rvlab {

class RegisterIndex {
 public:
  constexpr RegisterIndex() = default;
  constexpr explicit RegisterIndex(unsigned v) : value_(static_cast<std::uint8_t>(v)) {
    if (v > 31) throw std::out_of_range("register index out of range: " + std::to_string(v));
  }

  constexpr unsigned value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }
  constexpr auto operator<=>(const RegisterIndex&) const = default;

 private:
  std::uint8_t value_ = 0;
};

enum class Format : std::uint8_t { R, I, S, B, U, J, SYSTEM };

enum class Mnemonic : std::uint8_t {
  LUI, AUIPC, JAL, JALR,
  BEQ, BNE, BLT, BGE, BLTU, BGEU,
  LB, LH, LW, LBU, LHU,
  SB, SH, SW,
  ADDI, SLTI, SLTIU, XORI, ORI, ANDI, SLLI, SRLI, SRAI,
  ADD, SUB, SLL, SLT, SLTU, XOR, SRL, SRA, OR, AND,
  FENCE, ECALL, EBREAK,
};

inline constexpr std::size_t kMnemonicCount = static_cast<std::size_t>(Mnemonic::EBREAK) + 1;

namespace opcode {
inline constexpr std::uint32_t kLui = 0x37;
inline constexpr std::uint32_t kAuipc = 0x17;
inline constexpr std::uint32_t kJal = 0x6f;
inline constexpr std::uint32_t kJalr = 0x67;
inline constexpr std::uint32_t kBranch = 0x63;
inline constexpr std::uint32_t kLoad = 0x03;
inline constexpr std::uint32_t kStore = 0x23;
inline constexpr std::uint32_t kOpImm = 0x13;
inline constexpr std::uint32_t kOp = 0x33;
inline constexpr std::uint32_t kMiscMem = 0x0f;
inline constexpr std::uint32_t kSystem = 0x73;
}  // namespace opcode

struct MnemonicInfo {
  std::string_view name;
  Format format;
  std::uint32_t opcode;
  std::uint32_t funct3;
  std::uint32_t funct7;
};

// Indexed by Mnemonic. funct3/funct7 are zero where the format has none.
inline constexpr std::array<MnemonicInfo, kMnemonicCount> kMnemonicTable = {{
    {"lui", Format::U, opcode::kLui, 0, 0},
    {"auipc", Format::U, opcode::kAuipc, 0, 0},
    {"jal", Format::J, opcode::kJal, 0, 0},
    {"jalr", Format::I, opcode::kJalr, 0, 0},
    {"beq", Format::B, opcode::kBranch, 0, 0},
    {"bne", Format::B, opcode::kBranch, 1, 0},
    {"blt", Format::B, opcode::kBranch, 4, 0},
    {"bge", Format::B, opcode::kBranch, 5, 0},
    {"bltu", Format::B, opcode::kBranch, 6, 0},
    {"bgeu", Format::B, opcode::kBranch, 7, 0},
    {"lb", Format::I, opcode::kLoad, 0, 0},
    {"lh", Format::I, opcode::kLoad, 1, 0},
    {"lw", Format::I, opcode::kLoad, 2, 0},
    {"lbu", Format::I, opcode::kLoad, 4, 0},
    {"lhu", Format::I, opcode::kLoad, 5, 0},
    {"sb", Format::S, opcode::kStore, 0, 0},
    {"sh", Format::S, opcode::kStore, 1, 0},
    {"sw", Format::S, opcode::kStore, 2, 0},
    {"addi", Format::I, opcode::kOpImm, 0, 0},
    {"slti", Format::I, opcode::kOpImm, 2, 0},
    {"sltiu", Format::I, opcode::kOpImm, 3, 0},
    {"xori", Format::I, opcode::kOpImm, 4, 0},
    {"ori", Format::I, opcode::kOpImm, 6, 0},
    {"andi", Format::I, opcode::kOpImm, 7, 0},
    {"slli", Format::I, opcode::kOpImm, 1, 0x00},
    {"srli", Format::I, opcode::kOpImm, 5, 0x00},
    {"srai", Format::I, opcode::kOpImm, 5, 0x20},
    {"add", Format::R, opcode::kOp, 0, 0x00},
    {"sub", Format::R, opcode::kOp, 0, 0x20},
    {"sll", Format::R, opcode::kOp, 1, 0x00},
    {"slt", Format::R, opcode::kOp, 2, 0x00},
    {"sltu", Format::R, opcode::kOp, 3, 0x00},
    {"xor", Format::R, opcode::kOp, 4, 0x00},
    {"srl", Format::R, opcode::kOp, 5, 0x00},
    {"sra", Format::R, opcode::kOp, 5, 0x20},
    {"or", Format::R, opcode::kOp, 6, 0x00},
    {"and", Format::R, opcode::kOp, 7, 0x00},
    {"fence", Format::I, opcode::kMiscMem, 0, 0},
    {"ecall", Format::SYSTEM, opcode::kSystem, 0, 0},
    {"ebreak", Format::SYSTEM, opcode::kSystem, 0, 0},
}};

constexpr const MnemonicInfo& info(Mnemonic m) { return kMnemonicTable[static_cast<std::size_t>(m)]; }
constexpr std::string_view name(Mnemonic m) { return info(m).name; }

inline std::optional<Mnemonic> mnemonic_from_name(std::string_view text) {
  for (std::size_t i = 0; i < kMnemonicCount; ++i) {
    if (kMnemonicTable[i].name == text) return static_cast<Mnemonic>(i);
  }
  return std::nullopt;
}

constexpr bool is_branch(Mnemonic m) { return m >= Mnemonic::BEQ && m <= Mnemonic::BGEU; }
constexpr bool is_load(Mnemonic m) { return m >= Mnemonic::LB && m <= Mnemonic::LHU; }
constexpr bool is_store(Mnemonic m) { return m >= Mnemonic::SB && m <= Mnemonic::SW; }
constexpr bool is_shift_imm(Mnemonic m) { return m == Mnemonic::SLLI || m == Mnemonic::SRLI || m == Mnemonic::SRAI; }
constexpr bool is_jump(Mnemonic m) { return m == Mnemonic::JAL || m == Mnemonic::JALR; }
constexpr bool is_control(Mnemonic m) { return is_branch(m) || is_jump(m); }

/// Access width in bytes of a load or store; 0 for everything else.
constexpr unsigned access_width(Mnemonic m) {
  switch (m) {
    case Mnemonic::LB: case Mnemonic::LBU: case Mnemonic::SB: return 1;
    case Mnemonic::LH: case Mnemonic::LHU: case Mnemonic::SH: return 2;
    case Mnemonic::LW: case Mnemonic::SW: return 4;
    default: return 0;
  }
}

/// Decoded instruction. Register fields the format does not use are zero and
/// reported as unused by uses_rd/uses_rs1/uses_rs2. For U-format `imm` holds
/// the already shifted value (low 12 bits zero); for shifts it is the shamt.
struct Instruction {
  Mnemonic mnemonic = Mnemonic::ADDI;
  Format format = Format::I;
  RegisterIndex rd;
  RegisterIndex rs1;
  RegisterIndex rs2;
  std::int32_t imm = 0;
  std::uint32_t raw = 0x00000013;

  bool uses_rd() const {
    switch (format) {
      case Format::R: case Format::U: case Format::J: return true;
      case Format::I: return mnemonic != Mnemonic::FENCE;
      default: return false;
    }
  }
  bool uses_rs1() const {
    switch (format) {
      case Format::R: case Format::S: case Format::B: return true;
      case Format::I: return mnemonic != Mnemonic::FENCE;
      default: return false;
    }
  }
  bool uses_rs2() const { return format == Format::R || format == Format::S || format == Format::B; }

  /// True if retiring this instruction architecturally writes a non-x0 register.
  bool writes_register() const { return uses_rd() && !rd.is_zero(); }

  bool operator==(const Instruction&) const = default;
};

class IllegalInstruction : public std::runtime_error {
 public:
  explicit IllegalInstruction(std::uint32_t word)
      : std::runtime_error(describe(word)), word_(word) {}
  std::uint32_t word() const { return word_; }

 private:
  static std::string describe(std::uint32_t word) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "illegal instruction 0x%08x", word);
    return buf;
  }
  std::uint32_t word_;
};

class ImmediateOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr std::int32_t sign_extend(std::uint32_t value, unsigned bits) {
  const std::uint32_t m = 1u << (bits - 1);
  value &= (bits == 32) ? 0xffffffffu : ((1u << bits) - 1);
  return static_cast<std::int32_t>((value ^ m) - m);
}

constexpr std::uint32_t bits(std::uint32_t w, unsigned hi, unsigned lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr bool fits_signed(std::int64_t v, unsigned width) {
  const std::int64_t lo = -(std::int64_t{1} << (width - 1));
  const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
  return v >= lo && v <= hi;
}

constexpr std::int32_t imm_i(std::uint32_t w) { return sign_extend(w >> 20, 12); }
constexpr std::int32_t imm_s(std::uint32_t w) { return sign_extend((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
constexpr std::int32_t imm_b(std::uint32_t w) {
  return sign_extend((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) |
                         (bits(w, 11, 8) << 1),
                     13);
}
constexpr std::int32_t imm_u(std::uint32_t w) { return static_cast<std::int32_t>(w & 0xfffff000u); }
constexpr std::int32_t imm_j(std::uint32_t w) {
  return sign_extend((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) |
                         (bits(w, 30, 21) << 1),
                     21);
}

inline std::optional<Mnemonic> match(std::uint32_t op, std::uint32_t f3, std::optional<std::uint32_t> f7) {
  for (std::size_t i = 0; i < kMnemonicCount; ++i) {
    const auto& e = kMnemonicTable[i];
    if (e.opcode != op || e.funct3 != f3) continue;
    if (f7 && e.funct7 != *f7) continue;
    return static_cast<Mnemonic>(i);
  }
  return std::nullopt;
}

}  // namespace detail

/// Decodes `word`; std::nullopt when it is not a supported RV32I encoding.
inline std::optional<Instruction> try_decode(std::uint32_t word) {
  using namespace detail;
  const std::uint32_t op = word & 0x7f;
  const std::uint32_t f3 = bits(word, 14, 12);
  const std::uint32_t f7 = bits(word, 31, 25);
  const RegisterIndex rd{bits(word, 11, 7)};
  const RegisterIndex rs1{bits(word, 19, 15)};
  const RegisterIndex rs2{bits(word, 24, 20)};

  Instruction in;
  in.raw = word;
  std::optional<Mnemonic> m;
  switch (op) {
    case opcode::kLui:
    case opcode::kAuipc:
      m = op == opcode::kLui ? Mnemonic::LUI : Mnemonic::AUIPC;
      in.rd = rd;
      in.imm = imm_u(word);
      break;
    case opcode::kJal:
      m = Mnemonic::JAL;
      in.rd = rd;
      in.imm = imm_j(word);
      break;
    case opcode::kJalr:
      if (f3 != 0) return std::nullopt;
      m = Mnemonic::JALR;
      in.rd = rd;
      in.rs1 = rs1;
      in.imm = imm_i(word);
      break;
    case opcode::kBranch:
      m = match(op, f3, std::nullopt);
      in.rs1 = rs1;
      in.rs2 = rs2;
      in.imm = imm_b(word);
      break;
    case opcode::kLoad:
      m = match(op, f3, std::nullopt);
      in.rd = rd;
      in.rs1 = rs1;
      in.imm = imm_i(word);
      break;
    case opcode::kStore:
      m = match(op, f3, std::nullopt);
      in.rs1 = rs1;
      in.rs2 = rs2;
      in.imm = imm_s(word);
      break;
    case opcode::kOpImm:
      if (f3 == 1 || f3 == 5) {
        m = match(op, f3, f7);
        in.imm = static_cast<std::int32_t>(bits(word, 24, 20));
      } else {
        m = match(op, f3, std::nullopt);
        in.imm = imm_i(word);
      }
      in.rd = rd;
      in.rs1 = rs1;
      break;
    case opcode::kOp:
      m = match(op, f3, f7);
      in.rd = rd;
      in.rs1 = rs1;
      in.rs2 = rs2;
      break;
    case opcode::kMiscMem:
      // Plain FENCE only: fm = 0 and rd = rs1 = 0; pred/succ kept in imm.
      if (f3 != 0 || bits(word, 31, 28) != 0 || !rd.is_zero() || !rs1.is_zero()) return std::nullopt;
      m = Mnemonic::FENCE;
      in.imm = static_cast<std::int32_t>(bits(word, 27, 20));
      break;
    case opcode::kSystem:
      if (word == 0x00000073) m = Mnemonic::ECALL;
      else if (word == 0x00100073) m = Mnemonic::EBREAK;
      break;
    default:
      break;
  }
  if (!m) return std::nullopt;
  in.mnemonic = *m;
  in.format = info(*m).format;
  return in;
}

inline Instruction decode(std::uint32_t word) {
  if (auto in = try_decode(word)) return *in;
  throw IllegalInstruction(word);
}

/// Encodes the mnemonic/register/immediate fields of `in`; `in.raw` is ignored.
/// Throws ImmediateOutOfRange when the immediate does not fit the format.
inline std::uint32_t encode(const Instruction& in) {
  using detail::fits_signed;
  const auto& e = info(in.mnemonic);
  const std::uint32_t rd = in.rd.value(), rs1 = in.rs1.value(), rs2 = in.rs2.value();
  const auto imm = static_cast<std::uint32_t>(in.imm);
  auto fail = [&](const char* why) {
    throw ImmediateOutOfRange(std::string(e.name) + ": immediate " + std::to_string(in.imm) + " " + why);
  };

  switch (in.mnemonic) {
    case Mnemonic::ECALL: return 0x00000073;
    case Mnemonic::EBREAK: return 0x00100073;
    case Mnemonic::FENCE:
      if (in.imm < 0 || in.imm > 0xff) fail("is not a pred/succ byte");
      return (imm << 20) | e.opcode;
    default: break;
  }

  switch (e.format) {
    case Format::R:
      return (e.funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (e.funct3 << 12) | (rd << 7) | e.opcode;
    case Format::I:
      if (is_shift_imm(in.mnemonic)) {
        if (in.imm < 0 || in.imm > 31) fail("is not a 5-bit shift amount");
        return (e.funct7 << 25) | (imm << 20) | (rs1 << 15) | (e.funct3 << 12) | (rd << 7) | e.opcode;
      }
      if (!fits_signed(in.imm, 12)) fail("does not fit in 12 signed bits");
      return ((imm & 0xfff) << 20) | (rs1 << 15) | (e.funct3 << 12) | (rd << 7) | e.opcode;
    case Format::S:
      if (!fits_signed(in.imm, 12)) fail("does not fit in 12 signed bits");
      return (((imm >> 5) & 0x7f) << 25) | (rs2 << 20) | (rs1 << 15) | (e.funct3 << 12) |
             ((imm & 0x1f) << 7) | e.opcode;
    case Format::B:
      if (!fits_signed(in.imm, 13)) fail("does not fit in 13 signed bits");
      if (imm & 1) fail("is odd");
      return (((imm >> 12) & 1) << 31) | (((imm >> 5) & 0x3f) << 25) | (rs2 << 20) | (rs1 << 15) |
             (e.funct3 << 12) | (((imm >> 1) & 0xf) << 8) | (((imm >> 11) & 1) << 7) | e.opcode;
    case Format::U:
      if (imm & 0xfff) fail("has nonzero low 12 bits");
      return imm | (rd << 7) | e.opcode;
    case Format::J:
      if (!fits_signed(in.imm, 21)) fail("does not fit in 21 signed bits");
      if (imm & 1) fail("is odd");
      return (((imm >> 20) & 1) << 31) | (((imm >> 1) & 0x3ff) << 21) | (((imm >> 11) & 1) << 20) |
             (((imm >> 12) & 0xff) << 12) | (rd << 7) | e.opcode;
    case Format::SYSTEM: break;
  }
  return 0;
}

/// Builds a well-formed instruction (format and raw word filled in). Fields
/// the format does not use must be zero.
inline Instruction make_instruction(Mnemonic m, unsigned rd = 0, unsigned rs1 = 0, unsigned rs2 = 0,
                                    std::int32_t imm = 0) {
  Instruction in;
  in.mnemonic = m;
  in.format = info(m).format;
  in.rd = RegisterIndex{rd};
  in.rs1 = RegisterIndex{rs1};
  in.rs2 = RegisterIndex{rs2};
  in.imm = imm;
  in.raw = encode(in);
  return in;
}

namespace detail {
inline std::string fence_set(unsigned bits4) {
  std::string s;
  if (bits4 & 8) s += 'i';
  if (bits4 & 4) s += 'o';
  if (bits4 & 2) s += 'r';
  if (bits4 & 1) s += 'w';
  return s.empty() ? "0" : s;
}
}  // namespace detail

/// Canonical lowercase text, accepted back by the assembler.
inline std::string disassemble(const Instruction& in) {
  const std::string n(name(in.mnemonic));
  auto x = [](RegisterIndex r) { return "x" + std::to_string(r.value()); };
  const std::string imm = std::to_string(in.imm);
  switch (in.mnemonic) {
    case Mnemonic::ECALL:
    case Mnemonic::EBREAK:
      return n;
    case Mnemonic::FENCE:
      return n + " " + detail::fence_set((in.imm >> 4) & 0xf) + ", " + detail::fence_set(in.imm & 0xf);
    case Mnemonic::JALR:
      return n + " " + x(in.rd) + ", " + imm + "(" + x(in.rs1) + ")";
    default:
      break;
  }
  if (is_load(in.mnemonic)) return n + " " + x(in.rd) + ", " + imm + "(" + x(in.rs1) + ")";
  switch (in.format) {
    case Format::R: return n + " " + x(in.rd) + ", " + x(in.rs1) + ", " + x(in.rs2);
    case Format::I: return n + " " + x(in.rd) + ", " + x(in.rs1) + ", " + imm;
    case Format::S: return n + " " + x(in.rs2) + ", " + imm + "(" + x(in.rs1) + ")";
    case Format::B: return n + " " + x(in.rs1) + ", " + x(in.rs2) + ", " + imm;
    case Format::J: return n + " " + x(in.rd) + ", " + imm;
    case Format::U: {
      char buf[16];
      std::snprintf(buf, sizeof buf, "0x%05x", static_cast<std::uint32_t>(in.imm) >> 12);
      return n + " " + x(in.rd) + ", " + buf;
    }
    case Format::SYSTEM: break;
  }
  return n;
}

}  // namespace rvlab
