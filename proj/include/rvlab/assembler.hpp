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
 * @file assembler.hpp
 * @brief Two-pass RV32I assembler for generated and hand-written tests.
 *
 * Grammar (one statement per line, `#` starts a comment):
 *   label:            any number of labels may precede a statement
 *   .text / .data     select section; text starts at 0x0, data at 0x10000
 *   .org ADDR         move the current section's location counter (4-aligned)
 *   .word N[, N...]   32-bit words; N may be a number or a label
 *   <mnemonic> ops    any RV32I instruction in disassembler syntax, plus the
 *                     pseudo-ops nop, li, mv, j, ret and halt (= ecall)
 *
 * Branch and jump targets are labels or numeric pc-relative offsets.
 * `li` expands to one addi when the value fits in 12 signed bits, otherwise
 * to lui + addi.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvlab/error.hpp"
#include "rvlab/isa.hpp"
#include "rvlab/memory.hpp"

namespace rvlab {

namespace asm_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$'; }

inline bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-') return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

inline std::optional<unsigned> parse_register(std::string_view s) {
  static constexpr std::array<std::string_view, 32> kAbi = {
      "zero", "ra", "sp", "gp", "tp",  "t0",  "t1", "t2", "s0", "s1", "a0", "a1", "a2", "a3", "a4", "a5",
      "a6",   "a7", "s2", "s3", "s4",  "s5",  "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};
  if (s.size() >= 2 && s[0] == 'x') {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && v < 32 && (s.size() == 2 || s[1] != '0')) return v;
    return std::nullopt;
  }
  if (s == "fp") return 8u;
  for (unsigned i = 0; i < 32; ++i) {
    if (kAbi[i] == s) return i;
  }
  return std::nullopt;
}

/// Decimal or 0x-hex integer with optional sign, within [-2^31, 2^32).
inline std::optional<std::int64_t> parse_number(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  const std::int64_t r = neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
  if (v > 0xffffffffull || r < -(std::int64_t{1} << 31)) return std::nullopt;
  return r;
}

inline std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = s.find(',', pos);
    out.push_back(trim(s.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

struct Statement {
  std::size_t line = 0;
  std::uint32_t addr = 0;
  bool is_word = false;
  std::string mnemonic;
  std::vector<std::string> operands;
  unsigned size = 4;
};

inline bool fits12(std::int64_t v) {
  const auto s = static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
  return s >= -2048 && s <= 2047;
}

}  // namespace asm_detail

class Assembler {
 public:
  MemoryImage assemble(std::string_view text) {
    statements_.clear();
    labels_.clear();
    first_pass(text);
    return second_pass();
  }

  const std::map<std::string, std::uint32_t, std::less<>>& labels() const { return labels_; }

 private:
  using Statement = asm_detail::Statement;

  [[noreturn]] static void fail(std::size_t line, const std::string& why) { throw ParseError(line, why); }

  void first_pass(std::string_view text) {
    using namespace asm_detail;
    std::uint32_t lc[2] = {kTextBase, kDataBase};
    int section = 0;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++lineno;
      if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
      line = trim(line);

      // leading labels
      while (true) {
        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) break;
        const std::string_view name = trim(line.substr(0, colon));
        if (!is_identifier(name)) break;
        if (!labels_.emplace(std::string(name), lc[section]).second) {
          fail(lineno, "duplicate label '" + std::string(name) + "'");
        }
        line = trim(line.substr(colon + 1));
      }
      if (line.empty()) {
        if (nl == text.size()) break;
        continue;
      }

      std::size_t sp = 0;
      while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
      std::string op(line.substr(0, sp));
      std::transform(op.begin(), op.end(), op.begin(), [](unsigned char c) { return std::tolower(c); });
      const auto ops = split_operands(line.substr(sp));

      if (op == ".text" || op == ".data") {
        if (!ops.empty()) fail(lineno, op + " takes no operands");
        section = op == ".text" ? 0 : 1;
      } else if (op == ".org") {
        if (ops.size() != 1) fail(lineno, ".org takes one address");
        const auto v = parse_number(ops[0]);
        if (!v || *v < 0) fail(lineno, "bad .org address '" + std::string(ops[0]) + "'");
        if (*v % 4 != 0) fail(lineno, "misaligned .org address '" + std::string(ops[0]) + "'");
        lc[section] = static_cast<std::uint32_t>(*v);
      } else if (op == ".word") {
        if (ops.empty()) fail(lineno, ".word needs at least one value");
        for (auto o : ops) {
          Statement s;
          s.line = lineno;
          s.addr = lc[section];
          s.is_word = true;
          s.operands = {std::string(o)};
          statements_.push_back(std::move(s));
          lc[section] += 4;
        }
      } else if (!op.empty() && op[0] == '.') {
        fail(lineno, "unknown directive '" + op + "'");
      } else {
        Statement s;
        s.line = lineno;
        s.addr = lc[section];
        s.mnemonic = op;
        for (auto o : ops) s.operands.emplace_back(o);
        if (op == "li") {
          if (s.operands.size() != 2) fail(lineno, "li takes a register and a constant");
          const auto v = parse_number(s.operands[1]);
          if (!v) fail(lineno, "li requires a numeric constant, got '" + s.operands[1] + "'");
          s.size = fits12(*v) ? 4 : 8;
        }
        lc[section] += s.size;
        statements_.push_back(std::move(s));
      }
      if (nl == text.size()) break;
    }
  }

  MemoryImage second_pass() {
    MemoryImage img;
    for (const Statement& s : statements_) {
      std::vector<std::uint32_t> words;
      if (s.is_word) {
        words.push_back(static_cast<std::uint32_t>(value_or_label(s, s.operands[0])));
      } else {
        try {
          for (const Instruction& in : expand(s)) words.push_back(encode(in));
        } catch (const ImmediateOutOfRange& e) {
          fail(s.line, e.what());
        } catch (const std::out_of_range& e) {
          fail(s.line, e.what());
        }
      }
      std::uint32_t addr = s.addr;
      for (std::uint32_t w : words) {
        if (img.bytes.count(addr)) fail(s.line, "overlapping output at address " + std::to_string(addr));
        img.write_word(addr, w);
        addr += 4;
      }
    }
    return img;
  }

  std::int64_t value_or_label(const Statement& s, std::string_view text) const {
    if (auto v = asm_detail::parse_number(text)) return *v;
    if (asm_detail::is_identifier(text)) {
      auto it = labels_.find(text);
      if (it == labels_.end()) fail(s.line, "undefined label '" + std::string(text) + "'");
      return it->second;
    }
    fail(s.line, "bad value '" + std::string(text) + "'");
  }

  unsigned reg(const Statement& s, std::string_view text) const {
    if (auto r = asm_detail::parse_register(text)) return *r;
    fail(s.line, "unknown register '" + std::string(text) + "'");
  }

  std::int32_t imm(const Statement& s, std::string_view text) const {
    const auto v = asm_detail::parse_number(text);
    if (!v) fail(s.line, "bad immediate '" + std::string(text) + "'");
    if (*v > 0x7fffffff) fail(s.line, "immediate '" + std::string(text) + "' out of range");
    return static_cast<std::int32_t>(*v);
  }

  // Label (pc-relative distance) or literal offset.
  std::int32_t target(const Statement& s, std::string_view text, unsigned bits) const {
    std::int64_t off = 0;
    if (auto v = asm_detail::parse_number(text)) {
      off = *v;
    } else if (asm_detail::is_identifier(text)) {
      auto it = labels_.find(text);
      if (it == labels_.end()) fail(s.line, "undefined label '" + std::string(text) + "'");
      off = std::int64_t{it->second} - std::int64_t{s.addr};
    } else {
      fail(s.line, "bad branch target '" + std::string(text) + "'");
    }
    if (!detail::fits_signed(off, bits)) {
      fail(s.line, "branch offset " + std::to_string(off) + " to '" + std::string(text) + "' out of range");
    }
    return static_cast<std::int32_t>(off);
  }

  // "imm(reg)" or "(reg)"
  std::pair<std::int32_t, unsigned> mem_operand(const Statement& s, std::string_view text) const {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close != text.size() - 1 || close < open) {
      fail(s.line, "bad memory operand '" + std::string(text) + "'");
    }
    const auto off = asm_detail::trim(text.substr(0, open));
    const auto base = asm_detail::trim(text.substr(open + 1, close - open - 1));
    return {off.empty() ? 0 : imm(s, off), reg(s, base)};
  }

  void arity(const Statement& s, std::size_t n) const {
    if (s.operands.size() != n) {
      fail(s.line, s.mnemonic + " expects " + std::to_string(n) + " operand(s), got " + std::to_string(s.operands.size()));
    }
  }

  static unsigned fence_bits(const Statement& s, std::string_view t) {
    if (t == "0") return 0;
    unsigned b = 0;
    for (char c : t) {
      switch (c) {
        case 'i': b |= 8; break;
        case 'o': b |= 4; break;
        case 'r': b |= 2; break;
        case 'w': b |= 1; break;
        default: fail(s.line, "bad fence set '" + std::string(t) + "'");
      }
    }
    return b;
  }

  std::vector<Instruction> expand(const Statement& s) const {
    const auto& o = s.operands;
    const std::string& op = s.mnemonic;
    using M = Mnemonic;

    if (op == "nop") {
      arity(s, 0);
      return {make_instruction(M::ADDI)};
    }
    if (op == "halt") {
      arity(s, 0);
      return {make_instruction(M::ECALL)};
    }
    if (op == "mv") {
      arity(s, 2);
      return {make_instruction(M::ADDI, reg(s, o[0]), reg(s, o[1]))};
    }
    if (op == "j") {
      arity(s, 1);
      return {make_instruction(M::JAL, 0, 0, 0, target(s, o[0], 21))};
    }
    if (op == "ret") {
      arity(s, 0);
      return {make_instruction(M::JALR, 0, 1, 0, 0)};
    }
    if (op == "li") {
      const unsigned rd = reg(s, o[0]);
      const auto u = static_cast<std::uint32_t>(*asm_detail::parse_number(o[1]));
      if (s.size == 4) return {make_instruction(M::ADDI, rd, 0, 0, static_cast<std::int32_t>(u))};
      const std::uint32_t hi = (u + 0x800u) & 0xfffff000u;
      const auto lo = static_cast<std::int32_t>(u - hi);
      return {make_instruction(M::LUI, rd, 0, 0, static_cast<std::int32_t>(hi)),
              make_instruction(M::ADDI, rd, rd, 0, lo)};
    }

    const auto m = mnemonic_from_name(op);
    if (!m) fail(s.line, "unknown mnemonic '" + op + "'");

    switch (*m) {
      case M::ECALL: case M::EBREAK:
        arity(s, 0);
        return {make_instruction(*m)};
      case M::FENCE:
        if (o.empty()) return {make_instruction(M::FENCE, 0, 0, 0, 0xff)};
        arity(s, 2);
        return {make_instruction(M::FENCE, 0, 0, 0, static_cast<std::int32_t>((fence_bits(s, o[0]) << 4) | fence_bits(s, o[1])))};
      case M::LUI: case M::AUIPC: {
        arity(s, 2);
        const auto v = imm(s, o[1]);
        if (v < -(1 << 19) || v > 0xfffff) fail(s.line, "upper immediate '" + o[1] + "' out of range");
        return {make_instruction(*m, reg(s, o[0]), 0, 0, static_cast<std::int32_t>(static_cast<std::uint32_t>(v) << 12))};
      }
      case M::JAL:
        if (o.size() == 1) return {make_instruction(M::JAL, 1, 0, 0, target(s, o[0], 21))};
        arity(s, 2);
        return {make_instruction(M::JAL, reg(s, o[0]), 0, 0, target(s, o[1], 21))};
      case M::JALR:
        if (o.size() == 1) return {make_instruction(M::JALR, 1, reg(s, o[0]), 0, 0)};
        if (o.size() == 3) return {make_instruction(M::JALR, reg(s, o[0]), reg(s, o[1]), 0, imm(s, o[2]))};
        arity(s, 2);
        {
          const auto [off, base] = mem_operand(s, o[1]);
          return {make_instruction(M::JALR, reg(s, o[0]), base, 0, off)};
        }
      default:
        break;
    }
    if (is_branch(*m)) {
      arity(s, 3);
      return {make_instruction(*m, 0, reg(s, o[0]), reg(s, o[1]), target(s, o[2], 13))};
    }
    if (is_load(*m)) {
      arity(s, 2);
      const auto [off, base] = mem_operand(s, o[1]);
      return {make_instruction(*m, reg(s, o[0]), base, 0, off)};
    }
    if (is_store(*m)) {
      arity(s, 2);
      const auto [off, base] = mem_operand(s, o[1]);
      return {make_instruction(*m, 0, base, reg(s, o[0]), off)};
    }
    if (info(*m).format == Format::R) {
      arity(s, 3);
      return {make_instruction(*m, reg(s, o[0]), reg(s, o[1]), reg(s, o[2]))};
    }
    arity(s, 3);
    return {make_instruction(*m, reg(s, o[0]), reg(s, o[1]), 0, imm(s, o[2]))};
  }

  std::vector<Statement> statements_;
  std::map<std::string, std::uint32_t, std::less<>> labels_;
};

inline MemoryImage assemble(std::string_view text) { return Assembler{}.assemble(text); }

}  // namespace rvlab
