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
 * @file testgen.hpp
 * @brief Seeded constrained-random generator of terminating RV32I programs.
 *
 * Programs are correct by construction rather than filtered afterwards:
 *  - x5 (loop counter), x6 (data base), x7 (address scratch) and x1 (return
 *    address) are never targets of random writes;
 *  - loops count x5 down from a trip count in [1, max_loop_trip] and are
 *    never nested; every other branch or jump goes forward;
 *  - every address is x6 plus an in-range aligned offset, an in-range mask of
 *    a random register plus x6, or an absolute in-range constant in x7;
 *  - the program ends by folding every random register into a0 with XOR and
 *    executing ecall with a7 = 93.
 *
 * Output depends only on the config. The generator draws from mt19937_64 with
 * its own bounded-integer reduction, so the bytes are the same everywhere.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvlab/assembler.hpp"
#include "rvlab/error.hpp"
#include "rvlab/memory.hpp"
#include "rvlab/trace_io.hpp"

namespace rvlab {

enum class TestClass : std::uint8_t { alu, mem, branch, hazard, mixed };

inline constexpr std::array<TestClass, 5> kAllClasses = {TestClass::alu, TestClass::mem, TestClass::branch,
                                                         TestClass::hazard, TestClass::mixed};

inline const char* to_string(TestClass c) {
  switch (c) {
    case TestClass::alu: return "alu";
    case TestClass::mem: return "mem";
    case TestClass::branch: return "branch";
    case TestClass::hazard: return "hazard";
    case TestClass::mixed: return "mixed";
  }
  return "?";
}

inline std::optional<TestClass> test_class_from_string(std::string_view s) {
  for (TestClass c : kAllClasses) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

struct GenConfig {
  std::uint64_t seed = 1;
  TestClass cls = TestClass::alu;
  std::uint32_t instr_count = 100;
  std::uint32_t data_bytes = 4096;
  std::uint32_t max_loop_trip = 16;

  static constexpr std::uint32_t kMaxInstrCount = 8000;  // keeps text below the data base

  void validate() const {
    if (instr_count > kMaxInstrCount) throw ConfigError("instr_count must be <= " + std::to_string(kMaxInstrCount));
    if (data_bytes < 16 || data_bytes > 0x10000 || (data_bytes & (data_bytes - 1)) != 0) {
      throw ConfigError("data_bytes must be a power of two in [16, 65536]");
    }
    if (max_loop_trip < 1 || max_loop_trip > 2047) throw ConfigError("max_loop_trip must be in [1, 2047]");
  }

  /// Retirement budget that a generated program provably stays under.
  std::uint64_t budget() const {
    return 100ull * std::max<std::uint64_t>(instr_count, 1) * max_loop_trip;
  }
};

struct TestProgram {
  std::string name;
  std::string asm_text;
  MemoryImage image;
  GenConfig config;

  std::string meta_text() const {
    std::string m;
    m += "name=" + name + "\n";
    m += "seed=" + std::to_string(config.seed) + "\n";
    m += std::string("class=") + to_string(config.cls) + "\n";
    m += "instr_count=" + std::to_string(config.instr_count) + "\n";
    m += "data_bytes=" + std::to_string(config.data_bytes) + "\n";
    m += "max_loop_trip=" + std::to_string(config.max_loop_trip) + "\n";
    m += "expected=halted\n";
    m += "budget=" + std::to_string(config.budget()) + "\n";
    return m;
  }
};

namespace gen_detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n). Rejection sampling; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool chance(unsigned percent) { return below(100) < percent; }
  std::uint32_t word() { return static_cast<std::uint32_t>(engine_() >> 32); }

  template <typename T, std::size_t N>
  const T& pick(const std::array<T, N>& a) {
    return a[below(N)];
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr unsigned kLoopReg = 5;
inline constexpr unsigned kBaseReg = 6;
inline constexpr unsigned kScratchReg = 7;

inline const std::vector<unsigned>& pool() {
  static const std::vector<unsigned> regs = [] {
    std::vector<unsigned> r = {2, 3, 4};
    for (unsigned i = 8; i < 32; ++i) r.push_back(i);
    return r;
  }();
  return regs;
}

inline std::string x(unsigned r) { return "x" + std::to_string(r); }

class Generator {
 public:
  explicit Generator(const GenConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed * 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(cfg.cls) + 1)) {}

  std::string run() {
    std::string out;
    out += "# rvlab generated test: class=" + std::string(to_string(cfg_.cls)) +
           " seed=" + std::to_string(cfg_.seed) + " instrs=" + std::to_string(cfg_.instr_count) + "\n";
    out += ".text\n_start:\n";
    if (cfg_.instr_count == 0) {
      out += "    li a7, 93\n    li a0, 0\n    ecall\n";
      return out;
    }

    buf_ = &main_;
    ins("lui " + x(kBaseReg) + ", " + std::to_string(kDataBase >> 12));
    emitted_ = 0;
    const unsigned seeds = std::min<unsigned>(4, cfg_.instr_count);
    for (unsigned i = 0; i < seeds; ++i) {
      const unsigned r = rng_.pick(pool());
      ins("li " + x(r) + ", " + std::to_string(static_cast<std::int32_t>(rng_.word())));
      note_write(r);
    }
    while (emitted_ < cfg_.instr_count) snippet();

    ins("li " + x(kScratchReg) + ", 0");
    for (unsigned r : pool()) ins("xor " + x(kScratchReg) + ", " + x(kScratchReg) + ", " + x(r));
    ins("li a7, 93");
    ins("mv a0, " + x(kScratchReg));
    ins("ecall");

    out += main_;
    out += functions_;
    out += ".data\n";
    const unsigned words = std::min<unsigned>(cfg_.data_bytes / 4, 32);
    for (unsigned i = 0; i < words; ++i) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "    .word 0x%08x\n", rng_.word());
      out += buf;
    }
    return out;
  }

 private:
  void ins(const std::string& s) {
    *buf_ += "    " + s + "\n";
    ++emitted_;
  }
  void label(const std::string& l) { *buf_ += l + ":\n"; }
  std::string fresh(const char* stem) { return std::string(stem) + "_" + std::to_string(labels_++); }

  void note_write(unsigned r) {
    recent_.push_back(r);
    if (recent_.size() > 3) recent_.erase(recent_.begin());
  }
  unsigned dst() { return rng_.pick(pool()); }
  unsigned src() {
    if (!recent_.empty() && rng_.chance(60)) return rng_.pick(recent_);
    return rng_.chance(10) ? 0 : rng_.pick(pool());
  }

  // ---- instruction-level pieces

  void alu_op(std::optional<unsigned> forced_src = std::nullopt) {
    static constexpr std::array<const char*, 10> kR = {"add", "sub", "sll", "slt", "sltu",
                                                       "xor", "srl", "sra", "or",  "and"};
    static constexpr std::array<const char*, 6> kI = {"addi", "slti", "sltiu", "xori", "ori", "andi"};
    static constexpr std::array<const char*, 3> kShift = {"slli", "srli", "srai"};
    const unsigned rd = dst();
    const unsigned a = forced_src.value_or(src());
    const auto kind = rng_.below(100);
    if (kind < 45) {
      const unsigned b = src();
      ins(std::string(rng_.pick(kR)) + " " + x(rd) + ", " + x(a) + ", " + x(b));
    } else if (kind < 75) {
      ins(std::string(rng_.pick(kI)) + " " + x(rd) + ", " + x(a) + ", " + std::to_string(rng_.range(-2048, 2047)));
    } else if (kind < 90) {
      ins(std::string(rng_.pick(kShift)) + " " + x(rd) + ", " + x(a) + ", " + std::to_string(rng_.range(0, 31)));
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "0x%05x", static_cast<unsigned>(rng_.below(1u << 20)));
      ins(std::string(rng_.chance(50) ? "lui " : "auipc ") + x(rd) + ", " + buf);
    }
    note_write(rd);
  }

  struct Address {
    std::string operand;  // "off(xN)"
  };

  // Materialises an in-range address for an access of `width` bytes.
  Address address(unsigned width) {
    const std::uint32_t window = std::min<std::uint32_t>(cfg_.data_bytes, 2048);
    const auto mode = rng_.below(100);
    if (mode < 50) {
      const std::uint32_t off = static_cast<std::uint32_t>(rng_.below((window - width) / width + 1)) * width;
      return {std::to_string(off) + "(" + x(kBaseReg) + ")"};
    }
    if (mode < 80) {
      const std::uint32_t mask = (window - 1) & ~(width - 1);
      ins("andi " + x(kScratchReg) + ", " + x(src()) + ", " + std::to_string(mask));
      ins("add " + x(kScratchReg) + ", " + x(kScratchReg) + ", " + x(kBaseReg));
      return {"0(" + x(kScratchReg) + ")"};
    }
    const std::uint32_t off = static_cast<std::uint32_t>(rng_.below((cfg_.data_bytes - width) / width + 1)) * width;
    ins("li " + x(kScratchReg) + ", " + std::to_string(kDataBase + off));
    return {"0(" + x(kScratchReg) + ")"};
  }

  static const char* store_for(unsigned w) { return w == 1 ? "sb" : w == 2 ? "sh" : "sw"; }
  const char* load_for(unsigned w) {
    if (w == 4) return "lw";
    const bool u = rng_.chance(50);
    return w == 1 ? (u ? "lbu" : "lb") : (u ? "lhu" : "lh");
  }
  unsigned width() {
    static constexpr std::array<unsigned, 4> kW = {1, 2, 4, 4};
    return rng_.pick(kW);
  }

  // ---- snippets

  void mem_block() {
    const unsigned n = static_cast<unsigned>(rng_.range(1, 3));
    std::vector<std::pair<Address, unsigned>> slots;
    for (unsigned i = 0; i < n; ++i) {
      const unsigned w = width();
      Address a = address(w);
      ins(std::string(store_for(w)) + " " + x(src()) + ", " + a.operand);
      if (a.operand.find(x(kScratchReg)) != std::string::npos) {
        // x7 may be rebuilt by the next address; reload right away
        const unsigned rd = dst();
        ins(std::string(load_for(w)) + " " + x(rd) + ", " + a.operand);
        note_write(rd);
      } else {
        slots.emplace_back(std::move(a), w);
      }
    }
    for (const auto& [a, w] : slots) {
      const unsigned rd = dst();
      ins(std::string(load_for(w)) + " " + x(rd) + ", " + a.operand);
      note_write(rd);
      if (rng_.chance(50)) alu_op(rd);
    }
  }

  void forward_branch(bool allow_mem) {
    static constexpr std::array<const char*, 6> kB = {"beq", "bne", "blt", "bge", "bltu", "bgeu"};
    const std::string skip = fresh("skip");
    ins(std::string(rng_.pick(kB)) + " " + x(src()) + ", " + x(src()) + ", " + skip);
    const auto n = rng_.range(1, 4);
    for (std::int64_t i = 0; i < n; ++i) {
      if (allow_mem && rng_.chance(20)) mem_block();
      else alu_op();
    }
    label(skip);
  }

  void counted_loop() {
    const std::string top = fresh("loop");
    ins("li " + x(kLoopReg) + ", " + std::to_string(rng_.range(1, cfg_.max_loop_trip)));
    label(top);
    const auto n = rng_.range(2, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = rng_.below(100);
      if (k < 20) forward_branch(false);
      else if (k < 35) mem_block();
      else alu_op();
    }
    ins("addi " + x(kLoopReg) + ", " + x(kLoopReg) + ", -1");
    ins("bne " + x(kLoopReg) + ", x0, " + top);
  }

  void raw_chain() {
    unsigned prev = src();
    const auto n = rng_.range(3, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      alu_op(prev);
      prev = recent_.back();
    }
  }

  void load_use() {
    const unsigned w = width();
    const Address a = address(w);
    const unsigned rd = dst();
    ins(std::string(load_for(w)) + " " + x(rd) + ", " + a.operand);
    note_write(rd);
    switch (rng_.below(4)) {
      case 0: {
        const std::string skip = fresh("skip");
        ins("beq " + x(rd) + ", " + x(src()) + ", " + skip);
        alu_op();
        label(skip);
        break;
      }
      case 1: {
        const unsigned w2 = width();
        const std::uint32_t window = std::min<std::uint32_t>(cfg_.data_bytes, 2048);
        const auto off = static_cast<std::uint32_t>(rng_.below((window - w2) / w2 + 1)) * w2;
        ins(std::string(store_for(w2)) + " " + x(rd) + ", " + std::to_string(off) + "(" + x(kBaseReg) + ")");
        break;
      }
      case 2:
        // one independent instruction between: forwarded from MEM/WB, no stall
        alu_op();
        alu_op(rd);
        break;
      default:
        alu_op(rd);
        break;
    }
  }

  void compare_branch() {
    static constexpr std::array<const char*, 4> kCmp = {"slt", "sltu", "xor", "sub"};
    const unsigned t = dst();
    ins(std::string(rng_.pick(kCmp)) + " " + x(t) + ", " + x(src()) + ", " + x(src()));
    note_write(t);
    const std::string skip = fresh("skip");
    ins(std::string(rng_.chance(50) ? "bne " : "beq ") + x(t) + ", x0, " + skip);
    const auto n = rng_.range(1, 3);
    for (std::int64_t i = 0; i < n; ++i) alu_op(t);
    label(skip);
  }

  void call() {
    const std::string fn = fresh("func");
    ins("jal x1, " + fn);
    std::string* saved = buf_;
    buf_ = &functions_;
    label(fn);
    const auto n = rng_.range(1, 5);
    for (std::int64_t i = 0; i < n; ++i) {
      if (rng_.chance(25)) mem_block();
      else alu_op();
    }
    ins("ret");
    buf_ = saved;
  }

  void hazard() {
    switch (rng_.below(4)) {
      case 0: raw_chain(); break;
      case 1: case 2: load_use(); break;
      default: compare_branch(); break;
    }
  }

  void snippet() {
    switch (cfg_.cls) {
      case TestClass::alu:
        if (rng_.chance(50)) raw_chain();
        else alu_op();
        break;
      case TestClass::mem:
        if (rng_.chance(70)) mem_block();
        else alu_op();
        break;
      case TestClass::branch:
        if (rng_.chance(40)) forward_branch(false);
        else if (rng_.chance(50)) counted_loop();
        else alu_op();
        break;
      case TestClass::hazard:
        if (rng_.chance(80)) hazard();
        else alu_op();
        break;
      case TestClass::mixed: {
        const auto k = rng_.below(100);
        if (k < 30) alu_op();
        else if (k < 50) mem_block();
        else if (k < 62) forward_branch(true);
        else if (k < 72) counted_loop();
        else if (k < 90) hazard();
        else call();
        break;
      }
    }
  }

  GenConfig cfg_;
  Rng rng_;
  std::string main_;
  std::string functions_;
  std::string* buf_ = &main_;
  unsigned emitted_ = 0;
  unsigned labels_ = 0;
  std::vector<unsigned> recent_;
};

}  // namespace gen_detail

inline std::string program_name(const GenConfig& cfg) {
  return std::string(to_string(cfg.cls)) + "_" + std::to_string(cfg.seed);
}

inline TestProgram generate(const GenConfig& cfg) {
  cfg.validate();
  TestProgram p;
  p.config = cfg;
  p.name = program_name(cfg);
  p.asm_text = gen_detail::Generator(cfg).run();
  p.image = assemble(p.asm_text);
  return p;
}

/// Writes `<name>.s`, `<name>.hex` and `<name>.meta` per config, then
/// `manifest.txt` listing the names in config order.
inline std::vector<std::string> emit_suite(const std::vector<GenConfig>& configs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  std::string manifest;
  for (const GenConfig& cfg : configs) {
    const TestProgram p = generate(cfg);
    io_detail::spit((dir / (p.name + ".s")).string(), p.asm_text);
    io_detail::spit((dir / (p.name + ".hex")).string(), format_hex(p.image));
    io_detail::spit((dir / (p.name + ".meta")).string(), p.meta_text());
    manifest += p.name + "\n";
    names.push_back(p.name);
  }
  io_detail::spit((dir / "manifest.txt").string(), manifest);
  return names;
}

/// Names listed in `<dir>/manifest.txt`, in order.
inline std::vector<std::string> read_manifest(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  io_detail::for_each_line(io_detail::slurp((dir / "manifest.txt").string()),
                           [&](std::size_t, std::string_view line) {
                             if (!line.empty()) names.emplace_back(line);
                           });
  return names;
}

}  // namespace rvlab
