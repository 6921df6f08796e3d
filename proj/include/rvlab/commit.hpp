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

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace rvlab {

enum class MemOp : std::uint8_t { none, load, store };

/// Architectural effects of one retired instruction. `rd` is present exactly
/// when a register other than x0 is written; the mem fields exactly when
/// mem_op != none. Sub-word mem_data is zero-extended.
struct CommitRecord {
  std::uint64_t seq = 0;
  std::uint64_t cycle = 0;
  std::uint32_t pc = 0;
  std::uint32_t raw = 0;
  std::optional<std::uint8_t> rd;
  std::optional<std::uint32_t> rd_value;
  MemOp mem_op = MemOp::none;
  std::optional<std::uint32_t> mem_addr;
  std::optional<std::uint32_t> mem_data;

  bool operator==(const CommitRecord&) const = default;
};

using Trace = std::vector<CommitRecord>;
using RegisterFile = std::array<std::uint32_t, 32>;

struct RegSnapshot {
  std::uint64_t seq = 0;
  RegisterFile regs{};
  bool operator==(const RegSnapshot&) const = default;
};

enum class FaultCause : std::uint8_t {
  illegal_instruction,
  breakpoint,
  fetch_out_of_range,
  misaligned_target,
  misaligned_access,
  access_out_of_range,
};

inline const char* to_string(FaultCause c) {
  switch (c) {
    case FaultCause::illegal_instruction: return "illegal instruction";
    case FaultCause::breakpoint: return "breakpoint";
    case FaultCause::fetch_out_of_range: return "instruction fetch outside address space";
    case FaultCause::misaligned_target: return "misaligned jump/branch target";
    case FaultCause::misaligned_access: return "misaligned memory access";
    case FaultCause::access_out_of_range: return "memory access outside address space";
  }
  return "?";
}

struct Fault {
  FaultCause cause;
  std::uint32_t pc;
  std::uint32_t value;  // offending word, target or address depending on cause

  bool operator==(const Fault&) const = default;
};

struct ExitStatus {
  enum class Kind : std::uint8_t { halted, limit_exceeded, fault };

  Kind kind = Kind::halted;
  std::uint32_t exit_code = 0;
  std::optional<Fault> fault;
  std::string detail;

  static ExitStatus halted(std::uint32_t code) {
    return {Kind::halted, code, std::nullopt, "halted with exit code " + std::to_string(code)};
  }
  static ExitStatus limit(std::string why) { return {Kind::limit_exceeded, 0, std::nullopt, std::move(why)}; }
  static ExitStatus from_fault(const Fault& f) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "fault at pc=0x%08x: %s (0x%08x)", f.pc, to_string(f.cause), f.value);
    return {Kind::fault, 0, f, buf};
  }

  bool operator==(const ExitStatus&) const = default;
};

inline const char* to_string(ExitStatus::Kind k) {
  switch (k) {
    case ExitStatus::Kind::halted: return "halted";
    case ExitStatus::Kind::limit_exceeded: return "limit_exceeded";
    case ExitStatus::Kind::fault: return "fault";
  }
  return "?";
}

struct Limits {
  std::uint64_t max_instr = 1'000'000;
  std::uint64_t max_cycles = 10'000'000;
};

/// Cycle accounting shared by the timing models. For terminating pipeline
/// runs: cycles = instructions + 4 + stall_cycles + flush_cycles + memory_stall_cycles.
struct TimingStats {
  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t flush_cycles = 0;
  std::uint64_t memory_stall_cycles = 0;
  std::uint64_t branches = 0;
  std::uint64_t mispredicts = 0;

  double cpi() const { return instructions == 0 ? 0.0 : static_cast<double>(cycles) / static_cast<double>(instructions); }
};

}  // namespace rvlab
