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
 * @file emulator.hpp
 * @brief Instruction-accurate reference model. Its commit trace is the golden
 * output every timing model is checked against.
 *
 * Conventions:
 *  - reset: pc = image entry point (0 by default), registers zero, memory
 *    zero except for the image;
 *  - ECALL retires (one commit record) and halts with exit code a0, whatever
 *    a7 holds;
 *  - EBREAK, illegal words, misaligned or out-of-range accesses and
 *    misaligned jump targets fault without retiring.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "rvlab/commit.hpp"
#include "rvlab/execute.hpp"
#include "rvlab/isa.hpp"
#include "rvlab/memory.hpp"
#include "rvlab/run_result.hpp"

namespace rvlab {

struct ArchState {
  std::uint32_t pc = 0;
  RegisterFile regs{};
  SparseMemory mem;
  std::uint64_t instret = 0;

  explicit ArchState(std::uint32_t address_space = kDefaultAddressSpace) : mem(address_space) {}

  static ArchState from_image(const MemoryImage& image, std::uint32_t address_space = kDefaultAddressSpace) {
    ArchState s(address_space);
    s.mem.load(image);
    s.pc = image.entry_point;
    return s;
  }

  void write_reg(RegisterIndex r, std::uint32_t v) {
    if (!r.is_zero()) regs[r.value()] = v;
  }
};

inline RegisterFile regfile_snapshot(const ArchState& s) { return s.regs; }

struct StepResult {
  std::optional<CommitRecord> record;
  std::optional<ExitStatus> exit;
};

/// Fetch check shared by all models: pc must be word aligned and inside memory.
inline std::optional<Fault> fetch_fault(std::uint32_t pc, const SparseMemory& mem) {
  if (pc & 3) return Fault{FaultCause::misaligned_target, pc, pc};
  if (!mem.in_range(pc, 4)) return Fault{FaultCause::fetch_out_of_range, pc, pc};
  return std::nullopt;
}

inline StepResult step(ArchState& s) {
  const std::uint32_t pc = s.pc;
  if (auto f = fetch_fault(pc, s.mem)) return {std::nullopt, ExitStatus::from_fault(*f)};

  const std::uint32_t word = s.mem.read(pc, 4);
  const auto in = try_decode(word);
  if (!in) return {std::nullopt, ExitStatus::from_fault({FaultCause::illegal_instruction, pc, word})};

  const Effects fx = evaluate(*in, pc, s.regs[in->rs1.value()], s.regs[in->rs2.value()], s.mem.size());
  if (fx.fault) return {std::nullopt, ExitStatus::from_fault(*fx.fault)};

  std::uint32_t rd_value = fx.result.value_or(0);
  std::uint32_t mem_data = 0;
  if (fx.mem_op == MemOp::load) {
    mem_data = s.mem.read(fx.mem_addr, fx.mem_width);
    rd_value = extend_load(in->mnemonic, mem_data);
  } else if (fx.mem_op == MemOp::store) {
    mem_data = fx.store_data;
    s.mem.write(fx.mem_addr, fx.mem_width, fx.store_data);
  }
  if (in->uses_rd()) s.write_reg(in->rd, rd_value);

  StepResult out;
  out.record = make_record(s.instret, s.instret, pc, *in, fx, rd_value, mem_data);
  ++s.instret;
  s.pc = fx.next_pc;
  if (fx.ecall) out.exit = ExitStatus::halted(s.regs[10]);
  return out;
}

/// Steps until halt, fault, or `max_instr` retirements. Each commit record is
/// passed to `sink` in order.
template <typename Sink>
ExitStatus run(ArchState& s, std::uint64_t max_instr, Sink&& sink) {
  for (std::uint64_t n = 0; n < max_instr; ++n) {
    StepResult r = step(s);
    if (r.record) sink(std::as_const(*r.record));
    if (r.exit) return *r.exit;
  }
  return ExitStatus::limit("instruction budget of " + std::to_string(max_instr) + " exhausted");
}

struct ReferenceOptions {
  Limits limits;
  std::uint32_t address_space = kDefaultAddressSpace;
  bool snapshots = false;
};

inline RunOutput run_reference(const MemoryImage& image, const ReferenceOptions& opt = {}) {
  ArchState s = ArchState::from_image(image, opt.address_space);
  RunOutput out;
  out.exit = run(s, opt.limits.max_instr, [&](const CommitRecord& r) {
    out.trace.push_back(r);
    if (opt.snapshots) out.snapshots.push_back({r.seq, s.regs});
  });
  out.stats.instructions = out.stats.cycles = s.instret;
  out.regs = s.regs;
  out.memory = std::move(s.mem);
  return out;
}

}  // namespace rvlab
