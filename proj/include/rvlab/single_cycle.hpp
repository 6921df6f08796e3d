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

// Single-cycle core: fetch, decode, register read, execute, memory and
// write-back all complete within one cycle, so commit cycle == seq and
// CPI is exactly 1. Only ideal memory makes sense here.

#pragma once

#include <cstdint>
#include <utility>

#include "rvlab/emulator.hpp"
#include "rvlab/error.hpp"
#include "rvlab/execute.hpp"
#include "rvlab/mem_hierarchy.hpp"
#include "rvlab/run_result.hpp"

namespace rvlab {

struct SingleCycleConfig {
  MemConfig mem;
  Limits limits;
  std::uint32_t address_space = kDefaultAddressSpace;
  bool snapshots = false;
};

inline RunOutput run_single_cycle(const MemoryImage& image, const SingleCycleConfig& cfg = {}) {
  if (cfg.mem.model == MemModel::cached) throw ConfigError("cache requires pipelined mode");
  if (cfg.mem.model != MemModel::ideal) throw ConfigError("single-cycle mode requires ideal memory");

  SparseMemory mem(cfg.address_space);
  mem.load(image);
  MemorySystem timing(cfg.mem, cfg.address_space);
  RegisterFile regs{};
  std::uint32_t pc = image.entry_point;
  std::uint64_t cycle = 0;

  RunOutput out;
  auto finish = [&](ExitStatus st) {
    out.exit = std::move(st);
    out.stats.cycles = out.stats.instructions = cycle;
    out.regs = regs;
    out.memory = std::move(mem);
    return std::move(out);
  };

  while (true) {
    if (cycle >= cfg.limits.max_instr) {
      return finish(ExitStatus::limit("instruction budget of " + std::to_string(cfg.limits.max_instr) + " exhausted"));
    }
    if (cycle >= cfg.limits.max_cycles) {
      return finish(ExitStatus::limit("cycle budget of " + std::to_string(cfg.limits.max_cycles) + " exhausted"));
    }

    // IF
    if (auto f = fetch_fault(pc, mem)) return finish(ExitStatus::from_fault(*f));
    timing.access(pc, AccessKind::ifetch, 4);
    const std::uint32_t word = mem.read(pc, 4);

    // ID + register read
    const auto in = try_decode(word);
    if (!in) return finish(ExitStatus::from_fault({FaultCause::illegal_instruction, pc, word}));
    const std::uint32_t a = in->uses_rs1() ? regs[in->rs1.value()] : 0;
    const std::uint32_t b = in->uses_rs2() ? regs[in->rs2.value()] : 0;

    // EX
    const Effects fx = evaluate(*in, pc, a, b, mem.size());
    if (fx.fault) return finish(ExitStatus::from_fault(*fx.fault));
    if (is_control(in->mnemonic)) ++out.stats.branches;

    // MEM
    std::uint32_t wb = fx.result.value_or(0);
    std::uint32_t mem_data = 0;
    if (fx.mem_op == MemOp::load) {
      timing.access(fx.mem_addr, AccessKind::load, fx.mem_width);
      mem_data = mem.read(fx.mem_addr, fx.mem_width);
      wb = extend_load(in->mnemonic, mem_data);
    } else if (fx.mem_op == MemOp::store) {
      timing.access(fx.mem_addr, AccessKind::store, fx.mem_width);
      mem_data = fx.store_data;
      mem.write(fx.mem_addr, fx.mem_width, fx.store_data);
    }

    // WB
    if (in->writes_register()) regs[in->rd.value()] = wb;
    out.trace.push_back(make_record(cycle, cycle, pc, *in, fx, wb, mem_data));
    if (cfg.snapshots) out.snapshots.push_back({cycle, regs});
    ++cycle;
    pc = fx.next_pc;
    if (fx.ecall) return finish(ExitStatus::halted(regs[10]));
  }
}

}  // namespace rvlab
