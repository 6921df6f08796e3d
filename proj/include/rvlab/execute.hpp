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

// Datapath semantics of RV32I, independent of any timing model: given an
// instruction, its pc and operand values, compute what it does.

#pragma once

#include <cstdint>
#include <optional>

#include "rvlab/commit.hpp"
#include "rvlab/isa.hpp"

namespace rvlab {

inline std::uint32_t alu(Mnemonic m, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (m) {
    case Mnemonic::ADD: case Mnemonic::ADDI: return a + b;
    case Mnemonic::SUB: return a - b;
    case Mnemonic::SLL: case Mnemonic::SLLI: return a << (b & 31);
    case Mnemonic::SRL: case Mnemonic::SRLI: return a >> (b & 31);
    case Mnemonic::SRA: case Mnemonic::SRAI: return static_cast<std::uint32_t>(sa >> (b & 31));
    case Mnemonic::SLT: case Mnemonic::SLTI: return sa < sb ? 1 : 0;
    case Mnemonic::SLTU: case Mnemonic::SLTIU: return a < b ? 1 : 0;
    case Mnemonic::XOR: case Mnemonic::XORI: return a ^ b;
    case Mnemonic::OR: case Mnemonic::ORI: return a | b;
    case Mnemonic::AND: case Mnemonic::ANDI: return a & b;
    default: return 0;
  }
}

inline bool branch_taken(Mnemonic m, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (m) {
    case Mnemonic::BEQ: return a == b;
    case Mnemonic::BNE: return a != b;
    case Mnemonic::BLT: return sa < sb;
    case Mnemonic::BGE: return sa >= sb;
    case Mnemonic::BLTU: return a < b;
    case Mnemonic::BGEU: return a >= b;
    default: return false;
  }
}

/// Register value produced by a load from the zero-extended memory bytes.
inline std::uint32_t extend_load(Mnemonic m, std::uint32_t bytes) {
  switch (m) {
    case Mnemonic::LB: return static_cast<std::uint32_t>(detail::sign_extend(bytes, 8));
    case Mnemonic::LH: return static_cast<std::uint32_t>(detail::sign_extend(bytes, 16));
    case Mnemonic::LBU: return bytes & 0xff;
    case Mnemonic::LHU: return bytes & 0xffff;
    default: return bytes;
  }
}

struct Effects {
  std::uint32_t next_pc = 0;
  bool taken = false;                   // branch condition held, or any jump
  std::optional<std::uint32_t> result;  // rd value for everything except loads
  MemOp mem_op = MemOp::none;
  std::uint32_t mem_addr = 0;
  unsigned mem_width = 0;
  std::uint32_t store_data = 0;  // already masked to mem_width
  std::optional<Fault> fault;
  bool ecall = false;
};

/// Everything the instruction does except touching memory. `rs1_value` and
/// `rs2_value` are the operand values the datapath supplies.
inline Effects evaluate(const Instruction& in, std::uint32_t pc, std::uint32_t rs1_value,
                        std::uint32_t rs2_value, std::uint32_t address_space) {
  Effects fx;
  fx.next_pc = pc + 4;
  const auto imm = static_cast<std::uint32_t>(in.imm);
  const Mnemonic m = in.mnemonic;

  auto jump_to = [&](std::uint32_t target) {
    if (target & 3) {
      fx.fault = Fault{FaultCause::misaligned_target, pc, target};
      return;
    }
    fx.taken = true;
    fx.next_pc = target;
  };
  auto memory = [&](MemOp op) {
    fx.mem_op = op;
    fx.mem_width = access_width(m);
    fx.mem_addr = rs1_value + imm;
    if (fx.mem_addr % fx.mem_width != 0) {
      fx.fault = Fault{FaultCause::misaligned_access, pc, fx.mem_addr};
    } else if (std::uint64_t{fx.mem_addr} + fx.mem_width > address_space) {
      fx.fault = Fault{FaultCause::access_out_of_range, pc, fx.mem_addr};
    }
    if (op == MemOp::store) {
      fx.store_data = fx.mem_width == 4 ? rs2_value : rs2_value & ((1u << (8 * fx.mem_width)) - 1);
    }
  };

  switch (m) {
    case Mnemonic::LUI: fx.result = imm; break;
    case Mnemonic::AUIPC: fx.result = pc + imm; break;
    case Mnemonic::JAL:
      fx.result = pc + 4;
      jump_to(pc + imm);
      break;
    case Mnemonic::JALR:
      fx.result = pc + 4;
      jump_to((rs1_value + imm) & ~1u);
      break;
    case Mnemonic::FENCE: break;
    case Mnemonic::ECALL: fx.ecall = true; break;
    case Mnemonic::EBREAK: fx.fault = Fault{FaultCause::breakpoint, pc, in.raw}; break;
    default:
      if (is_branch(m)) {
        if (branch_taken(m, rs1_value, rs2_value)) jump_to(pc + imm);
      } else if (is_load(m)) {
        memory(MemOp::load);
      } else if (is_store(m)) {
        memory(MemOp::store);
      } else if (in.format == Format::R) {
        fx.result = alu(m, rs1_value, rs2_value);
      } else {
        fx.result = alu(m, rs1_value, imm);
      }
      break;
  }
  return fx;
}

/// Commit record for a retired instruction. `rd_value` is the value written
/// back (already extended for loads); `mem_data` the zero-extended bytes moved.
inline CommitRecord make_record(std::uint64_t seq, std::uint64_t cycle, std::uint32_t pc, const Instruction& in,
                                const Effects& fx, std::uint32_t rd_value, std::uint32_t mem_data) {
  CommitRecord r;
  r.seq = seq;
  r.cycle = cycle;
  r.pc = pc;
  r.raw = in.raw;
  if (in.writes_register()) {
    r.rd = static_cast<std::uint8_t>(in.rd.value());
    r.rd_value = rd_value;
  }
  if (fx.mem_op != MemOp::none) {
    r.mem_op = fx.mem_op;
    r.mem_addr = fx.mem_addr;
    r.mem_data = mem_data;
  }
  return r;
}

}  // namespace rvlab
