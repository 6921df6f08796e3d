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
 * @file pipeline.hpp
 * @brief Cycle-accurate in-order 5-stage pipeline (IF ID EX MEM WB).
 *
 * Microarchitecture:
 *  - register file written in the first half of a cycle and read in the
 *    second half; ID reads operands in the cycle it hands off to EX;
 *  - forwarding EX/MEM -> EX and MEM/WB -> EX;
 *  - load-use: a load in EX with a consumer of its rd in ID holds IF and ID
 *    for one cycle and injects a bubble into EX;
 *  - JAL redirects fetch from ID (one squashed fetch); a conditional branch
 *    predicted taken does the same. Branches and JALR resolve in EX; a wrong
 *    next pc squashes IF and ID (two bubbles). JALR is always redirected;
 *  - a multi-cycle memory access holds its stage: MEM freezes everything
 *    upstream, IF starves ID;
 *  - faults are carried with the instruction and raised when it reaches WB.
 *
 * Every cycle WB either retires an instruction or holds a bubble. Bubbles are
 * tagged with why they were created, so after the four fill cycles
 *   cycles = instructions + 4 + stall + flush + memory_stall
 * holds exactly for every run that halts.
 */

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "rvlab/commit.hpp"
#include "rvlab/emulator.hpp"
#include "rvlab/execute.hpp"
#include "rvlab/isa.hpp"
#include "rvlab/mem_hierarchy.hpp"
#include "rvlab/memory.hpp"
#include "rvlab/predictor.hpp"
#include "rvlab/run_result.hpp"

namespace rvlab {

enum class BubbleCause : std::uint8_t { fill, stall, flush, memory };
enum class ForwardSource : std::uint8_t { none, ex_mem, mem_wb };

/// One instruction travelling down the pipe.
struct InFlight {
  std::uint32_t pc = 0;
  std::uint32_t raw = 0;
  std::optional<Instruction> inst;  // set when the word enters ID
  std::optional<Fault> fault;
  std::uint32_t predicted_next = 0;
  std::uint32_t rs1_value = 0;
  std::uint32_t rs2_value = 0;
  Effects fx;
  bool executed = false;
  std::optional<std::uint32_t> redirect;  // resolved next pc differs from the fetched path
  bool squash_younger = false;            // fault found in EX
  std::uint32_t wb_value = 0;
  std::uint32_t mem_data = 0;
  bool access_started = false;
  unsigned access_remaining = 0;

  static InFlight decoded(const Instruction& in, std::uint32_t pc = 0) {
    InFlight u;
    u.pc = pc;
    u.raw = in.raw;
    u.inst = in;
    return u;
  }

  bool live() const { return inst.has_value() && !fault; }
  bool writes(unsigned reg) const { return live() && inst->writes_register() && inst->rd.value() == reg; }
  bool is_load() const { return live() && rvlab::is_load(inst->mnemonic); }
  bool reads_rs1() const { return live() && inst->uses_rs1(); }
  bool reads_rs2() const { return live() && inst->uses_rs2(); }
};

struct HazardDecision {
  ForwardSource forward_a = ForwardSource::none;
  ForwardSource forward_b = ForwardSource::none;
  bool stall = false;

  bool operator==(const HazardDecision&) const = default;
};

/// Forwarding selections for the instruction in EX, and the load-use stall
/// decision for the one in ID. nullptr means the stage holds a bubble.
inline HazardDecision resolve_hazards(const InFlight* id, const InFlight* ex, const InFlight* mem,
                                      const InFlight* wb) {
  HazardDecision d;
  auto source = [&](unsigned reg) {
    if (reg == 0) return ForwardSource::none;
    if (mem && mem->writes(reg)) return ForwardSource::ex_mem;
    if (wb && wb->writes(reg)) return ForwardSource::mem_wb;
    return ForwardSource::none;
  };
  if (ex && ex->live()) {
    if (ex->reads_rs1()) d.forward_a = source(ex->inst->rs1.value());
    if (ex->reads_rs2()) d.forward_b = source(ex->inst->rs2.value());
  }
  if (ex && id && ex->is_load() && ex->inst->writes_register()) {
    const unsigned rd = ex->inst->rd.value();
    d.stall = (id->reads_rs1() && id->inst->rs1.value() == rd) || (id->reads_rs2() && id->inst->rs2.value() == rd);
  }
  return d;
}

struct PipelineConfig {
  PredictorConfig predictor;
  MemConfig mem;
  Limits limits;
  std::uint32_t address_space = kDefaultAddressSpace;
  bool snapshots = false;
  bool forwarding = true;  // debug knob: disabling it breaks RAW chains on purpose
};

/// One row of the occupancy ("waveform") log.
struct OccupancyRow {
  enum class Cell : std::uint8_t { bubble, held, active };
  static constexpr std::array<const char*, 5> kStageNames = {"IF", "ID", "EX", "MEM", "WB"};

  std::uint64_t cycle = 0;
  std::array<Cell, 5> cells{};
  std::array<std::uint32_t, 5> pcs{};

  static std::string header() { return "   cycle |       IF |       ID |       EX |      MEM |       WB"; }

  std::string format() const {
    char buf[96];
    int n = std::snprintf(buf, sizeof buf, "%8llu", static_cast<unsigned long long>(cycle));
    std::string line(buf, static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < 5; ++i) {
      switch (cells[i]) {
        case Cell::bubble: n = std::snprintf(buf, sizeof buf, " | %8s", "----"); break;
        case Cell::held: n = std::snprintf(buf, sizeof buf, " | %8s", "****"); break;
        case Cell::active: n = std::snprintf(buf, sizeof buf, " | %08x", pcs[i]); break;
      }
      line.append(buf, static_cast<std::size_t>(n));
    }
    return line;
  }
};

struct CycleEvents {
  std::optional<CommitRecord> commit;
  OccupancyRow row;
  std::optional<ExitStatus> exit;
};

class Pipeline {
 public:
  Pipeline(const MemoryImage& image, PipelineConfig cfg)
      : cfg_(std::move(cfg)),
        memory_(cfg_.address_space),
        timing_(cfg_.mem, cfg_.address_space),
        predictor_(cfg_.predictor) {
    memory_.load(image);
    if_.uop = fetch_at(image.entry_point);
  }

  bool finished() const { return exit_.has_value(); }
  std::uint64_t cycle() const { return cycle_; }
  const RegisterFile& regs() const { return regs_; }
  const BranchPredictor& predictor() const { return predictor_; }

  CycleEvents step_cycle() {
    CycleEvents ev;
    ev.row.cycle = cycle_;
    const std::array<Slot*, 5> stages = {&if_, &id_, &ex_, &mem_, &wb_};
    for (std::size_t i = 0; i < 5; ++i) {
      if (stages[i]->uop) {
        ev.row.cells[i] = OccupancyRow::Cell::active;
        ev.row.pcs[i] = stages[i]->uop->pc;
      }
    }

    retire(ev);
    if (exit_) {
      ++cycle_;
      out_.stats.cycles = cycle_;
      ev.exit = exit_;
      return ev;
    }
    const bool mem_hold = memory_stage();
    execute_stage();
    const bool if_busy = fetch_progress();

    std::array<bool, 5> held{};
    Slot n_if, n_id, n_ex, n_mem, n_wb;
    if (mem_hold) {
      n_wb = Slot::bubble(BubbleCause::memory);
      n_mem = std::move(mem_);
      n_ex = std::move(ex_);
      n_id = std::move(id_);
      n_if = std::move(if_);
      held = {true, true, true, true, false};
    } else {
      n_wb = std::move(mem_);
      InFlight* ex = ex_.uop ? &*ex_.uop : nullptr;
      if (ex && ex->redirect) {
        n_mem = std::move(ex_);
        n_ex = Slot::bubble(BubbleCause::flush);
        n_id = Slot::bubble(BubbleCause::flush);
        n_if.uop = fetch_at(*n_mem.uop->redirect);
      } else if (ex && ex->squash_younger) {
        n_mem = std::move(ex_);
        n_ex = Slot::bubble(BubbleCause::flush);
        n_id = Slot::bubble(BubbleCause::flush);
      } else {
        const HazardDecision hz = resolve_hazards(ptr(id_), ex, ptr(mem_), ptr(wb_));
        n_mem = std::move(ex_);
        if (hz.stall) {
          n_ex = Slot::bubble(BubbleCause::stall);
          n_id = std::move(id_);
          n_if = std::move(if_);
          held[0] = held[1] = true;
        } else {
          advance_front(n_if, n_id, n_ex, if_busy, held);
        }
      }
    }

    for (std::size_t i = 0; i < 5; ++i) {
      if (held[i] && ev.row.cells[i] == OccupancyRow::Cell::active) ev.row.cells[i] = OccupancyRow::Cell::held;
    }
    if (!held[0] && if_busy && ev.row.cells[0] == OccupancyRow::Cell::active) {
      ev.row.cells[0] = OccupancyRow::Cell::held;
    }

    if_ = std::move(n_if);
    id_ = std::move(n_id);
    ex_ = std::move(n_ex);
    mem_ = std::move(n_mem);
    wb_ = std::move(n_wb);
    ++cycle_;
    out_.stats.cycles = cycle_;

    if (cycle_ >= cfg_.limits.max_cycles) {
      exit_ = ExitStatus::limit("cycle budget of " + std::to_string(cfg_.limits.max_cycles) + " exhausted");
      ev.exit = exit_;
    }
    return ev;
  }

  /// Final result; valid once finished().
  RunOutput take_result() {
    out_.exit = exit_.value_or(ExitStatus::limit("not finished"));
    out_.icache = timing_.icache_stats();
    out_.dcache = timing_.dcache_stats();
    out_.regs = regs_;
    out_.memory = std::move(memory_);
    return std::move(out_);
  }

 private:
  struct Slot {
    std::optional<InFlight> uop;
    BubbleCause cause = BubbleCause::fill;

    static Slot bubble(BubbleCause c) {
      Slot s;
      s.cause = c;
      return s;
    }
  };

  static InFlight* ptr(Slot& s) { return s.uop ? &*s.uop : nullptr; }

  static InFlight fetch_at(std::uint32_t pc) {
    InFlight u;
    u.pc = pc;
    return u;
  }

  void retire(CycleEvents& ev) {
    if (!wb_.uop) {
      switch (wb_.cause) {
        case BubbleCause::fill: break;
        case BubbleCause::stall: ++out_.stats.stall_cycles; break;
        case BubbleCause::flush: ++out_.stats.flush_cycles; break;
        case BubbleCause::memory: ++out_.stats.memory_stall_cycles; break;
      }
      return;
    }
    const InFlight& u = *wb_.uop;
    if (u.fault) {
      exit_ = ExitStatus::from_fault(*u.fault);
      return;
    }
    if (u.inst->writes_register()) regs_[u.inst->rd.value()] = u.wb_value;
    CommitRecord rec = make_record(seq_, cycle_, u.pc, *u.inst, u.fx, u.wb_value, u.mem_data);
    ++seq_;
    out_.stats.instructions = seq_;
    out_.trace.push_back(rec);
    if (cfg_.snapshots) out_.snapshots.push_back({rec.seq, regs_});
    ev.commit = std::move(rec);
    if (u.fx.ecall) {
      exit_ = ExitStatus::halted(regs_[10]);
    } else if (seq_ >= cfg_.limits.max_instr) {
      exit_ = ExitStatus::limit("instruction budget of " + std::to_string(cfg_.limits.max_instr) + " exhausted");
    }
  }

  // Returns true while the instruction in MEM still needs more cycles.
  bool memory_stage() {
    if (!mem_.uop || mem_.uop->fault) return false;
    InFlight& u = *mem_.uop;
    if (!u.access_started) {
      u.access_started = true;
      u.access_remaining = 1;
      if (u.fx.mem_op == MemOp::load) {
        u.access_remaining = timing_.access(u.fx.mem_addr, AccessKind::load, u.fx.mem_width);
        u.mem_data = memory_.read(u.fx.mem_addr, u.fx.mem_width);
        u.wb_value = extend_load(u.inst->mnemonic, u.mem_data);
      } else if (u.fx.mem_op == MemOp::store) {
        u.access_remaining = timing_.access(u.fx.mem_addr, AccessKind::store, u.fx.mem_width);
        u.mem_data = u.fx.store_data;
        memory_.write(u.fx.mem_addr, u.fx.mem_width, u.fx.store_data);
      }
    }
    if (u.access_remaining > 1) {
      --u.access_remaining;
      return true;
    }
    return false;
  }

  // Executes the instruction in EX on its first cycle there; the control
  // consequences are applied when it moves on to MEM.
  void execute_stage() {
    if (!ex_.uop) return;
    InFlight& u = *ex_.uop;
    if (u.executed || u.fault) return;
    u.executed = true;

    const HazardDecision hz = resolve_hazards(nullptr, &u, ptr(mem_), ptr(wb_));
    std::uint32_t a = u.rs1_value;
    std::uint32_t b = u.rs2_value;
    if (cfg_.forwarding) {
      a = forwarded(hz.forward_a, a);
      b = forwarded(hz.forward_b, b);
    }
    u.fx = evaluate(*u.inst, u.pc, a, b, memory_.size());
    if (u.fx.fault) {
      u.fault = u.fx.fault;
      u.squash_younger = true;
      return;
    }
    u.wb_value = u.fx.result.value_or(0);

    const Mnemonic m = u.inst->mnemonic;
    if (is_branch(m)) predictor_.update(u.pc, u.fx.taken);
    if (is_control(m)) {
      ++out_.stats.branches;
      if (u.fx.next_pc != u.predicted_next || m == Mnemonic::JALR) {
        ++out_.stats.mispredicts;
        u.redirect = u.fx.next_pc;
      }
    }
  }

  std::uint32_t forwarded(ForwardSource src, std::uint32_t fallback) const {
    switch (src) {
      case ForwardSource::ex_mem: return mem_.uop->wb_value;
      case ForwardSource::mem_wb: return wb_.uop->wb_value;
      case ForwardSource::none: break;
    }
    return fallback;
  }

  // Starts (or continues) the fetch in IF. Returns true while it is still busy.
  bool fetch_progress() {
    if (!if_.uop || if_.uop->fault) return false;
    InFlight& u = *if_.uop;
    if (!u.access_started) {
      u.access_started = true;
      if (auto f = fetch_fault(u.pc, memory_)) {
        u.fault = f;
        return false;
      }
      u.access_remaining = timing_.access(u.pc, AccessKind::ifetch, 4);
      u.raw = memory_.read(u.pc, 4);
    }
    if (u.access_remaining > 1) {
      --u.access_remaining;
      return true;
    }
    return false;
  }

  // ID hands its instruction to EX; IF hands its word to ID unless a redirect
  // or a halting instruction squashes it.
  void advance_front(Slot& n_if, Slot& n_id, Slot& n_ex, bool if_busy, std::array<bool, 5>& held) {
    std::optional<std::uint32_t> redirect;
    bool stop_fetch = false;

    if (id_.uop) {
      InFlight& u = *id_.uop;
      if (u.fault) {
        stop_fetch = true;
      } else {
        const Instruction& in = *u.inst;
        u.predicted_next = u.pc + 4;
        if (in.mnemonic == Mnemonic::ECALL || in.mnemonic == Mnemonic::EBREAK) {
          stop_fetch = true;
        } else if (in.mnemonic == Mnemonic::JAL || (is_branch(in.mnemonic) && predictor_.predict(u.pc))) {
          const std::uint32_t target = u.pc + static_cast<std::uint32_t>(in.imm);
          if ((target & 3) == 0) {
            u.predicted_next = target;
            redirect = target;
          }
        }
        u.rs1_value = regs_[in.rs1.value()];
        u.rs2_value = regs_[in.rs2.value()];
      }
    }
    n_ex = std::move(id_);

    if (stop_fetch) {
      n_id = Slot::bubble(BubbleCause::flush);
    } else if (redirect) {
      n_id = Slot::bubble(BubbleCause::flush);
      n_if.uop = fetch_at(*redirect);
    } else if (!if_.uop) {
      n_id = Slot::bubble(BubbleCause::flush);
    } else if (if_busy) {
      n_id = Slot::bubble(BubbleCause::memory);
      n_if = std::move(if_);
      held[0] = true;
    } else {
      InFlight u = std::move(*if_.uop);
      u.access_started = false;
      u.access_remaining = 0;
      if (!u.fault) {
        if (auto in = try_decode(u.raw)) {
          u.inst = *in;
        } else {
          u.fault = Fault{FaultCause::illegal_instruction, u.pc, u.raw};
        }
      }
      if (!u.fault) n_if.uop = fetch_at(u.pc + 4);
      n_id.uop = std::move(u);
    }
  }

  PipelineConfig cfg_;
  SparseMemory memory_;
  MemorySystem timing_;
  BranchPredictor predictor_;
  RegisterFile regs_{};
  Slot if_, id_, ex_, mem_, wb_;
  std::uint64_t cycle_ = 0;
  std::uint64_t seq_ = 0;
  std::optional<ExitStatus> exit_;
  RunOutput out_;
};

using OccupancySink = std::function<void(const OccupancyRow&)>;

inline RunOutput run_pipeline(const MemoryImage& image, const PipelineConfig& cfg = {},
                              const OccupancySink& occupancy = {}) {
  Pipeline p(image, cfg);
  if (cfg.limits.max_instr == 0) {
    RunOutput out = p.take_result();
    out.exit = ExitStatus::limit("instruction budget of 0 exhausted");
    return out;
  }
  while (!p.finished()) {
    CycleEvents ev = p.step_cycle();
    if (occupancy) occupancy(ev.row);
  }
  return p.take_result();
}

}  // namespace rvlab
