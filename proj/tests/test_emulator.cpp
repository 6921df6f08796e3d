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

#include <gtest/gtest.h>

#include "rvlab/assembler.hpp"
#include "rvlab/emulator.hpp"
#include "rvlab/single_cycle.hpp"
#include "support.hpp"

using namespace rvlab;
using namespace rvlab::test;

TEST(Step, AddiRetires) {
  ArchState s = ArchState::from_image(image_of({addi(1, 0, 5)}));
  const StepResult r = step(s);
  ASSERT_TRUE(r.record);
  EXPECT_FALSE(r.exit);
  EXPECT_EQ(r.record->seq, 0u);
  EXPECT_EQ(r.record->pc, 0u);
  EXPECT_EQ(r.record->rd, 1);
  EXPECT_EQ(r.record->rd_value, 5u);
  EXPECT_EQ(s.pc, 4u);
}

TEST(Step, TakenBranchFromSixteen) {
  MemoryImage img;
  img.write_word(0x10, beq(0, 0, 8));
  img.entry_point = 0x10;
  ArchState s = ArchState::from_image(img);
  const StepResult r = step(s);
  ASSERT_TRUE(r.record);
  EXPECT_EQ(s.pc, 0x18u);
  EXPECT_FALSE(r.record->rd);
  EXPECT_EQ(r.record->mem_op, MemOp::none);
}

TEST(Step, EcallHaltsWithA0) {
  ArchState s = ArchState::from_image(image_of({kEcall}));
  s.regs[17] = 93;
  s.regs[10] = 0;
  const StepResult r = step(s);
  ASSERT_TRUE(r.record);
  ASSERT_TRUE(r.exit);
  EXPECT_EQ(r.exit->kind, ExitStatus::Kind::halted);
  EXPECT_EQ(r.exit->exit_code, 0u);

  ArchState t = ArchState::from_image(image_of({kEcall}));
  t.regs[10] = 42;  // a7 is not consulted
  EXPECT_EQ(step(t).exit->exit_code, 42u);
}

TEST(Step, FaultsDoNotRetire) {
  struct Case {
    std::vector<std::uint32_t> words;
    FaultCause cause;
    std::uint32_t value;
  };
  const Case cases[] = {
      {{0xffffffff}, FaultCause::illegal_instruction, 0xffffffff},
      {{kEbreak}, FaultCause::breakpoint, kEbreak},
      {{lw(1, 0, 2)}, FaultCause::misaligned_access, 2},
      {{enc_i(0x03, 1, 1, 0, 1)}, FaultCause::misaligned_access, 1},  // lh at 1
      {{sw(1, 0, -4)}, FaultCause::access_out_of_range, 0xfffffffc},
      {{enc_b(0, 0, 0, 6)}, FaultCause::misaligned_target, 6},
      {{enc_j(0, 2)}, FaultCause::misaligned_target, 2},
  };
  for (const auto& c : cases) {
    ArchState s = ArchState::from_image(image_of(c.words));
    const StepResult r = step(s);
    EXPECT_FALSE(r.record);
    ASSERT_TRUE(r.exit);
    ASSERT_TRUE(r.exit->fault);
    EXPECT_EQ(r.exit->fault->cause, c.cause);
    EXPECT_EQ(r.exit->fault->value, c.value);
    EXPECT_EQ(s.instret, 0u);
  }
}

TEST(Step, FetchOutsideAddressSpace) {
  MemoryImage img;
  img.entry_point = kDefaultAddressSpace;
  ArchState s = ArchState::from_image(img);
  const StepResult r = step(s);
  ASSERT_TRUE(r.exit && r.exit->fault);
  EXPECT_EQ(r.exit->fault->cause, FaultCause::fetch_out_of_range);
}

TEST(Step, JalrClearsBitZero) {
  // x2 = 9; jalr x1, 0(x2) -> target 8
  ArchState s = ArchState::from_image(image_of({addi(2, 0, 9), enc_i(0x67, 1, 0, 2, 0), kNop, kEcall}));
  step(s);
  const StepResult r = step(s);
  EXPECT_EQ(s.pc, 8u);
  EXPECT_EQ(r.record->rd_value, 8u);
}

TEST(Step, LoadsExtendAndRecordRawBytes) {
  const MemoryImage img = assemble(R"(
    li x6, 0x10000
    li x1, -128
    sb x1, 1(x6)
    lb x2, 1(x6)
    lbu x3, 1(x6)
    li x1, 0x8001
    sh x1, 2(x6)
    lh x4, 2(x6)
    lhu x5, 2(x6)
    lw x7, 0(x6)
    halt
  )");
  const RunOutput out = run_reference(img);
  ASSERT_EQ(out.exit.kind, ExitStatus::Kind::halted);
  EXPECT_EQ(out.regs[2], 0xffffff80u);
  EXPECT_EQ(out.regs[3], 0x80u);
  EXPECT_EQ(out.regs[4], 0xffff8001u);
  EXPECT_EQ(out.regs[5], 0x8001u);
  EXPECT_EQ(out.regs[7], 0x80018000u);
  // lb record: DATA is the zero-extended byte, VAL the sign-extended value.
  const CommitRecord* lb = nullptr;
  for (const auto& r : out.trace) {
    if (r.raw == assemble("lb x2, 1(x6)").read_word(0)) lb = &r;
  }
  ASSERT_NE(lb, nullptr);
  EXPECT_EQ(lb->mem_op, MemOp::load);
  EXPECT_EQ(lb->mem_data, 0x80u);
  EXPECT_EQ(lb->rd_value, 0xffffff80u);
}

TEST(Step, WritesToX0AreDiscarded) {
  ArchState s = ArchState::from_image(image_of({addi(0, 0, 7), enc_u(0x37, 0, 1)}));
  const StepResult a = step(s);
  step(s);
  EXPECT_EQ(s.regs[0], 0u);
  EXPECT_FALSE(a.record->rd);
  EXPECT_FALSE(a.record->rd_value);
}

TEST(Run, EmptyProgramHalts) {
  const RunOutput out = run_reference(image_of({kEcall}));
  EXPECT_EQ(out.trace.size(), 1u);
  EXPECT_EQ(out.exit.kind, ExitStatus::Kind::halted);
}

TEST(Run, StraightLineEleven) {
  std::vector<std::uint32_t> w;
  for (unsigned i = 1; i <= 10; ++i) w.push_back(addi(i, 0, static_cast<std::int32_t>(i)));
  w.push_back(kEcall);
  ArchState s = ArchState::from_image(image_of(w));
  Trace t;
  const ExitStatus st = run(s, 1000, [&](const CommitRecord& r) { t.push_back(r); });
  EXPECT_EQ(st.kind, ExitStatus::Kind::halted);
  EXPECT_EQ(t.size(), 11u);
  EXPECT_EQ(s.instret, 11u);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i].seq, i);
}

TEST(Run, InfiniteLoopHitsBudget) {
  ReferenceOptions opt;
  opt.limits.max_instr = 1000;
  const RunOutput out = run_reference(image_of({enc_j(0, 0)}), opt);
  EXPECT_EQ(out.exit.kind, ExitStatus::Kind::limit_exceeded);
  EXPECT_EQ(out.trace.size(), 1000u);
}

TEST(Snapshot, FreshAndAfterAddi) {
  ArchState s;
  EXPECT_EQ(regfile_snapshot(s), RegisterFile{});
  s = ArchState::from_image(image_of({addi(5, 0, 7)}));
  step(s);
  RegisterFile expect{};
  expect[5] = 7;
  EXPECT_EQ(regfile_snapshot(s), expect);
}

TEST(Snapshot, OnePerCommit) {
  ReferenceOptions opt;
  opt.snapshots = true;
  const RunOutput out = run_reference(image_of({addi(1, 0, 1), addi(2, 1, 1), kEcall}), opt);
  ASSERT_EQ(out.snapshots.size(), 3u);
  EXPECT_EQ(out.snapshots[1].seq, 1u);
  EXPECT_EQ(out.snapshots[1].regs[2], 2u);
  for (const auto& s : out.snapshots) EXPECT_EQ(s.regs[0], 0u);
}

TEST(SingleCycle, ElevenRecordsCpiOne) {
  std::vector<std::uint32_t> w;
  for (unsigned i = 1; i <= 10; ++i) w.push_back(addi(i, i - 1, 1));
  w.push_back(kEcall);
  const RunOutput out = run_single_cycle(image_of(w));
  EXPECT_EQ(out.stats.cycles, 11u);
  EXPECT_EQ(out.stats.instructions, 11u);
  EXPECT_DOUBLE_EQ(out.stats.cpi(), 1.0);
  for (const auto& r : out.trace) EXPECT_EQ(r.cycle, r.seq);
}

TEST(SingleCycle, MatchesReferenceProjection) {
  const MemoryImage img = assemble(R"(
    li x6, 0x10000
    li x5, 5
  loop:
    sw x5, 0(x6)
    lw x8, 0(x6)
    add x9, x9, x8
    addi x6, x6, 4
    addi x5, x5, -1
    bne x5, x0, loop
    jal x1, fn
    mv a0, x9
    halt
  fn:
    addi x9, x9, 100
    ret
  )");
  const RunOutput ref = run_reference(img);
  const RunOutput sc = run_single_cycle(img);
  ASSERT_EQ(ref.trace.size(), sc.trace.size());
  EXPECT_EQ(ref.trace, sc.trace);  // cycle = seq in both
  EXPECT_EQ(sc.exit, ref.exit);
  EXPECT_EQ(sc.exit.exit_code, 115u);
  EXPECT_EQ(sc.memory.nonzero_bytes(), ref.memory.nonzero_bytes());
}

TEST(SingleCycle, RejectsNonIdealMemory) {
  SingleCycleConfig cfg;
  cfg.mem.model = MemModel::cached;
  try {
    run_single_cycle(image_of({kEcall}), cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "cache requires pipelined mode");
  }
  cfg.mem.model = MemModel::flat;
  EXPECT_THROW(run_single_cycle(image_of({kEcall}), cfg), ConfigError);
}

TEST(SingleCycle, FaultAndLimitMatchReference) {
  for (const auto& img : {image_of({addi(1, 0, 1), kEbreak}), image_of({enc_j(0, 0)})}) {
    SingleCycleConfig cfg;
    cfg.limits.max_instr = 50;
    ReferenceOptions ro;
    ro.limits.max_instr = 50;
    const RunOutput a = run_single_cycle(img, cfg);
    const RunOutput b = run_reference(img, ro);
    EXPECT_EQ(a.exit, b.exit);
    EXPECT_EQ(a.trace, b.trace);
  }
}
