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

// Library use: assemble a program, run it on the reference and on the
// pipelined model, and compare the commit traces.

#include <cstdio>

#include "rvlab/rvlab.hpp"

int main() {
  const rvlab::MemoryImage image = rvlab::assemble(R"(
    li x5, 10
    li a0, 0
  loop:
    add a0, a0, x5
    addi x5, x5, -1
    bne x5, x0, loop
    halt
  )");

  rvlab::RunConfig ref;
  rvlab::RunConfig dut;
  dut.mode = rvlab::Mode::pipe_cache;
  dut.mem.model = rvlab::MemModel::cached;
  dut.predictor.kind = rvlab::PredictorKind::bimodal;

  const rvlab::RunOutput r = rvlab::simulate(image, ref);
  const rvlab::RunOutput d = rvlab::simulate(image, dut);
  std::fputs(rvlab::format_verdict(rvlab::compare_traces(r.trace, d.trace)).c_str(), stdout);
  std::printf("exit %u, %llu instructions in %llu cycles\n", d.exit.exit_code,
              static_cast<unsigned long long>(d.stats.instructions), static_cast<unsigned long long>(d.stats.cycles));
  return 0;
}
