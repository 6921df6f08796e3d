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

#include <optional>
#include <vector>

#include "rvlab/commit.hpp"
#include "rvlab/mem_hierarchy.hpp"
#include "rvlab/memory.hpp"

namespace rvlab {

/// What every execution model hands back after a run.
struct RunOutput {
  Trace trace;
  std::vector<RegSnapshot> snapshots;  // one per commit, when requested
  TimingStats stats;
  ExitStatus exit;
  std::optional<CacheStats> icache;
  std::optional<CacheStats> dcache;
  RegisterFile regs{};
  SparseMemory memory;
};

}  // namespace rvlab
