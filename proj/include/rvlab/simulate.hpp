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

// Mode selection shared by the CLI and the test suites: one entry point that
// runs an image on the reference, single-cycle or pipelined model, and the
// lockstep verification of one program against the reference.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rvlab/checker.hpp"
#include "rvlab/emulator.hpp"
#include "rvlab/error.hpp"
#include "rvlab/pipeline.hpp"
#include "rvlab/single_cycle.hpp"

namespace rvlab {

enum class Mode : std::uint8_t { ref, single, pipe, pipe_cache };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::ref: return "ref";
    case Mode::single: return "single";
    case Mode::pipe: return "pipe";
    case Mode::pipe_cache: return "pipe-cache";
  }
  return "?";
}

inline std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "ref") return Mode::ref;
  if (s == "single") return Mode::single;
  if (s == "pipe") return Mode::pipe;
  if (s == "pipe-cache") return Mode::pipe_cache;
  return std::nullopt;
}

struct RunConfig {
  Mode mode = Mode::ref;
  MemConfig mem;
  PredictorConfig predictor;
  Limits limits;
  std::uint32_t address_space = kDefaultAddressSpace;
  bool snapshots = false;
  bool forwarding = true;

  /// Mode/memory compatibility. pipe-cache implies the cached model.
  void validate() const {
    mem.validate();
    const bool pipelined = mode == Mode::pipe || mode == Mode::pipe_cache;
    if (mem.model == MemModel::cached && !pipelined) throw ConfigError("cache requires pipelined mode");
    if (mem.model == MemModel::flat && !pipelined) {
      throw ConfigError(std::string(to_string(mode)) + " mode requires ideal memory");
    }
    if (mode == Mode::pipe_cache && mem.model != MemModel::cached) {
      throw ConfigError("pipe-cache mode requires the cached memory model");
    }
  }
};

inline RunOutput simulate(const MemoryImage& image, const RunConfig& cfg, const OccupancySink& occupancy = {}) {
  cfg.validate();
  switch (cfg.mode) {
    case Mode::ref:
      return run_reference(image, {cfg.limits, cfg.address_space, cfg.snapshots});
    case Mode::single:
      return run_single_cycle(image, {cfg.mem, cfg.limits, cfg.address_space, cfg.snapshots});
    case Mode::pipe:
    case Mode::pipe_cache:
      return run_pipeline(image, {cfg.predictor, cfg.mem, cfg.limits, cfg.address_space, cfg.snapshots, cfg.forwarding},
                          occupancy);
  }
  throw ConfigError("unknown mode");
}

struct ProgramVerdict {
  Verdict trace;
  std::optional<Verdict> regfile;
  bool exit_match = true;
  ExitStatus ref_exit;
  ExitStatus dut_exit;

  bool pass() const { return trace.pass && (!regfile || regfile->pass) && exit_match; }

  std::string report() const {
    std::string out;
    if (!trace.pass) out += format_verdict(trace);
    if (regfile && !regfile->pass) out += "regfile " + format_verdict(*regfile);
    if (!exit_match) out += "exit status differs: expected '" + ref_exit.detail + "' actual '" + dut_exit.detail + "'\n";
    return out;
  }
};

/// Runs `image` on the reference and on `dut`, then checks the DUT trace (and
/// optionally every register-file snapshot) against the reference.
inline ProgramVerdict verify_program(const MemoryImage& image, RunConfig dut, bool compare_regs = false) {
  RunConfig ref = dut;
  ref.mode = Mode::ref;
  ref.mem = {};
  ref.snapshots = dut.snapshots = compare_regs;
  const RunOutput r = simulate(image, ref);
  const RunOutput d = simulate(image, dut);
  ProgramVerdict v;
  v.trace = compare_traces(r.trace, d.trace);
  if (compare_regs) v.regfile = compare_regfiles(r.snapshots, d.snapshots);
  v.ref_exit = r.exit;
  v.dut_exit = d.exit;
  v.exit_match = r.exit.kind == d.exit.kind && r.exit.exit_code == d.exit.exit_code && r.exit.fault == d.exit.fault;
  return v;
}

}  // namespace rvlab
