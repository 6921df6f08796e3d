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

// rvlab command line: run | verify | gen | asm | check
//
// Exit codes: run -> program exit code clamped to 0..255 on halt, 124 when a
// budget is exhausted, 125 on a fault; verify/check -> 0 pass, 1 fail;
// every subcommand -> 2 on configuration, file or parse errors.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rvlab/assembler.hpp"
#include "rvlab/checker.hpp"
#include "rvlab/simulate.hpp"
#include "rvlab/testgen.hpp"
#include "rvlab/trace_io.hpp"

namespace fs = std::filesystem;
using namespace rvlab;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLimit = 124;
constexpr int kExitFault = 125;

struct ModelOptions {
  std::string mode = "pipe";
  std::string mem;
  std::uint32_t mem_latency = 10;
  std::uint32_t cache_sets = 64;
  std::uint32_t cache_block = 16;
  std::string bp = "none";
  std::uint32_t bp_entries = 64;
  std::uint64_t max_instr = 1'000'000;
  std::uint64_t max_cycles = 10'000'000;
  std::uint32_t mem_size = kDefaultAddressSpace;
  bool no_forwarding = false;

  void add_to(CLI::App& app, const char* default_mode) {
    mode = default_mode;
    app.add_option("--mem", mem, "memory model: ideal | flat | cached (default: cached for pipe-cache, else ideal)")
        ->check(CLI::IsMember({"ideal", "flat", "cached"}));
    app.add_option("--mem-latency", mem_latency, "backing memory latency in cycles")->capture_default_str();
    app.add_option("--cache-sets", cache_sets, "sets per cache (power of two)")->capture_default_str();
    app.add_option("--cache-block", cache_block, "cache block size in bytes (power of two >= 4)")->capture_default_str();
    app.add_option("--bp", bp, "branch predictor: none (static not-taken) | bimodal")
        ->check(CLI::IsMember({"none", "bimodal"}))
        ->capture_default_str();
    app.add_option("--bp-entries", bp_entries, "bimodal table entries (power of two)")->capture_default_str();
    app.add_option("--max-instr", max_instr, "retired-instruction budget")->capture_default_str();
    app.add_option("--max-cycles", max_cycles, "cycle budget")->capture_default_str();
    app.add_option("--mem-size", mem_size, "address space size in bytes")->capture_default_str();
    app.add_flag("--debug-no-forwarding", no_forwarding)->group("");
  }

  RunConfig config() const {
    RunConfig cfg;
    cfg.mode = *mode_from_string(mode);
    const std::string model = mem.empty() ? (cfg.mode == Mode::pipe_cache ? "cached" : "ideal") : mem;
    cfg.mem.model = model == "cached" ? MemModel::cached : model == "flat" ? MemModel::flat : MemModel::ideal;
    cfg.mem.mem_latency = mem_latency;
    cfg.mem.cache.sets = cache_sets;
    cfg.mem.cache.block_bytes = cache_block;
    cfg.predictor.kind = bp == "bimodal" ? PredictorKind::bimodal : PredictorKind::static_not_taken;
    cfg.predictor.entries = bp_entries;
    cfg.limits = {max_instr, max_cycles};
    cfg.address_space = mem_size;
    cfg.forwarding = !no_forwarding;
    cfg.validate();
    if (cfg.predictor.kind == PredictorKind::bimodal && (bp_entries == 0 || (bp_entries & (bp_entries - 1)))) {
      throw ConfigError("--bp-entries must be a power of two");
    }
    return cfg;
  }
};

std::uint32_t parse_address(const std::string& text) {
  const auto v = asm_detail::parse_number(text);
  if (!v || *v < 0) throw ConfigError("bad address '" + text + "'");
  return static_cast<std::uint32_t>(*v);
}

std::string cache_line(const char* name, const std::optional<CacheStats>& s) {
  if (!s) return "";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-13s accesses=%llu hits=%llu misses=%llu writebacks=%llu\n", name,
                static_cast<unsigned long long>(s->accesses), static_cast<unsigned long long>(s->hits),
                static_cast<unsigned long long>(s->misses), static_cast<unsigned long long>(s->writebacks));
  return buf;
}

nlohmann::json cache_json(const CacheStats& s) {
  return {{"accesses", s.accesses}, {"hits", s.hits}, {"misses", s.misses}, {"writebacks", s.writebacks}};
}

int exit_code_for(const ExitStatus& st) {
  switch (st.kind) {
    case ExitStatus::Kind::halted:
      return std::clamp(static_cast<std::int32_t>(st.exit_code), 0, 255);
    case ExitStatus::Kind::limit_exceeded: return kExitLimit;
    case ExitStatus::Kind::fault: return kExitFault;
  }
  return kExitFault;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  ModelOptions model;
  std::string image, bin, base = "0";
  std::string trace, stats, pipeviz, regfile;
};

int cmd_run(const RunArgs& a) {
  const RunConfig cfg = [&] {
    RunConfig c = a.model.config();
    c.snapshots = !a.regfile.empty();
    return c;
  }();
  if (a.image.empty() == a.bin.empty()) throw ConfigError("give exactly one of --image or --bin");
  const MemoryImage image = a.image.empty() ? load_bin(a.bin, parse_address(a.base), cfg.address_space)
                                            : load_hex(a.image, cfg.address_space);

  std::ofstream viz;
  OccupancySink sink;
  if (!a.pipeviz.empty()) {
    if (cfg.mode != Mode::pipe && cfg.mode != Mode::pipe_cache) throw ConfigError("--pipeviz requires a pipelined mode");
    viz.open(a.pipeviz, std::ios::trunc);
    if (!viz) throw std::runtime_error("cannot write " + a.pipeviz);
    viz << OccupancyRow::header() << '\n';
    sink = [&](const OccupancyRow& row) { viz << row.format() << '\n'; };
  }

  const RunOutput out = simulate(image, cfg, sink);

  if (!a.trace.empty()) write_trace(a.trace, out.trace);
  if (!a.regfile.empty()) write_snapshots(a.regfile, out.snapshots);

  const TimingStats& st = out.stats;
  std::printf("mode          %s\n", to_string(cfg.mode));
  std::printf("memory        %s\n", to_string(cfg.mem.model));
  std::printf("exit          %s: %s\n", to_string(out.exit.kind), out.exit.detail.c_str());
  std::printf("instructions  %llu\n", static_cast<unsigned long long>(st.instructions));
  std::printf("cycles        %llu\n", static_cast<unsigned long long>(st.cycles));
  std::printf("CPI           %.3f\n", st.cpi());
  std::printf("stalls        %llu\n", static_cast<unsigned long long>(st.stall_cycles));
  std::printf("flushes       %llu\n", static_cast<unsigned long long>(st.flush_cycles));
  std::printf("mem stalls    %llu\n", static_cast<unsigned long long>(st.memory_stall_cycles));
  std::printf("branches      %llu (mispredicted %llu)\n", static_cast<unsigned long long>(st.branches),
              static_cast<unsigned long long>(st.mispredicts));
  std::fputs(cache_line("icache", out.icache).c_str(), stdout);
  std::fputs(cache_line("dcache", out.dcache).c_str(), stdout);

  if (!a.stats.empty()) {
    nlohmann::json j = {
        {"mode", to_string(cfg.mode)},
        {"memory", to_string(cfg.mem.model)},
        {"exit", {{"kind", to_string(out.exit.kind)}, {"code", out.exit.exit_code}, {"detail", out.exit.detail}}},
        {"instructions", st.instructions},
        {"cycles", st.cycles},
        {"cpi", st.cpi()},
        {"stall_cycles", st.stall_cycles},
        {"flush_cycles", st.flush_cycles},
        {"memory_stall_cycles", st.memory_stall_cycles},
        {"branches", st.branches},
        {"mispredicts", st.mispredicts},
    };
    if (out.icache) j["icache"] = cache_json(*out.icache);
    if (out.dcache) j["dcache"] = cache_json(*out.dcache);
    io_detail::spit(a.stats, j.dump(2) + "\n");
  }
  return exit_code_for(out.exit);
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  ModelOptions model;
  std::string image, suite;
  bool regfile = false;
  unsigned threads = 1;
};

int cmd_verify(const VerifyArgs& a) {
  const RunConfig dut = a.model.config();
  if (dut.mode == Mode::ref) throw ConfigError("--dut must be single, pipe or pipe-cache");
  if (a.image.empty() == a.suite.empty()) throw ConfigError("give exactly one of --image or --suite");

  std::vector<std::string> names;
  std::vector<std::string> paths;
  if (!a.image.empty()) {
    names.push_back(fs::path(a.image).stem().string());
    paths.push_back(a.image);
  } else {
    for (const auto& n : read_manifest(a.suite)) {
      names.push_back(n);
      paths.push_back((fs::path(a.suite) / (n + ".hex")).string());
    }
  }
  if (names.empty()) std::fprintf(stderr, "warning: suite is empty\n");

  std::vector<ProgramVerdict> results(names.size());
  std::vector<std::string> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        results[i] = verify_program(load_hex(paths[i], dut.address_space), dut, a.regfile);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(a.threads, static_cast<unsigned>(names.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t passed = 0;
  bool io_error = false;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!errors[i].empty()) {
      std::printf("ERROR %s: %s\n", names[i].c_str(), errors[i].c_str());
      io_error = true;
      continue;
    }
    if (results[i].pass()) {
      ++passed;
      std::printf("PASS %s\n", names[i].c_str());
    } else {
      std::printf("FAIL %s\n%s", names[i].c_str(), results[i].report().c_str());
    }
  }
  std::printf("%zu/%zu PASS\n", passed, names.size());
  if (io_error) return kExitUsage;
  return passed == names.size() ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 1;
  std::vector<std::string> classes{"alu"};
  std::uint32_t count = 1;
  std::string out;
  GenConfig base;
};

int cmd_gen(const GenArgs& a) {
  std::vector<GenConfig> configs;
  for (const auto& c : a.classes) {
    const auto cls = test_class_from_string(c);
    if (!cls) throw ConfigError("unknown class '" + c + "'");
    for (std::uint32_t i = 0; i < a.count; ++i) {
      GenConfig g = a.base;
      g.cls = *cls;
      g.seed = a.seed + i;
      g.validate();
      configs.push_back(g);
    }
  }
  const auto names = emit_suite(configs, a.out);
  std::printf("wrote %zu programs to %s\n", names.size(), a.out.c_str());
  return 0;
}

int cmd_asm(const std::string& in, const std::string& out) {
  const MemoryImage img = assemble(io_detail::slurp(in));
  write_hex(out, img);
  return 0;
}

int cmd_check(const std::string& ref, const std::string& dut, bool regfile) {
  Verdict v;
  if (regfile) {
    v = compare_regfiles(read_snapshots(ref), read_snapshots(dut));
  } else {
    v = compare_traces(read_trace(ref), read_trace(dut));
  }
  std::fputs(format_verdict(v).c_str(), stdout);
  return v.pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rvlab: RV32I reference, single-cycle and pipelined models with lockstep checking"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run an image on one model");
  run.model.add_to(*run_cmd, "ref");
  run_cmd->add_option("--mode", run.model.mode, "ref | single | pipe | pipe-cache")
      ->check(CLI::IsMember({"ref", "single", "pipe", "pipe-cache"}))
      ->capture_default_str();
  run_cmd->add_option("--image", run.image, "hex memory image");
  run_cmd->add_option("--bin", run.bin, "flat binary");
  run_cmd->add_option("--base", run.base, "load address for --bin")->capture_default_str();
  run_cmd->add_option("--trace", run.trace, "write the commit trace here");
  run_cmd->add_option("--stats", run.stats, "write JSON statistics here");
  run_cmd->add_option("--pipeviz", run.pipeviz, "write the per-cycle pipeline occupancy log here");
  run_cmd->add_option("--regfile", run.regfile, "write per-commit register-file snapshots here");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "check a model against the reference on an image or suite");
  verify.model.add_to(*verify_cmd, "pipe");
  verify_cmd->add_option("--dut", verify.model.mode, "single | pipe | pipe-cache")
      ->check(CLI::IsMember({"single", "pipe", "pipe-cache"}))
      ->capture_default_str();
  verify_cmd->add_option("--image", verify.image, "single hex image");
  verify_cmd->add_option("--suite", verify.suite, "directory with manifest.txt");
  verify_cmd->add_flag("--regfile", verify.regfile, "also compare the register file after every commit");
  verify_cmd->add_option("--threads", verify.threads, "parallel simulations")->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate random test programs");
  gen_cmd->add_option("--seed", gen.seed, "first seed")->capture_default_str();
  gen_cmd->add_option("--class", gen.classes, "alu | mem | branch | hazard | mixed (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "programs per class")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--instrs", gen.base.instr_count, "target instructions per program")->capture_default_str();
  gen_cmd->add_option("--data-bytes", gen.base.data_bytes, "data region size")->capture_default_str();
  gen_cmd->add_option("--max-loop-trip", gen.base.max_loop_trip, "loop trip-count bound")->capture_default_str();

  std::string asm_in, asm_out;
  auto* asm_cmd = app.add_subcommand("asm", "assemble a source file into a hex image");
  asm_cmd->add_option("--in", asm_in, "assembly source")->required();
  asm_cmd->add_option("--out", asm_out, "hex image to write")->required();

  std::string check_ref, check_dut;
  bool check_regfile = false;
  auto* check_cmd = app.add_subcommand("check", "compare a DUT trace against a reference trace");
  check_cmd->add_option("--ref", check_ref, "reference trace")->required();
  check_cmd->add_option("--dut", check_dut, "DUT trace")->required();
  check_cmd->add_flag("--regfile", check_regfile, "inputs are register-file snapshot files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(verify);
    if (*gen_cmd) return cmd_gen(gen);
    if (*asm_cmd) return cmd_asm(asm_in, asm_out);
    if (*check_cmd) return cmd_check(check_ref, check_dut, check_regfile);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
