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

// Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rvlab/assembler.hpp"
#include "rvlab/checker.hpp"
#include "rvlab/simulate.hpp"
#include "rvlab/testgen.hpp"
#include "rvlab/trace_io.hpp"

using namespace rvlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int sh(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cli() { return RVLAB_CLI; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rvlab_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Dut {
  const char* label;
  RunConfig cfg;
};

std::vector<Dut> duts() {
  std::vector<Dut> d;
  RunConfig single;
  single.mode = Mode::single;
  d.push_back({"single", single});
  RunConfig pipe;
  pipe.mode = Mode::pipe;
  d.push_back({"pipe/static", pipe});
  pipe.predictor.kind = PredictorKind::bimodal;
  d.push_back({"pipe/bimodal", pipe});
  RunConfig cached;
  cached.mode = Mode::pipe_cache;
  cached.mem.model = MemModel::cached;
  d.push_back({"pipe-cache", cached});
  return d;
}

std::vector<GenConfig> lockstep_configs() {
  std::vector<GenConfig> out;
  for (TestClass c : kAllClasses) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      GenConfig g;
      g.cls = c;
      g.seed = seed;
      out.push_back(g);
    }
  }
  return out;
}

// Criteria 1 and 4 share the same runs.
struct LockstepResult {
  std::size_t programs = 0, comparisons = 0, divergences = 0;
  std::size_t snapshots = 0, x0_violations = 0, commits = 0, misaligned_pcs = 0;
  double seconds = 0;
  std::string first_failure;
};

LockstepResult lockstep() {
  LockstepResult r;
  const auto t0 = std::chrono::steady_clock::now();
  const auto dut_list = duts();
  for (const GenConfig& g : lockstep_configs()) {
    const MemoryImage img = generate(g).image;
    ++r.programs;
    RunConfig refcfg;
    refcfg.snapshots = true;
    const RunOutput ref = simulate(img, refcfg);
    std::vector<const RunOutput*> all = {&ref};
    std::vector<RunOutput> outs;
    outs.reserve(dut_list.size());
    for (const Dut& d : dut_list) {
      RunConfig cfg = d.cfg;
      cfg.snapshots = true;
      outs.push_back(simulate(img, cfg));
      const RunOutput& o = outs.back();
      ++r.comparisons;
      const Verdict v = compare_traces(ref.trace, o.trace);
      const Verdict rv = compare_regfiles(ref.snapshots, o.snapshots);
      const bool exit_ok = o.exit == ref.exit;
      if (!v.pass || !rv.pass || !exit_ok || ref.exit.kind != ExitStatus::Kind::halted) {
        ++r.divergences;
        if (r.first_failure.empty()) {
          r.first_failure = program_name(g) + " on " + d.label + ": " + format_verdict(v.pass ? rv : v);
        }
      }
      all.push_back(&o);
    }
    for (const RunOutput* o : all) {
      for (const auto& s : o->snapshots) {
        ++r.snapshots;
        r.x0_violations += s.regs[0] != 0;
      }
      for (const auto& c : o->trace) {
        ++r.commits;
        r.misaligned_pcs += (c.pc & 3) != 0;
      }
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------

RunOutput pipe_run(const MemoryImage& img, MemModel mem = MemModel::ideal) {
  RunConfig c;
  c.mode = mem == MemModel::cached ? Mode::pipe_cache : Mode::pipe;
  c.mem.model = mem;
  return simulate(img, c);
}

Outcome timing_identities() {
  // N = 100: 99 independent ALU ops + ecall.
  std::string straight;
  for (int i = 0; i < 99; ++i) straight += "addi x" + std::to_string(1 + i % 30) + ", x0, " + std::to_string(i) + "\n";
  straight += "ecall\n";

  // Same length; ten of the ALU pairs become load + dependent use.
  std::string loaduse;
  for (int i = 0; i < 99; ++i) {
    if (i % 9 == 0 && i / 9 < 10) {
      loaduse += "lw x20, 0(x0)\nadd x21, x20, x20\n";
      ++i;
    } else {
      loaduse += "addi x" + std::to_string(1 + i % 19) + ", x0, " + std::to_string(i) + "\n";
    }
  }
  loaduse += "ecall\n";

  const std::string loop = "addi x5, x0, 9\nloop:\naddi x5, x5, -1\nbne x5, x0, loop\necall\n";

  const RunOutput a = pipe_run(assemble(straight));
  const RunOutput b = pipe_run(assemble(loaduse));
  const RunOutput c = pipe_run(assemble(loop));

  std::ostringstream d;
  d << "straight N=" << a.stats.instructions << " cycles=" << a.stats.cycles << "; load-use N=" << b.stats.instructions
    << " cycles=" << b.stats.cycles << " (+" << (b.stats.cycles - a.stats.cycles) << ", stalls="
    << b.stats.stall_cycles << "); loop taken back-edges=8 flush=" << c.stats.flush_cycles
    << " cycles=" << c.stats.cycles;
  const bool ok = a.stats.instructions == 100 && a.stats.cycles == 104 && b.stats.instructions == 100 &&
                  b.stats.cycles == 114 && b.stats.stall_cycles == 10 && c.stats.flush_cycles == 16 &&
                  c.stats.cycles == 40;
  return {ok, d.str()};
}

Outcome cache_analytics() {
  std::string scan = "lui x6, 0x10\n";
  for (int i = 0; i < 64; ++i) scan += "lw x8, " + std::to_string(4 * i) + "(x6)\n";
  scan += "ecall\n";
  std::string conflict = "lui x6, 0x10\n";
  for (int i = 0; i < 32; ++i) conflict += (i % 2) ? "lw x8, 1024(x6)\n" : "lw x8, 0(x6)\n";
  conflict += "ecall\n";
  const RunOutput s = pipe_run(assemble(scan), MemModel::cached);
  const RunOutput c = pipe_run(assemble(conflict), MemModel::cached);
  std::ostringstream d;
  d << "scan 256B/16B blocks: misses=" << s.dcache->misses << " hits=" << s.dcache->hits
    << "; conflict alternation: hits=" << c.dcache->hits << " misses=" << c.dcache->misses;
  const bool ok = s.dcache->misses == 16 && s.dcache->hits == 48 && c.dcache->hits == 0 && c.dcache->misses == 32;
  return {ok, d.str()};
}

Outcome fault_injection() {
  const fs::path dir = scratch("inject");
  GenConfig g;
  g.cls = TestClass::mixed;
  g.seed = 4242;
  const Trace ref = simulate(generate(g).image, RunConfig{}).trace;
  write_trace((dir / "ref.tr").string(), ref);

  std::mt19937_64 rng(20261015);
  int detected = 0;
  std::string first_miss;
  for (int trial = 0; trial < 100; ++trial) {
    Trace dut = ref;
    const std::size_t i = rng() % dut.size();
    CommitRecord& r = dut[i];
    const std::uint32_t flip = 1u << (rng() % 32);
    switch (rng() % 5) {
      case 0: r.pc ^= flip; break;
      case 1: r.raw ^= flip; break;
      case 2:
        if (r.rd) {
          r.rd_value = *r.rd_value ^ flip;
        } else {
          r.rd = 1;
          r.rd_value = 0;
        }
        break;
      case 3:
        if (r.rd) {
          r.rd = static_cast<std::uint8_t>(*r.rd % 31 + 1);
        } else {
          r.pc ^= flip;
        }
        break;
      default:
        if (r.mem_op != MemOp::none) {
          r.mem_data = *r.mem_data ^ flip;
        } else {
          r.mem_op = MemOp::store;
          r.mem_addr = 0;
          r.mem_data = 0;
        }
        break;
    }
    write_trace((dir / "dut.tr").string(), dut);
    const int rc = sh(cli() + " check --ref " + (dir / "ref.tr").string() + " --dut " + (dir / "dut.tr").string() +
                      " > " + (dir / "out.txt").string());
    const std::string out = io_detail::slurp((dir / "out.txt").string());
    const std::string want = "FAIL at seq " + std::to_string(i) + ":";
    if (rc == 1 && out.rfind(want, 0) == 0) {
      ++detected;
    } else if (first_miss.empty()) {
      first_miss = "trial " + std::to_string(trial) + " index " + std::to_string(i) + " rc=" + std::to_string(rc);
    }
  }
  fs::remove_all(dir);
  return {detected == 100,
          std::to_string(detected) + "/100 corruptions detected at the right index" +
              (first_miss.empty() ? "" : "; first miss: " + first_miss)};
}

// gen + run + check for 20 seeds into `dir`.
bool pipeline_once(const fs::path& dir) {
  if (sh(cli() + " gen --seed 1 --class alu,mem,branch,hazard --count 5 --out " + dir.string() + " > /dev/null") != 0)
    return false;
  for (const auto& name : read_manifest(dir)) {
    const std::string base = (dir / name).string();
    sh(cli() + " run --mode ref --image " + base + ".hex --trace " + base + ".ref.tr --regfile " + base +
       ".ref.rf > " + base + ".ref.txt");
    sh(cli() + " run --mode pipe-cache --bp bimodal --image " + base + ".hex --trace " + base + ".dut.tr --stats " +
       base + ".json --pipeviz " + base + ".viz > " + base + ".dut.txt");
    if (sh(cli() + " check --ref " + base + ".ref.tr --dut " + base + ".dut.tr > " + base + ".check.txt") != 0)
      return false;
  }
  return true;
}

Outcome determinism() {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  if (!pipeline_once(a) || !pipeline_once(b)) return {false, "a gen/run/check step failed"};
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || io_detail::slurp(e.path().string()) != io_detail::slurp(other.string())) ++differing;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++files_b;
  const std::size_t seeds = read_manifest(a).size();
  fs::remove_all(a);
  fs::remove_all(b);
  return {seeds == 20 && differing == 0 && files == files_b,
          std::to_string(seeds) + " seeds, " + std::to_string(files) + " files per run, " +
              std::to_string(differing) + " differ"};
}

Outcome shipped_suite() {
  const fs::path suite = RVLAB_SUITE_DIR;
  if (!fs::exists(suite / "manifest.txt")) return {false, "no suite at " + suite.string()};
  const auto names = read_manifest(suite);
  std::size_t triples = 0;
  for (const auto& n : names) {
    triples += fs::exists(suite / (n + ".s")) && fs::exists(suite / (n + ".hex")) && fs::exists(suite / (n + ".meta"));
  }
  const fs::path tmp = scratch("suite");
  const std::vector<std::string> modes = {"--dut single", "--dut pipe", "--dut pipe --bp bimodal",
                                          "--dut pipe-cache"};
  std::string detail = std::to_string(triples) + " triples;";
  bool ok = triples >= 250 && triples == names.size();
  for (const auto& m : modes) {
    const std::string out = (tmp / "verify.txt").string();
    const int rc = sh(cli() + " verify --regfile --suite " + suite.string() + " " + m + " > " + out);
    const std::string text = io_detail::slurp(out);
    const auto tally = text.substr(text.rfind('\n', text.size() - 2) + 1);
    detail += " [" + m.substr(6) + "] " + tally.substr(0, tally.size() - 1);
    ok = ok && rc == 0 && tally == std::to_string(names.size()) + "/" + std::to_string(names.size()) + " PASS\n";
  }
  fs::remove_all(tmp);
  return {ok, detail};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* what, const Outcome& o) {
    std::printf("%s C%d %s: %s\n", o.pass ? "PASS" : "FAIL", id, what, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };

  const LockstepResult ls = lockstep();
  {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu programs x %zu models, %zu comparisons, %zu divergences, %.1f s",
                  ls.programs, duts().size(), ls.comparisons, ls.divergences, ls.seconds);
    std::string d = buf;
    if (!ls.first_failure.empty()) d += "; first: " + ls.first_failure;
    report(1, "lockstep suite", {ls.programs >= 1000 && ls.divergences == 0 && ls.seconds < 300, d});
  }
  report(2, "timing identities", timing_identities());
  report(3, "cache analytics", cache_analytics());
  report(4, "x0 and pc alignment",
         {ls.snapshots > 0 && ls.x0_violations == 0 && ls.misaligned_pcs == 0,
          std::to_string(ls.snapshots) + " snapshots with x0 != 0: " + std::to_string(ls.x0_violations) + "; " +
              std::to_string(ls.commits) + " commits with misaligned pc: " + std::to_string(ls.misaligned_pcs)});
  report(5, "fault-injection sensitivity", fault_injection());
  report(6, "end-to-end determinism", determinism());
  report(7, "shipped suite", shipped_suite());

  std::printf("%s: %d of 7 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
