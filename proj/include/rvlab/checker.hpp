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

// Lockstep trace checker: compares a device-under-test trace against the
// reference record by record and reports the first divergence. Cycle numbers
// are timing, not architecture, and are never compared.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rvlab/commit.hpp"
#include "rvlab/trace_io.hpp"

namespace rvlab {

enum class Field : std::uint8_t { none, pc, raw, rd, rd_value, mem_op, mem_addr, mem_data, regfile, length };

struct Verdict {
  bool pass = true;
  std::optional<std::uint64_t> divergence_seq;
  Field field = Field::none;
  int reg_index = -1;  // for Field::regfile
  std::string expected;
  std::string actual;
  std::vector<CommitRecord> context;  // up to K reference records before the divergence

  std::string field_name() const {
    switch (field) {
      case Field::none: return "none";
      case Field::pc: return "pc";
      case Field::raw: return "raw";
      case Field::rd: return "rd";
      case Field::rd_value: return "rd_value";
      case Field::mem_op: return "mem_op";
      case Field::mem_addr: return "mem_addr";
      case Field::mem_data: return "mem_data";
      case Field::regfile: return "regfile[" + std::to_string(reg_index) + "]";
      case Field::length: return "length";
    }
    return "?";
  }
};

inline constexpr std::size_t kDefaultContext = 5;

namespace check_detail {

inline std::string hex(std::optional<std::uint32_t> v) {
  if (!v) return "none";
  char buf[12];
  std::snprintf(buf, sizeof buf, "%08x", *v);
  return buf;
}

inline std::string reg(std::optional<std::uint8_t> r) { return r ? "x" + std::to_string(*r) : "none"; }

inline std::string op(MemOp m) {
  switch (m) {
    case MemOp::none: return "none";
    case MemOp::load: return "load";
    case MemOp::store: return "store";
  }
  return "?";
}

// First architectural field that differs, in a fixed priority order.
inline std::optional<std::pair<Field, std::pair<std::string, std::string>>> diff(const CommitRecord& e,
                                                                               const CommitRecord& a) {
  if (e.pc != a.pc) return std::pair{Field::pc, std::pair{hex(e.pc), hex(a.pc)}};
  if (e.raw != a.raw) return std::pair{Field::raw, std::pair{hex(e.raw), hex(a.raw)}};
  if (e.rd != a.rd) return std::pair{Field::rd, std::pair{reg(e.rd), reg(a.rd)}};
  if (e.rd_value != a.rd_value) return std::pair{Field::rd_value, std::pair{hex(e.rd_value), hex(a.rd_value)}};
  if (e.mem_op != a.mem_op) return std::pair{Field::mem_op, std::pair{op(e.mem_op), op(a.mem_op)}};
  if (e.mem_addr != a.mem_addr) return std::pair{Field::mem_addr, std::pair{hex(e.mem_addr), hex(a.mem_addr)}};
  if (e.mem_data != a.mem_data) return std::pair{Field::mem_data, std::pair{hex(e.mem_data), hex(a.mem_data)}};
  return std::nullopt;
}

template <typename T>
std::vector<T> window(const std::vector<T>& v, std::size_t at, std::size_t k) {
  const std::size_t end = std::min(at, v.size());
  const std::size_t begin = end > k ? end - k : 0;
  return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)};
}

}  // namespace check_detail

inline Verdict compare_traces(const Trace& ref, const Trace& dut, std::size_t context = kDefaultContext) {
  Verdict v;
  const std::size_t n = std::min(ref.size(), dut.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto d = check_detail::diff(ref[i], dut[i])) {
      v.pass = false;
      v.divergence_seq = i;
      v.field = d->first;
      v.expected = d->second.first;
      v.actual = d->second.second;
      v.context = check_detail::window(ref, i, context);
      return v;
    }
  }
  if (ref.size() != dut.size()) {
    v.pass = false;
    v.divergence_seq = n;
    v.field = Field::length;
    v.expected = std::to_string(ref.size()) + " records";
    v.actual = std::to_string(dut.size()) + " records";
    v.context = check_detail::window(ref.size() > dut.size() ? ref : dut, n, context);
  }
  return v;
}

inline Verdict compare_regfiles(const std::vector<RegSnapshot>& ref, const std::vector<RegSnapshot>& dut) {
  Verdict v;
  const std::size_t n = std::min(ref.size(), dut.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (int r = 0; r < 32; ++r) {
      if (ref[i].regs[r] != dut[i].regs[r]) {
        v.pass = false;
        v.divergence_seq = i;
        v.field = Field::regfile;
        v.reg_index = r;
        v.expected = check_detail::hex(ref[i].regs[r]);
        v.actual = check_detail::hex(dut[i].regs[r]);
        return v;
      }
    }
  }
  if (ref.size() != dut.size()) {
    v.pass = false;
    v.divergence_seq = n;
    v.field = Field::length;
    v.expected = std::to_string(ref.size()) + " snapshots";
    v.actual = std::to_string(dut.size()) + " snapshots";
  }
  return v;
}

/// Human-readable report, as printed by `check`.
inline std::string format_verdict(const Verdict& v) {
  if (v.pass) return "PASS\n";
  std::string out = "FAIL at seq " + std::to_string(*v.divergence_seq) + ": field " + v.field_name() + " expected " +
                    v.expected + " actual " + v.actual + "\n";
  if (!v.context.empty()) {
    out += "context (reference):\n";
    for (const auto& r : v.context) out += "  " + format_record(r) + "\n";
  }
  return out;
}

}  // namespace rvlab
