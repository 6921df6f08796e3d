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
 * @file trace_io.hpp
 * @brief On-disk formats: commit traces, register-file snapshots, hex memory
 * images and flat binaries.
 *
 * Commit trace, one record per line, single spaces, lowercase fixed-width hex:
 *
 *   S<seq> C<cycle> PC=xxxxxxxx IR=xxxxxxxx [RD=nn VAL=xxxxxxxx] [LD|ST=xxxxxxxx DATA=xxxxxxxx]
 *
 * RD is written as two decimal digits. Snapshot files carry one line per
 * commit: `S<seq>` followed by the 32 registers as 8-digit hex words.
 *
 * Hex images: whitespace-separated tokens. `@N` (hex) sets the current WORD
 * index, not a byte address: `@10000` means byte address 0x40000. Every other
 * token is a 1-8 digit hex word stored little-endian at index*4, after which
 * the index advances by one. `//` starts a comment.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvlab/commit.hpp"
#include "rvlab/error.hpp"
#include "rvlab/memory.hpp"

namespace rvlab {

namespace io_detail {

inline bool parse_hex(std::string_view s, std::uint32_t& out, bool lowercase_only) {
  if (s.empty() || s.size() > 8) return false;
  for (char c : s) {
    const bool digit = c >= '0' && c <= '9';
    const bool lower = c >= 'a' && c <= 'f';
    const bool upper = c >= 'A' && c <= 'F';
    if (!digit && !lower && !(upper && !lowercase_only)) return false;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_dec(std::string_view s, std::uint64_t& out) {
  if (s.empty() || s.size() > 20 || (s.size() > 1 && s[0] == '0')) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 10);
  return ec == std::errc() && p == s.data() + s.size();
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::size_t end = next == std::string_view::npos ? line.size() : next;
    out.push_back(line.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline bool fixed_hex_field(std::string_view tok, std::string_view key, std::uint32_t& out) {
  if (tok.size() != key.size() + 8 || tok.substr(0, key.size()) != key) return false;
  return parse_hex(tok.substr(key.size()), out, true);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(++lineno, line);
    pos = nl + 1;
  }
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Commit traces

inline std::string format_record(const CommitRecord& r) {
  char buf[160];
  int n = std::snprintf(buf, sizeof buf, "S%llu C%llu PC=%08x IR=%08x", static_cast<unsigned long long>(r.seq),
                        static_cast<unsigned long long>(r.cycle), r.pc, r.raw);
  std::string line(buf, static_cast<std::size_t>(n));
  if (r.rd) {
    n = std::snprintf(buf, sizeof buf, " RD=%02u VAL=%08x", unsigned{*r.rd}, r.rd_value.value_or(0));
    line.append(buf, static_cast<std::size_t>(n));
  }
  if (r.mem_op != MemOp::none) {
    n = std::snprintf(buf, sizeof buf, " %s=%08x DATA=%08x", r.mem_op == MemOp::load ? "LD" : "ST",
                      r.mem_addr.value_or(0), r.mem_data.value_or(0));
    line.append(buf, static_cast<std::size_t>(n));
  }
  return line;
}

inline CommitRecord parse_record(std::string_view line, std::size_t lineno) {
  using namespace io_detail;
  auto fail = [&](const std::string& why) -> CommitRecord {
    throw ParseError(lineno, why + ": '" + std::string(line) + "'");
  };
  const auto tok = split_spaces(line);
  if (tok.size() != 4 && tok.size() != 6 && tok.size() != 8) return fail("malformed trace record");

  CommitRecord r;
  if (tok[0].size() < 2 || tok[0][0] != 'S' || !parse_dec(tok[0].substr(1), r.seq)) return fail("bad seq field");
  if (tok[1].size() < 2 || tok[1][0] != 'C' || !parse_dec(tok[1].substr(1), r.cycle)) return fail("bad cycle field");
  if (!fixed_hex_field(tok[2], "PC=", r.pc)) return fail("bad PC field");
  if (!fixed_hex_field(tok[3], "IR=", r.raw)) return fail("bad IR field");

  std::size_t i = 4;
  if (i < tok.size() && tok[i].substr(0, 3) == "RD=") {
    const std::string_view d = tok[i].substr(3);
    if (d.size() != 2 || d[0] < '0' || d[0] > '9' || d[1] < '0' || d[1] > '9') return fail("bad RD field");
    const unsigned reg = unsigned(d[0] - '0') * 10 + unsigned(d[1] - '0');
    if (reg > 31) return fail("bad RD field");
    std::uint32_t v = 0;
    if (i + 1 >= tok.size() || !fixed_hex_field(tok[i + 1], "VAL=", v)) return fail("bad VAL field");
    r.rd = static_cast<std::uint8_t>(reg);
    r.rd_value = v;
    i += 2;
  }
  if (i < tok.size()) {
    std::uint32_t addr = 0, data = 0;
    if (fixed_hex_field(tok[i], "LD=", addr)) {
      r.mem_op = MemOp::load;
    } else if (fixed_hex_field(tok[i], "ST=", addr)) {
      r.mem_op = MemOp::store;
    } else {
      return fail("bad memory field");
    }
    if (i + 1 >= tok.size() || !fixed_hex_field(tok[i + 1], "DATA=", data)) return fail("bad DATA field");
    r.mem_addr = addr;
    r.mem_data = data;
    i += 2;
  }
  if (i != tok.size()) return fail("trailing fields");
  return r;
}

inline std::string format_trace(const Trace& trace) {
  std::string out;
  for (const auto& r : trace) {
    out += format_record(r);
    out += '\n';
  }
  return out;
}

/// Blank lines are ignored; anything else must be a well-formed record.
inline Trace parse_trace(std::string_view text) {
  Trace out;
  io_detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (!line.empty()) out.push_back(parse_record(line, lineno));
  });
  return out;
}

inline void write_trace(const std::string& path, const Trace& trace) { io_detail::spit(path, format_trace(trace)); }
inline Trace read_trace(const std::string& path) { return parse_trace(io_detail::slurp(path)); }

// ---------------------------------------------------------------------------
// Register-file snapshots

inline std::string format_snapshots(const std::vector<RegSnapshot>& snaps) {
  std::string out;
  char buf[16];
  for (const auto& s : snaps) {
    out += 'S';
    out += std::to_string(s.seq);
    for (std::uint32_t v : s.regs) {
      std::snprintf(buf, sizeof buf, " %08x", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline std::vector<RegSnapshot> parse_snapshots(std::string_view text) {
  using namespace io_detail;
  std::vector<RegSnapshot> out;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    const auto tok = split_spaces(line);
    RegSnapshot s;
    if (tok.size() != 33 || tok[0].size() < 2 || tok[0][0] != 'S' || !parse_dec(tok[0].substr(1), s.seq)) {
      throw ParseError(lineno, "malformed snapshot line");
    }
    for (std::size_t i = 0; i < 32; ++i) {
      if (tok[i + 1].size() != 8 || !parse_hex(tok[i + 1], s.regs[i], true)) {
        throw ParseError(lineno, "bad register value '" + std::string(tok[i + 1]) + "'");
      }
    }
    out.push_back(s);
  });
  return out;
}

inline void write_snapshots(const std::string& path, const std::vector<RegSnapshot>& s) {
  io_detail::spit(path, format_snapshots(s));
}
inline std::vector<RegSnapshot> read_snapshots(const std::string& path) {
  return parse_snapshots(io_detail::slurp(path));
}

// ---------------------------------------------------------------------------
// Memory images

inline MemoryImage parse_hex(std::string_view text, std::uint32_t address_space = kDefaultAddressSpace) {
  MemoryImage img;
  std::uint64_t index = 0;
  io_detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    std::size_t pos = 0;
    while (true) {
      pos = line.find_first_not_of(" \t\f\v", pos);
      if (pos == std::string_view::npos) break;
      std::size_t end = line.find_first_of(" \t\f\v", pos);
      if (end == std::string_view::npos) end = line.size();
      const std::string_view tok = line.substr(pos, end - pos);
      pos = end;

      std::uint32_t value = 0;
      if (tok[0] == '@') {
        if (!io_detail::parse_hex(tok.substr(1), value, false)) {
          throw ParseError(lineno, "bad address token '" + std::string(tok) + "'");
        }
        index = value;
        continue;
      }
      if (!io_detail::parse_hex(tok, value, false)) throw ParseError(lineno, "non-hex token '" + std::string(tok) + "'");
      const std::uint64_t addr = index * 4;
      if (addr + 4 > address_space) {
        char msg[64];
        std::snprintf(msg, sizeof msg, "word at byte address 0x%llx outside address space",
                      static_cast<unsigned long long>(addr));
        throw ParseError(lineno, msg);
      }
      img.write_word(static_cast<std::uint32_t>(addr), value);
      ++index;
    }
  });
  return img;
}

/// Canonical hex text: an `@` line (8 hex digits) at the start of every run of
/// consecutive words, then one word per line.
inline std::string format_hex(const MemoryImage& img) {
  std::string out;
  char buf[16];
  bool first = true;
  std::uint32_t expected = 0;
  std::uint32_t last_word = 0xffffffffu;
  for (const auto& [addr, byte] : img.bytes) {
    (void)byte;
    const std::uint32_t w = addr >> 2;
    if (!first && w == last_word) continue;
    if (first || w != expected) {
      std::snprintf(buf, sizeof buf, "@%08x\n", w);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%08x\n", img.read_word(w << 2));
    out += buf;
    first = false;
    last_word = w;
    expected = w + 1;
  }
  return out;
}

inline MemoryImage load_hex(const std::string& path, std::uint32_t address_space = kDefaultAddressSpace) {
  return parse_hex(io_detail::slurp(path), address_space);
}
inline void write_hex(const std::string& path, const MemoryImage& img) { io_detail::spit(path, format_hex(img)); }

inline MemoryImage image_from_bytes(std::string_view bytes, std::uint32_t base,
                                    std::uint32_t address_space = kDefaultAddressSpace) {
  if (base % 4 != 0) throw std::invalid_argument("misaligned base address");
  if (std::uint64_t{base} + bytes.size() > address_space) {
    throw std::out_of_range("binary overflows the address space");
  }
  MemoryImage img;
  img.entry_point = base;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    img.bytes[base + static_cast<std::uint32_t>(i)] = static_cast<std::uint8_t>(bytes[i]);
  }
  return img;
}

/// Flat binary copied verbatim to `base`. The entry point is `base`.
inline MemoryImage load_bin(const std::string& path, std::uint32_t base,
                            std::uint32_t address_space = kDefaultAddressSpace) {
  return image_from_bytes(io_detail::slurp(path), base, address_space);
}

}  // namespace rvlab
