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

#include <filesystem>
#include <fstream>
#include <random>

#include "rvlab/isa.hpp"
#include "rvlab/trace_io.hpp"

using namespace rvlab;

TEST(Trace, NopRecordLine) {
  CommitRecord r;
  r.raw = 0x00000013;
  EXPECT_EQ(format_record(r), "S0 C0 PC=00000000 IR=00000013");
}

TEST(Trace, FullLines) {
  CommitRecord r;
  r.seq = 12;
  r.cycle = 40;
  r.pc = 0x1c;
  r.raw = 0x0002a303;
  r.rd = 6;
  r.rd_value = 0xdeadbeef;
  r.mem_op = MemOp::load;
  r.mem_addr = 0x10000;
  r.mem_data = 0xdeadbeef;
  EXPECT_EQ(format_record(r), "S12 C40 PC=0000001c IR=0002a303 RD=06 VAL=deadbeef LD=00010000 DATA=deadbeef");
  r.rd.reset();
  r.rd_value.reset();
  r.mem_op = MemOp::store;
  EXPECT_EQ(format_record(r), "S12 C40 PC=0000001c IR=0002a303 ST=00010000 DATA=deadbeef");
}

TEST(Trace, RoundTripRandomRecords) {
  std::mt19937_64 rng(5);
  Trace t;
  for (int i = 0; i < 2000; ++i) {
    CommitRecord r;
    r.seq = static_cast<std::uint64_t>(i);
    r.cycle = rng();
    r.pc = static_cast<std::uint32_t>(rng());
    r.raw = static_cast<std::uint32_t>(rng());
    if (rng() % 2) {
      r.rd = static_cast<std::uint8_t>(1 + rng() % 31);
      r.rd_value = static_cast<std::uint32_t>(rng());
    }
    if (const auto k = rng() % 3) {
      r.mem_op = k == 1 ? MemOp::load : MemOp::store;
      r.mem_addr = static_cast<std::uint32_t>(rng());
      r.mem_data = static_cast<std::uint32_t>(rng());
    }
    t.push_back(r);
  }
  EXPECT_EQ(parse_trace(format_trace(t)), t);
}

TEST(Trace, ParseErrorsCarryLine) {
  try {
    parse_trace("garbage");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  const char* bad[] = {
      "S0 C0 PC=0000000 IR=00000013",                          // 7 digits
      "S0 C0 PC=0000000A IR=00000013",                         // uppercase
      "S0 C0  PC=00000000 IR=00000013",                        // double space
      "S0 C0 PC=00000000 IR=00000013 RD=1 VAL=00000000",       // one-digit RD
      "S0 C0 PC=00000000 IR=00000013 RD=32 VAL=00000000",      // no such register
      "S0 C0 PC=00000000 IR=00000013 LD=00000000",             // missing DATA
      "S0 C0 PC=00000000 IR=00000013 XX=00000000 DATA=00000000",
      "Sx C0 PC=00000000 IR=00000013",
  };
  for (const char* line : bad) {
    try {
      parse_trace(std::string("S0 C0 PC=00000000 IR=00000013\n") + line + "\n");
      ADD_FAILURE() << line;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u) << line;
    }
  }
}

TEST(Snapshots, RoundTrip) {
  std::vector<RegSnapshot> s(3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].seq = i;
    for (unsigned r = 1; r < 32; ++r) s[i].regs[r] = static_cast<std::uint32_t>(r * 0x01010101u + i);
  }
  EXPECT_EQ(parse_snapshots(format_snapshots(s)), s);
  EXPECT_THROW(parse_snapshots("S0 00000000\n"), ParseError);
}

TEST(Hex, NopAtZero) {
  const MemoryImage img = parse_hex("@0\n00000013");
  EXPECT_EQ(img.bytes.at(0), 0x13);
  EXPECT_EQ(img.bytes.at(1), 0);
  EXPECT_EQ(img.bytes.at(2), 0);
  EXPECT_EQ(img.bytes.at(3), 0);
  EXPECT_EQ(decode(img.read_word(0)).mnemonic, Mnemonic::ADDI);
}

TEST(Hex, EmptyFileEmptyImage) {
  const MemoryImage img = parse_hex("");
  EXPECT_TRUE(img.empty());
  EXPECT_EQ(img.entry_point, 0u);
}

TEST(Hex, WordIndexAddressing) {
  const MemoryImage img = parse_hex("@10000\ndeadbeef");
  EXPECT_EQ(img.read_word(0x40000), 0xdeadbeefu);
  EXPECT_EQ(img.bytes.at(0x40000), 0xef);
}

TEST(Hex, CommentsShortTokensAndCase) {
  const MemoryImage img = parse_hex("// header\n13 DEADBEEF // two words\n\n@4 1\n");
  EXPECT_EQ(img.read_word(0), 0x13u);
  EXPECT_EQ(img.read_word(4), 0xdeadbeefu);
  EXPECT_EQ(img.read_word(16), 1u);
}

TEST(Hex, Errors) {
  try {
    parse_hex("00000013\n\nxyz\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_hex("123456789"), ParseError);  // 9 digits
  EXPECT_THROW(parse_hex("@40000\n00000000", 1u << 20), ParseError);
  EXPECT_NO_THROW(parse_hex("@3ffff\n00000000", 1u << 20));
}

TEST(Hex, CanonicalFormatRoundTrip) {
  MemoryImage img;
  img.write_word(0, 0x13);
  img.write_word(4, 0x73);
  img.write_word(0x10000, 0xcafef00d);
  const std::string text = format_hex(img);
  EXPECT_EQ(text, "@00000000\n00000013\n00000073\n@00004000\ncafef00d\n");
  EXPECT_EQ(parse_hex(text), img);
  EXPECT_EQ(format_hex(parse_hex(text)), text);
}

TEST(Bin, LoadsVerbatim) {
  const std::string nop("\x13\x00\x00\x00", 4);
  const MemoryImage img = image_from_bytes(nop, 0);
  EXPECT_EQ(decode(img.read_word(0)).mnemonic, Mnemonic::ADDI);
  EXPECT_TRUE(image_from_bytes("", 0).empty());
  EXPECT_THROW(image_from_bytes(nop, 2), std::invalid_argument);
  EXPECT_THROW(image_from_bytes(nop, 1u << 20), std::out_of_range);
  EXPECT_NO_THROW(image_from_bytes(nop, (1u << 20) - 4));
  const MemoryImage at = image_from_bytes(nop, 0x100);
  EXPECT_EQ(at.entry_point, 0x100u);
  EXPECT_EQ(at.read_word(0x100), 0x13u);
}

TEST(Bin, FromFile) {
  const auto path = std::filesystem::temp_directory_path() / "rvlab_test_nop.bin";
  {
    std::ofstream f(path, std::ios::binary);
    f.write("\x13\x00\x00\x00\x73\x00\x00\x00", 8);
  }
  const MemoryImage img = load_bin(path.string(), 0);
  EXPECT_EQ(img.read_word(4), 0x73u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_bin(path.string(), 0), std::runtime_error);
}
