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

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace rvlab {

inline constexpr std::uint32_t kDefaultAddressSpace = 1u << 20;  // 1 MiB
inline constexpr std::uint32_t kTextBase = 0x0000'0000;
inline constexpr std::uint32_t kDataBase = 0x0001'0000;

/// Initial memory contents: a sparse byte map plus the entry point.
struct MemoryImage {
  std::map<std::uint32_t, std::uint8_t> bytes;
  std::uint32_t entry_point = 0;

  void write_word(std::uint32_t addr, std::uint32_t word) {
    for (unsigned i = 0; i < 4; ++i) bytes[addr + i] = static_cast<std::uint8_t>(word >> (8 * i));
  }
  std::uint32_t read_word(std::uint32_t addr) const {
    std::uint32_t w = 0;
    for (unsigned i = 0; i < 4; ++i) {
      auto it = bytes.find(addr + i);
      if (it != bytes.end()) w |= std::uint32_t{it->second} << (8 * i);
    }
    return w;
  }
  bool empty() const { return bytes.empty(); }
  bool operator==(const MemoryImage&) const = default;
};

/// Byte-addressable little-endian store over [0, size). Pages are allocated
/// on first write; unwritten bytes read as zero.
class SparseMemory {
 public:
  static constexpr std::uint32_t kPageBits = 12;
  static constexpr std::uint32_t kPageSize = 1u << kPageBits;
  using Page = std::array<std::uint8_t, kPageSize>;

  explicit SparseMemory(std::uint32_t size = kDefaultAddressSpace) : size_(size) {
    if (size == 0) throw std::invalid_argument("address space must be non-empty");
  }

  std::uint32_t size() const { return size_; }

  bool in_range(std::uint32_t addr, unsigned width) const {
    return std::uint64_t{addr} + width <= size_;
  }

  std::uint8_t read8(std::uint32_t addr) const {
    auto it = pages_.find(addr >> kPageBits);
    return it == pages_.end() ? 0 : it->second[addr & (kPageSize - 1)];
  }

  void write8(std::uint32_t addr, std::uint8_t value) {
    auto [it, inserted] = pages_.try_emplace(addr >> kPageBits);
    if (inserted) it->second.fill(0);
    it->second[addr & (kPageSize - 1)] = value;
  }

  /// Little-endian read of `width` bytes, zero-extended. Caller checks range.
  std::uint32_t read(std::uint32_t addr, unsigned width) const {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < width; ++i) v |= std::uint32_t{read8(addr + i)} << (8 * i);
    return v;
  }

  void write(std::uint32_t addr, unsigned width, std::uint32_t value) {
    for (unsigned i = 0; i < width; ++i) write8(addr + i, static_cast<std::uint8_t>(value >> (8 * i)));
  }

  void load(const MemoryImage& image) {
    for (auto [addr, byte] : image.bytes) {
      if (addr >= size_) throw std::out_of_range("image byte outside address space");
      write8(addr, byte);
    }
  }

  /// Nonzero bytes only, so two memories with equal contents compare equal
  /// regardless of which pages happen to be allocated.
  std::map<std::uint32_t, std::uint8_t> nonzero_bytes() const {
    std::map<std::uint32_t, std::uint8_t> out;
    for (const auto& [page, data] : pages_) {
      for (std::uint32_t i = 0; i < kPageSize; ++i) {
        if (data[i] != 0) out.emplace((page << kPageBits) | i, data[i]);
      }
    }
    return out;
  }

 private:
  std::uint32_t size_;
  std::unordered_map<std::uint32_t, Page> pages_;
};

}  // namespace rvlab
