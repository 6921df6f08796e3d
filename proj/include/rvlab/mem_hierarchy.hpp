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
 * @file mem_hierarchy.hpp
 * @brief Memory timing models: ideal, flat variable-latency, and split
 * direct-mapped I/D caches in front of variable-latency memory.
 *
 * Only timing lives here. Data always comes from the architectural
 * SparseMemory, so the memory model can never change what a program computes.
 *
 * Cache policy: direct-mapped, write-back, write-allocate, blocking.
 *   hit                  -> hit_latency
 *   miss, clean victim   -> mem_latency + hit_latency
 *   miss, dirty victim   -> 2 * mem_latency + hit_latency
 */

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvlab {

enum class MemModel : std::uint8_t { ideal, flat, cached };
enum class AccessKind : std::uint8_t { ifetch, load, store };

inline const char* to_string(MemModel m) {
  switch (m) {
    case MemModel::ideal: return "ideal";
    case MemModel::flat: return "flat";
    case MemModel::cached: return "cached";
  }
  return "?";
}

struct CacheConfig {
  std::uint32_t sets = 64;
  std::uint32_t block_bytes = 16;
  std::uint32_t hit_latency = 1;

  std::uint32_t capacity() const { return sets * block_bytes; }
  unsigned offset_bits() const { return static_cast<unsigned>(std::countr_zero(block_bytes)); }
  unsigned index_bits() const { return static_cast<unsigned>(std::countr_zero(sets)); }
  unsigned tag_bits() const { return 32 - offset_bits() - index_bits(); }

  void validate() const {
    if (!std::has_single_bit(sets)) throw std::invalid_argument("cache sets must be a power of two");
    if (!std::has_single_bit(block_bytes) || block_bytes < 4)
      throw std::invalid_argument("cache block size must be a power of two >= 4");
    if (offset_bits() + index_bits() > 32) throw std::invalid_argument("cache geometry exceeds 32 address bits");
  }
};

struct MemConfig {
  MemModel model = MemModel::ideal;
  std::uint32_t mem_latency = 10;
  CacheConfig cache;

  void validate() const {
    if (mem_latency < 1) throw std::invalid_argument("memory latency must be >= 1");
    if (model == MemModel::cached) cache.validate();
  }
};

struct CacheStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;

  bool operator==(const CacheStats&) const = default;
};

class DirectMappedCache {
 public:
  struct Outcome {
    bool hit;
    bool writeback;
  };

  explicit DirectMappedCache(CacheConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    lines_.resize(cfg_.sets);
  }

  const CacheConfig& config() const { return cfg_; }

  std::uint32_t index_of(std::uint32_t addr) const { return (addr >> cfg_.offset_bits()) & (cfg_.sets - 1); }
  std::uint32_t tag_of(std::uint32_t addr) const {
    const unsigned shift = cfg_.offset_bits() + cfg_.index_bits();
    return shift >= 32 ? 0 : addr >> shift;
  }

  Outcome access(std::uint32_t addr, bool write) {
    Line& line = lines_[index_of(addr)];
    const std::uint32_t tag = tag_of(addr);
    ++stats_.accesses;
    Outcome out{line.valid && line.tag == tag, false};
    if (out.hit) {
      ++stats_.hits;
    } else {
      ++stats_.misses;
      if (line.valid && line.dirty) {
        out.writeback = true;
        ++stats_.writebacks;
      }
      line = Line{true, false, tag};
    }
    if (write) line.dirty = true;
    return out;
  }

  bool contains(std::uint32_t addr) const {
    const Line& line = lines_[index_of(addr)];
    return line.valid && line.tag == tag_of(addr);
  }

  const CacheStats& stats() const { return stats_; }

 private:
  struct Line {
    bool valid = false;
    bool dirty = false;
    std::uint32_t tag = 0;
  };

  CacheConfig cfg_;
  std::vector<Line> lines_;
  CacheStats stats_;
};

/// Timing front end for instruction fetch and data accesses of one core.
class MemorySystem {
 public:
  explicit MemorySystem(MemConfig cfg = {}, std::uint32_t address_space = 1u << 20)
      : cfg_(cfg), address_space_(address_space) {
    cfg_.validate();
    if (cfg_.model == MemModel::cached) {
      icache_.emplace(cfg_.cache);
      dcache_.emplace(cfg_.cache);
    }
  }

  const MemConfig& config() const { return cfg_; }

  /// Latency in cycles (>= 1) of one access; updates cache state and stats.
  unsigned access(std::uint32_t addr, AccessKind kind, unsigned width) {
    if (width != 1 && width != 2 && width != 4) throw std::invalid_argument("access width must be 1, 2 or 4");
    if (addr % width != 0) throw std::invalid_argument("misaligned access to " + std::to_string(addr));
    if (std::uint64_t{addr} + width > address_space_) throw std::out_of_range("access outside address space");

    switch (cfg_.model) {
      case MemModel::ideal: return 1;
      case MemModel::flat: return cfg_.mem_latency;
      case MemModel::cached: break;
    }
    auto& cache = kind == AccessKind::ifetch ? *icache_ : *dcache_;
    const auto out = cache.access(addr, kind == AccessKind::store);
    unsigned latency = cfg_.cache.hit_latency;
    if (!out.hit) latency += cfg_.mem_latency;
    if (out.writeback) latency += cfg_.mem_latency;
    return latency;
  }

  std::optional<CacheStats> icache_stats() const {
    return icache_ ? std::optional<CacheStats>(icache_->stats()) : std::nullopt;
  }
  std::optional<CacheStats> dcache_stats() const {
    return dcache_ ? std::optional<CacheStats>(dcache_->stats()) : std::nullopt;
  }

 private:
  MemConfig cfg_;
  std::uint32_t address_space_;
  std::optional<DirectMappedCache> icache_;
  std::optional<DirectMappedCache> dcache_;
};

}  // namespace rvlab
