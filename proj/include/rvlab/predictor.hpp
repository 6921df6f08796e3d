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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rvlab {

enum class PredictorKind : std::uint8_t { static_not_taken, bimodal };

struct PredictorConfig {
  PredictorKind kind = PredictorKind::static_not_taken;
  std::uint32_t entries = 64;
};

/// Direction predictor for conditional branches. The bimodal table holds
/// 2-bit saturating counters (0..3, reset to 1 = weakly not-taken), indexed
/// by pc bits [2, 2 + log2(entries)). Taken iff counter >= 2.
class BranchPredictor {
 public:
  explicit BranchPredictor(PredictorConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.kind == PredictorKind::bimodal) {
      if (!std::has_single_bit(cfg_.entries)) throw std::invalid_argument("predictor entries must be a power of two");
      table_.assign(cfg_.entries, kWeakNotTaken);
    }
  }

  PredictorKind kind() const { return cfg_.kind; }

  std::uint32_t index(std::uint32_t pc) const { return (pc >> 2) & (cfg_.entries - 1); }

  bool predict(std::uint32_t pc) const {
    if (cfg_.kind == PredictorKind::static_not_taken) return false;
    return table_[index(pc)] >= 2;
  }

  void update(std::uint32_t pc, bool taken) {
    if (cfg_.kind == PredictorKind::static_not_taken) return;
    std::uint8_t& c = table_[index(pc)];
    if (taken && c < 3) ++c;
    if (!taken && c > 0) --c;
  }

  /// Counter value for `pc`; 0 under static prediction.
  std::uint8_t counter(std::uint32_t pc) const {
    return cfg_.kind == PredictorKind::bimodal ? table_[index(pc)] : 0;
  }

  void set_counter(std::uint32_t pc, std::uint8_t value) {
    if (cfg_.kind == PredictorKind::bimodal) table_[index(pc)] = value > 3 ? 3 : value;
  }

 private:
  static constexpr std::uint8_t kWeakNotTaken = 1;
  PredictorConfig cfg_;
  std::vector<std::uint8_t> table_;
};

}  // namespace rvlab
