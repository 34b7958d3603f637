// Copyright 2026 The fairsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRSYNTH_COMPOSITE_HPP_
#define FAIRSYNTH_COMPOSITE_HPP_

#include "fairsynth/tstr.hpp"

namespace fairsynth {

inline constexpr double kDefaultParityThreshold = 2.0;

// 1 inside parity, threshold/ratio beyond it, 0 for an infinite ratio and 1
// (with a warning upstream) when no ratio could be computed.
double FairnessMultiplier(const FprRatio& max_rel_fpr,
                          double parity_threshold = kDefaultParityThreshold);

struct CompositeScore {
  double quality = 0.0;
  FprRatio max_rel_fpr;
  double fairness_mult = 1.0;
  double synth_score = 0.0;
  double parity_threshold = kDefaultParityThreshold;
  bool degenerate = false;
  bool parity_ok = false;
  bool undefined_ratio_warning = false;
};

// quality x fairness multiplier. Throws Error(kQualityOutOfRange) unless
// quality is in [0, 1].
CompositeScore SynthScore(double quality, const FprRatio& max_rel_fpr,
                          double parity_threshold = kDefaultParityThreshold,
                          bool degenerate = false);

}  // namespace fairsynth

#endif  // FAIRSYNTH_COMPOSITE_HPP_
