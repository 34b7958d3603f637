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

#include "fairsynth/composite.hpp"

#include <algorithm>
#include <string>

#include "fairsynth/error.hpp"

namespace fairsynth {

double FairnessMultiplier(const FprRatio& max_rel_fpr, double parity_threshold) {
  switch (max_rel_fpr.kind) {
    case FprRatio::Kind::kUndefined:
      return 1.0;
    case FprRatio::Kind::kInfinite:
      return 0.0;
    case FprRatio::Kind::kFinite:
      break;
  }
  if (max_rel_fpr.value <= parity_threshold) return 1.0;
  return std::min(1.0, parity_threshold / max_rel_fpr.value);
}

CompositeScore SynthScore(double quality, const FprRatio& max_rel_fpr,
                          double parity_threshold, bool degenerate) {
  if (!(quality >= 0.0 && quality <= 1.0)) {
    throw Error(ErrorCode::kQualityOutOfRange,
                "quality must lie in [0,1], got " + std::to_string(quality));
  }
  if (!(parity_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "parity threshold must be positive");
  }
  CompositeScore s;
  s.quality = quality;
  s.max_rel_fpr = max_rel_fpr;
  s.parity_threshold = parity_threshold;
  s.fairness_mult = FairnessMultiplier(max_rel_fpr, parity_threshold);
  s.synth_score = quality * s.fairness_mult;
  s.degenerate = degenerate;
  s.parity_ok = max_rel_fpr.kind == FprRatio::Kind::kFinite &&
                max_rel_fpr.value <= parity_threshold;
  s.undefined_ratio_warning = !max_rel_fpr.defined();
  return s;
}

}  // namespace fairsynth
