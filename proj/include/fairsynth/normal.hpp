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

#ifndef FAIRSYNTH_NORMAL_HPP_
#define FAIRSYNTH_NORMAL_HPP_

namespace fairsynth {

/// Standard normal CDF, computed through erfc so both tails keep full
/// relative precision.
double StdNormalCdf(double z);

/// Inverse standard normal CDF (Wichura's AS241, ~1e-16 relative accuracy).
/// Throws Error(kDomainError) unless 0 < u < 1.
double StdNormalQuantile(double u);

}  // namespace fairsynth

#endif  // FAIRSYNTH_NORMAL_HPP_
