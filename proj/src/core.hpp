/*
  Copyright (c) SDBE project contributors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#pragma once

#include "types.hpp"

namespace sdbe {

// Difference between an occlusion-corrupted feature vector and the clean
// feature vector of the same source, tagged with the occlusion pattern.
struct OcclusionErrorVector {
  Vector values;
  std::int32_t pattern_id = 0;
};

// Corruption summary of a feature vector against its clean counterpart.
struct ErrorStats {
  double rel_l2 = 0.0;  // |v - v0|_2 / |v0|_2
  double rel_l0 = 0.0;  // fraction of entries with |v_j - v0_j| > tau
  Index dim = 0;
};

// Norm below which a vector counts as zero for normalization purposes.
inline constexpr double kZeroNormCutoff = 1e-300;

// Default magnitude threshold for counting an entry as nonzero.
inline constexpr double kDefaultTau = 1e-12;

// Scale v to unit Euclidean norm. Throws ZeroVector when |v|_2 <= 1e-300
// and EmptyInput for a zero-length vector. Idempotent up to roundoff.
Vector normalize_l2(const Vector& v);

// Occlusion error vector of a corrupted/clean pair: occluded - clean.
OcclusionErrorVector oev(const Vector& occluded, const Vector& clean,
                         std::int32_t pattern_id = 0);

// Relative error energy and relative support size of v against v0.
// tau is compared strictly: entries with |v_j - v0_j| exactly equal to tau
// are not counted, so exact zeros never count for any tau >= 0.
ErrorStats occlusion_error_stats(const Vector& v, const Vector& v0,
                                 double tau = kDefaultTau);

}  // namespace sdbe
