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

#include "core.hpp"

namespace sdbe {

Vector normalize_l2(const Vector& v) {
  if (v.size() == 0) fail(ErrorCode::EmptyInput, "normalize_l2: empty vector");
  // stableNorm rescales internally, so extreme magnitudes neither overflow
  // nor underflow before the division.
  const double norm = v.stableNorm();
  if (!(norm > kZeroNormCutoff))
    fail(ErrorCode::ZeroVector, "normalize_l2: vector norm below cutoff");
  return v / norm;
}

OcclusionErrorVector oev(const Vector& occluded, const Vector& clean,
                         std::int32_t pattern_id) {
  if (occluded.size() == 0) fail(ErrorCode::EmptyInput, "oev: empty vectors");
  if (occluded.size() != clean.size())
    fail(ErrorCode::DimensionMismatch, "oev: vector lengths differ");
  return OcclusionErrorVector{occluded - clean, pattern_id};
}

ErrorStats occlusion_error_stats(const Vector& v, const Vector& v0,
                                 double tau) {
  if (v.size() == 0)
    fail(ErrorCode::EmptyInput, "occlusion_error_stats: empty vectors");
  if (v.size() != v0.size())
    fail(ErrorCode::DimensionMismatch,
         "occlusion_error_stats: vector lengths differ");
  if (tau < 0.0)
    fail(ErrorCode::InvalidArgument, "occlusion_error_stats: tau < 0");
  const double ref = v0.norm();
  if (!(ref > kZeroNormCutoff))
    fail(ErrorCode::ZeroVector, "occlusion_error_stats: clean norm is zero");

  ErrorStats stats;
  stats.dim = v.size();
  stats.rel_l2 = (v - v0).norm() / ref;
  Index count = 0;
  for (Index j = 0; j < v.size(); ++j)
    if (std::abs(v[j] - v0[j]) > tau) ++count;
  stats.rel_l0 = static_cast<double>(count) / static_cast<double>(v.size());
  return stats;
}

}  // namespace sdbe
