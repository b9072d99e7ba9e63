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

// Class dictionary: training feature vectors, one per column, grouped by
// class in ascending label order (stable within a class).
struct ClassDictionary {
  Matrix a;                          // m x n_A
  std::vector<std::int32_t> labels;  // class id per column, ascending

  Index dim() const { return a.rows(); }
  Index size() const { return a.cols(); }
};

// Occlusion error dictionary: one occlusion error vector per column, in
// input pair order. May be empty (no occlusion modeling).
struct OcclusionErrorDictionary {
  Matrix b;                               // m x p_B
  std::vector<std::int32_t> pattern_ids;  // pattern id per column

  Index dim() const { return b.rows(); }
  Index size() const { return b.cols(); }
};

// Concatenated dictionary D = [A B] with the class/error split recorded.
struct ConcatDictionary {
  Matrix d;                          // m x (n_A + p_B)
  Index split_index = 0;             // first p_B column (== n_A)
  std::vector<std::int32_t> labels;  // class ids then pattern ids

  Index dim() const { return d.rows(); }
  Index size() const { return d.cols(); }
  auto a() const { return d.leftCols(split_index); }
  auto b() const { return d.rightCols(d.cols() - split_index); }
};

// Build a class dictionary from labeled training features. Columns are
// stably sorted by class label. normalize scales every column to unit
// Euclidean norm (a zero column then raises ZeroVector).
ClassDictionary build_cd(const LabeledFeatureSet& train, bool normalize);

// Build an occlusion error dictionary from positionally paired occluded and
// occlusion-free feature sets. Pair labels must agree; columns keep the
// input pair order. An empty pair list yields an empty dictionary.
OcclusionErrorDictionary build_oed(const LabeledFeatureSet& occluded,
                                   const LabeledFeatureSet& occlusion_free,
                                   bool normalize);

// Concatenate [A B]; dimensions must agree when B is non-empty.
ConcatDictionary concat(const ClassDictionary& cd,
                        const OcclusionErrorDictionary& oed);

}  // namespace sdbe
