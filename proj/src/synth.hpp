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

struct WorldSpec {
  Index m = 256;
  Index k_classes = 10;
  Index class_dim = 5;
  Index k_patterns = 4;
  Index pattern_dim = 3;
  Index train_per_class = 20;
  Index queries_per_class = 30;
  Index pairs_per_pattern = 40;
  double occlusion_energy = 0.5;  // target |eps|_2 / |v0|_2
  double noise_sigma = 0.01;
  double overlap = 0.0;    // 0 = independent spans, 1 = planted shared direction
  bool nonneg_features = false;
  bool idealized = false;  // fully orthogonalized blocks, plain coefficients
  std::uint64_t seed = 0;
};

// A fully synthetic feature world: low-dimensional class subspaces, a set of
// occlusion-error subspaces, and seeded draws of training features, extra
// occluded/occlusion-free pairs and clean/occluded query pairs with exact
// ground truth.
struct SynthWorld {
  WorldSpec spec;
  std::vector<Matrix> class_bases;    // k_classes of m x class_dim
  std::vector<Matrix> pattern_bases;  // k_patterns of m x pattern_dim
  LabeledFeatureSet train;            // labels: class ids
  LabeledFeatureSet pairs_free;       // labels: pattern ids
  LabeledFeatureSet pairs_occluded;   // labels: pattern ids, paired by column
  LabeledFeatureSet queries_clean;    // labels: class ids
  LabeledFeatureSet queries_occluded; // labels: class ids
  Matrix query_eps;                   // exact per-query occlusion error
  std::vector<std::int32_t> query_pattern_ids;

  Index query_count() const { return queries_clean.size(); }
};

SynthWorld generate(const WorldSpec& spec);

// Principal-angle cosines between the joint span of the class bases and the
// joint span of the pattern bases (singular values of the cross-Gram of the
// two orthonormalized spans).
struct AngleReport {
  double min_cosine = 0.0;
  double mean_cosine = 0.0;
  double max_cosine = 0.0;
  Index count = 0;
};

AngleReport subspace_angle_report(const SynthWorld& world);

}  // namespace sdbe
