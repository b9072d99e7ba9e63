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

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace sdbe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A set of feature vectors stored one per column, with an integer label per
// column. Used for training features, query batches, dictionaries and
// prototype sets alike.
struct LabeledFeatureSet {
  Matrix features;                   // m x n
  std::vector<std::int32_t> labels;  // n entries

  Index dim() const { return features.rows(); }
  Index size() const { return features.cols(); }
};

inline void check_consistent(const LabeledFeatureSet& set, const char* what) {
  if (set.labels.size() != static_cast<std::size_t>(set.features.cols()))
    fail(ErrorCode::LabelCountMismatch,
         std::string(what) + ": label count does not match column count");
}

}  // namespace sdbe
