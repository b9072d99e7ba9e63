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

// Label of the Euclidean-nearest prototype column. Exact distance ties
// resolve to the lowest prototype index.
std::int32_t nn_classify(const LabeledFeatureSet& prototypes, const Vector& v);

struct TrainConfig {
  double learning_rate = 0.5;
  std::int64_t epochs = 500;
  double l2_penalty = 1e-4;
  std::uint64_t seed = 0;  // reserved for stochastic variants; training is
                           // fully deterministic either way
};

// Multinomial logistic classifier over K >= 2 classes.
struct SoftmaxClassifier {
  Matrix weights;                       // K x m
  Vector bias;                          // K
  std::vector<std::int32_t> class_ids;  // ascending, one per row

  Index classes() const { return weights.rows(); }
  Index dim() const { return weights.cols(); }
};

// Full-batch gradient descent on the cross-entropy loss with an L2 weight
// penalty, from zero initialization. The learning rate is halved whenever a
// step would increase the loss, so the loss trace is non-increasing.
SoftmaxClassifier softmax_train(const LabeledFeatureSet& train,
                                const TrainConfig& config,
                                std::vector<double>* loss_trace = nullptr);

struct SoftmaxDecision {
  std::int32_t label = 0;
  Vector probabilities;  // K entries, sum to 1
};

// Class probabilities via max-subtracted softmax; ties resolve to the
// lowest class index.
SoftmaxDecision softmax_classify(const SoftmaxClassifier& clf, const Vector& v);

}  // namespace sdbe
