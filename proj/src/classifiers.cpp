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

#include "classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sdbe {

std::int32_t nn_classify(const LabeledFeatureSet& prototypes, const Vector& v) {
  check_consistent(prototypes, "nn_classify");
  if (prototypes.size() == 0)
    fail(ErrorCode::EmptyInput, "nn_classify: no prototypes");
  if (prototypes.dim() != v.size())
    fail(ErrorCode::DimensionMismatch, "nn_classify: query length mismatch");

  Index best = 0;
  double best_dist = (prototypes.features.col(0) - v).squaredNorm();
  for (Index j = 1; j < prototypes.size(); ++j) {
    const double dist = (prototypes.features.col(j) - v).squaredNorm();
    if (dist < best_dist) {  // strict: ties keep the lowest index
      best_dist = dist;
      best = j;
    }
  }
  return prototypes.labels[static_cast<std::size_t>(best)];
}

namespace {

// Column-wise max-subtracted softmax of a logit matrix, in place.
void softmax_columns(Matrix& z) {
  for (Index j = 0; j < z.cols(); ++j) {
    z.col(j).array() -= z.col(j).maxCoeff();
    z.col(j) = z.col(j).array().exp();
    z.col(j) /= z.col(j).sum();
  }
}

double loss_of(const Matrix& probs, const std::vector<Index>& rows,
               const Matrix& weights, double l2_penalty) {
  double nll = 0.0;
  for (Index j = 0; j < probs.cols(); ++j)
    nll -= std::log(std::max(probs(rows[static_cast<std::size_t>(j)], j),
                             1e-300));
  return nll / static_cast<double>(probs.cols()) +
         0.5 * l2_penalty * weights.squaredNorm();
}

}  // namespace

SoftmaxClassifier softmax_train(const LabeledFeatureSet& train,
                                const TrainConfig& config,
                                std::vector<double>* loss_trace) {
  check_consistent(train, "softmax_train");
  if (train.size() == 0) fail(ErrorCode::EmptyInput, "softmax_train: no data");
  if (config.epochs < 1)
    fail(ErrorCode::InvalidArgument, "softmax_train: epochs must be >= 1");
  if (!(config.learning_rate > 0.0))
    fail(ErrorCode::InvalidArgument,
         "softmax_train: learning rate must be positive");
  if (config.l2_penalty < 0.0)
    fail(ErrorCode::InvalidArgument, "softmax_train: negative penalty");

  std::map<std::int32_t, Index> row_of;
  for (std::int32_t label : train.labels) row_of.emplace(label, 0);
  if (row_of.size() < 2)
    fail(ErrorCode::DegenerateLabels,
         "softmax_train: need at least two distinct classes");
  SoftmaxClassifier clf;
  for (auto& [label, row] : row_of) {
    row = static_cast<Index>(clf.class_ids.size());
    clf.class_ids.push_back(label);
  }

  const Index k = static_cast<Index>(clf.class_ids.size());
  const Index m = train.dim();
  const Index n = train.size();
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    rows[static_cast<std::size_t>(j)] =
        row_of.at(train.labels[static_cast<std::size_t>(j)]);

  // Zero start keeps training deterministic and preserves any symmetry of
  // the data in every iterate.
  clf.weights = Matrix::Zero(k, m);
  clf.bias = Vector::Zero(k);

  const Matrix& x = train.features;
  const double inv_n = 1.0 / static_cast<double>(n);
  double rate = config.learning_rate;

  Matrix probs = clf.weights * x;  // zero logits on the first pass
  probs.colwise() += clf.bias;
  softmax_columns(probs);
  double loss = loss_of(probs, rows, clf.weights, config.l2_penalty);
  if (loss_trace) loss_trace->push_back(loss);

  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    Matrix delta = probs;  // P - Y
    for (Index j = 0; j < n; ++j)
      delta(rows[static_cast<std::size_t>(j)], j) -= 1.0;
    const Matrix grad_w =
        inv_n * (delta * x.transpose()) + config.l2_penalty * clf.weights;
    const Vector grad_b = inv_n * delta.rowwise().sum();

    const Matrix w_new = clf.weights - rate * grad_w;
    const Vector b_new = clf.bias - rate * grad_b;
    Matrix probs_new = w_new * x;
    probs_new.colwise() += b_new;
    softmax_columns(probs_new);
    const double loss_new = loss_of(probs_new, rows, w_new, config.l2_penalty);

    if (loss_new > loss) {
      rate *= 0.5;  // reject the step, keep the current point
    } else {
      clf.weights = w_new;
      clf.bias = b_new;
      probs = std::move(probs_new);
      loss = loss_new;
    }
    if (loss_trace) loss_trace->push_back(loss);
  }
  return clf;
}

SoftmaxDecision softmax_classify(const SoftmaxClassifier& clf, const Vector& v) {
  if (clf.classes() < 2)
    fail(ErrorCode::DegenerateLabels, "softmax_classify: untrained classifier");
  if (clf.dim() != v.size())
    fail(ErrorCode::DimensionMismatch, "softmax_classify: length mismatch");

  Vector z = clf.weights * v + clf.bias;
  z.array() -= z.maxCoeff();
  Vector p = z.array().exp();
  p /= p.sum();

  Index best = 0;
  for (Index i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;  // strict: ties keep the lowest class id

  return SoftmaxDecision{clf.class_ids[static_cast<std::size_t>(best)], p};
}

}  // namespace sdbe
