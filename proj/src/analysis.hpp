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

#include "classifiers.hpp"
#include "estimator.hpp"
#include "synth.hpp"

namespace sdbe {

// Pearson correlation coefficient: centered dot product over the product of
// centered norms. Requires length >= 2 and both vectors non-constant.
double pearson(const Vector& x, const Vector& y);

// Correlation structure between class-dictionary and error-dictionary
// columns: all (i, j) column pairs, signed-rho histogram over [-1, 1].
struct CorrReport {
  double mean_abs_rho = 0.0;
  double max_abs_rho = 0.0;
  std::vector<double> bin_edges;       // bins + 1 uniform edges on [-1, 1]
  std::vector<std::int64_t> counts;    // per-bin counts of signed rho
  std::int64_t pair_count = 0;         // pairs measured (excludes skipped)
  std::int64_t skipped = 0;            // pairs with a constant column
};

CorrReport cross_corr_report(const ClassDictionary& cd,
                             const OcclusionErrorDictionary& oed,
                             int bins = 20);

// Evaluation harness over one synthetic world: a no-recovery baseline row
// plus one row per (solver mode, lambda).
enum class EvalMode { Baseline, L2, L1 };

enum class ClassifierChoice { Nn, Softmax };

struct EvalRow {
  double occlusion_energy = 0.0;
  EvalMode mode = EvalMode::Baseline;
  double lambda = 0.0;  // 0 on baseline rows
  double accuracy = 0.0;
  double mean_estimation_error = 0.0;
  double mean_original_error = 0.0;
  std::int64_t query_count = 0;
  bool best = false;  // best accuracy within its (mode, world) sweep
};

struct EvalParams {
  std::vector<double> lambda_grid;
  ModelFlags flags;
  ClassifierChoice classifier = ClassifierChoice::Nn;
  bool include_l2 = true;
  bool include_l1 = false;
  bool mark_best = true;
  L1Settings l1;
  TrainConfig softmax_config;
};

// Row order: baseline, then L2 rows in grid order, then L1 rows in grid
// order. An empty grid yields an empty report. Errors are measured in the
// frame each vector actually reaches the classifier in: estimates against
// the clean feature normalized per the output flag, raw queries against it
// normalized per the query flag. Classifier prototypes follow the same
// frame rule, so comparisons never mix scales.
std::vector<EvalRow> evaluate(const SynthWorld& world,
                              const EvalParams& params);

// Log-spaced 20-point grid from 1e-6 to 10.
std::vector<double> default_lambda_grid();

const char* eval_mode_name(EvalMode mode);

}  // namespace sdbe
