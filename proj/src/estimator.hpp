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

#include <optional>

#include "dictionary.hpp"
#include "solver_l1.hpp"
#include "solver_l2.hpp"

namespace sdbe {

enum class Mode { L1, L2 };

struct ModelFlags {
  bool normalize_columns = true;
  bool normalize_query = true;
  bool normalize_output = true;
};

// A fitted estimation model: the concatenated dictionary as used (after
// optional column normalization), the solver mode and its state.
struct SdbeModel {
  ConcatDictionary dict;
  Mode mode = Mode::L2;
  double lambda = kDefaultLambda;
  ModelFlags flags;
  std::optional<RidgeOperator> ridge;  // present iff mode == L2
  std::optional<Matrix> gram;          // D^T D cache, present iff mode == L1
  L1Settings l1;                       // solver settings used in L1 mode

  Index dim() const { return dict.dim(); }
};

struct EstimateResult {
  Vector v0_hat;    // clean-feature estimate (output-normalized if flagged)
  Vector alpha;     // class coefficients
  Vector beta;      // occlusion-error coefficients
  Vector residual;  // v_used - D omega_hat
  std::int64_t iterations = 0;   // L1 only
  double kkt_residual = 0.0;     // L1 only
  bool converged = true;
};

// Clean-feature estimate as a single linear map: v0_hat = W v_used with
// W = A P_alpha. Only defined for L2 models.
struct CompiledLinear {
  Matrix w;  // m x m
  double lambda = kDefaultLambda;
  ModelFlags flags;

  Index dim() const { return w.rows(); }
};

// Assemble a model from the two dictionaries. The OED may be empty.
SdbeModel fit(const ClassDictionary& cd, const OcclusionErrorDictionary& oed,
              Mode mode, double lambda, ModelFlags flags = {},
              const L1Settings& l1 = {});

// Recover the clean-feature estimate for one query.
EstimateResult estimate(const SdbeModel& model, const Vector& v);

// Collapse an L2 model into the single m x m map. WrongMode otherwise.
CompiledLinear compile_linear(const SdbeModel& model);

// Apply a compiled map, honoring its query/output normalization flags.
Vector estimate_compiled(const CompiledLinear& compiled, const Vector& v);

}  // namespace sdbe
