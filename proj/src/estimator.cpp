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

#include "estimator.hpp"

#include "core.hpp"

namespace sdbe {

namespace {

// Output normalization passes an exactly zero estimate through unchanged: a
// zero estimate arises legitimately (for example from a zero query with
// query normalization off) and must not abort the pipeline.
Vector normalize_output(const Vector& v0_hat) {
  const double norm = v0_hat.norm();
  if (!(norm > kZeroNormCutoff)) return v0_hat;
  return v0_hat / norm;
}

}  // namespace

SdbeModel fit(const ClassDictionary& cd, const OcclusionErrorDictionary& oed,
              Mode mode, double lambda, ModelFlags flags,
              const L1Settings& l1) {
  if (cd.size() == 0) fail(ErrorCode::EmptyInput, "fit: empty class dictionary");
  if (!(lambda > 0.0))
    fail(ErrorCode::InvalidArgument, "fit: lambda must be strictly positive");

  SdbeModel model;
  model.dict = concat(cd, oed);
  model.mode = mode;
  model.lambda = lambda;
  model.flags = flags;
  model.l1 = l1;
  model.l1.lambda = lambda;

  if (flags.normalize_columns) {
    for (Index j = 0; j < model.dict.d.cols(); ++j) {
      const double norm = model.dict.d.col(j).norm();
      if (!(norm > kZeroNormCutoff))
        fail(ErrorCode::ZeroVector,
             "fit: zero dictionary column at index " + std::to_string(j));
      model.dict.d.col(j) /= norm;
    }
  }

  if (mode == Mode::L2) {
    model.ridge = fit_ridge(model.dict.d, lambda, model.dict.split_index);
  } else {
    model.gram = model.dict.d.transpose() * model.dict.d;
  }
  return model;
}

EstimateResult estimate(const SdbeModel& model, const Vector& v) {
  if (v.size() != model.dim())
    fail(ErrorCode::DimensionMismatch, "estimate: query length mismatch");
  if (!v.allFinite())
    fail(ErrorCode::InvalidArgument, "estimate: non-finite query entry");

  const Vector v_used = model.flags.normalize_query ? normalize_l2(v) : v;

  EstimateResult result;
  Vector omega;
  if (model.mode == Mode::L2) {
    omega = solve_l2(*model.ridge, v_used);
  } else {
    const L1Solution sol = solve_l1(model.dict.d, v_used, model.l1, *model.gram);
    omega = sol.omega;
    result.iterations = sol.iterations;
    result.kkt_residual = sol.kkt_residual;
    result.converged = sol.converged;
  }

  const Index split = model.dict.split_index;
  result.alpha = omega.head(split);
  result.beta = omega.tail(omega.size() - split);
  result.residual = v_used - model.dict.d * omega;
  result.v0_hat = model.dict.a() * result.alpha;
  if (model.flags.normalize_output)
    result.v0_hat = normalize_output(result.v0_hat);
  return result;
}

CompiledLinear compile_linear(const SdbeModel& model) {
  if (model.mode != Mode::L2)
    fail(ErrorCode::WrongMode,
         "compile_linear: only the analytic ridge mode collapses to a "
         "linear map");

  CompiledLinear compiled;
  compiled.w = model.dict.a() * model.ridge->p_alpha();
  compiled.lambda = model.lambda;
  compiled.flags = model.flags;
  return compiled;
}

Vector estimate_compiled(const CompiledLinear& compiled, const Vector& v) {
  if (v.size() != compiled.dim())
    fail(ErrorCode::DimensionMismatch,
         "estimate_compiled: query length mismatch");
  if (!v.allFinite())
    fail(ErrorCode::InvalidArgument,
         "estimate_compiled: non-finite query entry");
  const Vector v_used = compiled.flags.normalize_query ? normalize_l2(v) : v;
  Vector v0_hat = compiled.w * v_used;
  if (compiled.flags.normalize_output) v0_hat = normalize_output(v0_hat);
  return v0_hat;
}

}  // namespace sdbe
