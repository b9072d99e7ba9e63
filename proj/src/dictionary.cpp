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

#include "dictionary.hpp"

#include <algorithm>
#include <numeric>

#include "core.hpp"

namespace sdbe {

namespace {

void normalize_columns_inplace(Matrix& mat, const char* what) {
  for (Index j = 0; j < mat.cols(); ++j) {
    const double norm = mat.col(j).norm();
    if (!(norm > kZeroNormCutoff))
      fail(ErrorCode::ZeroVector,
           std::string(what) + ": zero column at index " + std::to_string(j));
    mat.col(j) /= norm;
  }
}

}  // namespace

ClassDictionary build_cd(const LabeledFeatureSet& train, bool normalize) {
  check_consistent(train, "build_cd");
  if (train.size() == 0) fail(ErrorCode::EmptyInput, "build_cd: no columns");

  // Stable sort of column indices by label keeps input order within a class.
  std::vector<Index> order(static_cast<std::size_t>(train.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
    return train.labels[static_cast<std::size_t>(lhs)] <
           train.labels[static_cast<std::size_t>(rhs)];
  });

  ClassDictionary cd;
  cd.a.resize(train.dim(), train.size());
  cd.labels.resize(static_cast<std::size_t>(train.size()));
  for (Index j = 0; j < train.size(); ++j) {
    cd.a.col(j) = train.features.col(order[static_cast<std::size_t>(j)]);
    cd.labels[static_cast<std::size_t>(j)] =
        train.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  }
  if (normalize) normalize_columns_inplace(cd.a, "build_cd");
  return cd;
}

OcclusionErrorDictionary build_oed(const LabeledFeatureSet& occluded,
                                   const LabeledFeatureSet& occlusion_free,
                                   bool normalize) {
  check_consistent(occluded, "build_oed");
  check_consistent(occlusion_free, "build_oed");
  if (occluded.size() != occlusion_free.size())
    fail(ErrorCode::DimensionMismatch, "build_oed: pair counts differ");
  if (occluded.size() > 0 && occluded.dim() != occlusion_free.dim())
    fail(ErrorCode::DimensionMismatch, "build_oed: feature lengths differ");
  for (Index j = 0; j < occluded.size(); ++j) {
    if (occluded.labels[static_cast<std::size_t>(j)] !=
        occlusion_free.labels[static_cast<std::size_t>(j)])
      fail(ErrorCode::LabelMismatch,
           "build_oed: pair labels differ at index " + std::to_string(j));
  }

  OcclusionErrorDictionary oed;
  oed.b = occluded.features - occlusion_free.features;
  oed.pattern_ids = occluded.labels;
  if (normalize) normalize_columns_inplace(oed.b, "build_oed");
  return oed;
}

ConcatDictionary concat(const ClassDictionary& cd,
                        const OcclusionErrorDictionary& oed) {
  if (cd.size() == 0) fail(ErrorCode::EmptyInput, "concat: empty class dictionary");
  if (oed.size() > 0 && oed.dim() != cd.dim())
    fail(ErrorCode::DimensionMismatch, "concat: dictionary dimensions differ");

  ConcatDictionary out;
  out.split_index = cd.size();
  out.d.resize(cd.dim(), cd.size() + oed.size());
  out.d.leftCols(cd.size()) = cd.a;
  if (oed.size() > 0) out.d.rightCols(oed.size()) = oed.b;
  out.labels = cd.labels;
  out.labels.insert(out.labels.end(), oed.pattern_ids.begin(),
                    oed.pattern_ids.end());
  return out;
}

}  // namespace sdbe
