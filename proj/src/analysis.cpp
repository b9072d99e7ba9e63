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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "core.hpp"
#include "error.hpp"

namespace sdbe {

namespace {

bool is_constant(const Vector& x) {
  for (Index i = 1; i < x.size(); ++i) {
    if (x[i] != x[0]) return false;
  }
  return true;
}

// Returns false (instead of throwing) when either vector is constant, so
// report loops can skip-and-count.
bool pearson_checked(const Vector& x, const Vector& y, double& rho) {
  if (x.size() != y.size()) {
    fail(ErrorCode::DimensionMismatch, "pearson needs equal lengths");
  }
  if (x.size() < 2) {
    fail(ErrorCode::InvalidArgument, "pearson needs at least two entries");
  }
  if (is_constant(x) || is_constant(y)) return false;
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx == 0.0 || ny == 0.0) return false;
  rho = std::clamp(xc.dot(yc) / (nx * ny), -1.0, 1.0);
  return true;
}

}  // namespace

double pearson(const Vector& x, const Vector& y) {
  double rho = 0.0;
  if (!pearson_checked(x, y, rho)) {
    fail(ErrorCode::ConstantVector, "pearson is undefined for constant input");
  }
  return rho;
}

CorrReport cross_corr_report(const ClassDictionary& cd,
                             const OcclusionErrorDictionary& oed, int bins) {
  if (bins < 1) fail(ErrorCode::InvalidArgument, "need at least one bin");
  if (oed.size() < 1) {
    fail(ErrorCode::EmptyInput, "error dictionary has no columns");
  }
  if (cd.dim() != oed.dim()) {
    fail(ErrorCode::DimensionMismatch, "dictionary dimensions differ");
  }

  CorrReport report;
  report.bin_edges.resize(std::size_t(bins) + 1);
  report.counts.assign(std::size_t(bins), 0);
  for (int i = 0; i <= bins; ++i) {
    report.bin_edges[std::size_t(i)] = -1.0 + 2.0 * double(i) / double(bins);
  }

  double abs_sum = 0.0;
  for (Index i = 0; i < cd.size(); ++i) {
    for (Index j = 0; j < oed.size(); ++j) {
      double rho = 0.0;
      if (!pearson_checked(cd.a.col(i), oed.b.col(j), rho)) {
        ++report.skipped;
        continue;
      }
      ++report.pair_count;
      abs_sum += std::abs(rho);
      report.max_abs_rho = std::max(report.max_abs_rho, std::abs(rho));
      const int bin = std::min(int((rho + 1.0) / 2.0 * double(bins)),
                               bins - 1);
      ++report.counts[std::size_t(bin)];
    }
  }
  if (report.pair_count > 0) {
    report.mean_abs_rho = abs_sum / double(report.pair_count);
  }
  return report;
}

namespace {

Vector frame(const Vector& v, bool normalized) {
  return normalized ? normalize_l2(v) : v;
}

// Classifier over prototypes in a fixed frame; trains the softmax lazily.
struct Judge {
  const LabeledFeatureSet* prototypes = nullptr;
  ClassifierChoice choice = ClassifierChoice::Nn;
  const TrainConfig* config = nullptr;
  std::optional<SoftmaxClassifier> softmax;

  std::int32_t classify(const Vector& v) {
    if (choice == ClassifierChoice::Nn) {
      return nn_classify(*prototypes, v);
    }
    if (!softmax) softmax = softmax_train(*prototypes, *config);
    return softmax_classify(*softmax, v).label;
  }
};

LabeledFeatureSet framed_set(const LabeledFeatureSet& s, bool normalized) {
  if (!normalized) return s;
  LabeledFeatureSet out;
  out.labels = s.labels;
  out.features.resize(s.features.rows(), s.features.cols());
  for (Index j = 0; j < s.features.cols(); ++j) {
    out.features.col(j) = normalize_l2(s.features.col(j));
  }
  return out;
}

}  // namespace

std::vector<EvalRow> evaluate(const SynthWorld& world,
                              const EvalParams& params) {
  if (params.lambda_grid.empty()) return {};
  const Index n = world.query_count();
  if (n == 0) fail(ErrorCode::EmptyInput, "world has no queries");

  const bool query_frame = params.flags.normalize_query;
  const bool output_frame = params.flags.normalize_output;

  // Prototype sets per frame, built once. The raw-query frame judges
  // baseline rows; the estimate frame judges recovery rows.
  const LabeledFeatureSet protos_query =
      framed_set(world.train, query_frame);
  const LabeledFeatureSet protos_output =
      query_frame == output_frame ? protos_query
                                  : framed_set(world.train, output_frame);
  Judge judge_query{&protos_query, params.classifier, &params.softmax_config,
                    {}};
  Judge judge_output{&protos_output, params.classifier, &params.softmax_config,
                     {}};

  std::vector<EvalRow> rows;

  // Baseline: classify the raw occluded queries; the "estimate" is the
  // identity, so both error columns measure the raw query.
  {
    EvalRow row;
    row.occlusion_energy = world.spec.occlusion_energy;
    row.mode = EvalMode::Baseline;
    row.lambda = 0.0;
    row.query_count = n;
    std::int64_t correct = 0;
    double err_sum = 0.0;
    for (Index q = 0; q < n; ++q) {
      const Vector v = frame(world.queries_occluded.features.col(q),
                             query_frame);
      const Vector v0 = frame(world.queries_clean.features.col(q),
                              query_frame);
      err_sum += (v - v0).norm();
      if (judge_query.classify(v) == world.queries_clean.labels[std::size_t(q)]) {
        ++correct;
      }
    }
    row.accuracy = double(correct) / double(n);
    row.mean_original_error = err_sum / double(n);
    row.mean_estimation_error = row.mean_original_error;
    rows.push_back(row);
  }

  const ClassDictionary cd = build_cd(world.train, false);
  const OcclusionErrorDictionary oed =
      build_oed(world.pairs_occluded, world.pairs_free, false);

  const auto sweep = [&](Mode mode) {
    const std::size_t first_row = rows.size();
    for (const double lambda : params.lambda_grid) {
      const SdbeModel model =
          fit(cd, oed, mode, lambda, params.flags, params.l1);
      EvalRow row;
      row.occlusion_energy = world.spec.occlusion_energy;
      row.mode = mode == Mode::L2 ? EvalMode::L2 : EvalMode::L1;
      row.lambda = lambda;
      row.query_count = n;
      std::int64_t correct = 0;
      double est_sum = 0.0;
      double orig_sum = 0.0;
      for (Index q = 0; q < n; ++q) {
        const Vector v = world.queries_occluded.features.col(q);
        const Vector v0 = world.queries_clean.features.col(q);
        const EstimateResult r = estimate(model, v);
        est_sum += (r.v0_hat - frame(v0, output_frame)).norm();
        orig_sum += (frame(v, query_frame) - frame(v0, query_frame)).norm();
        if (judge_output.classify(r.v0_hat) ==
            world.queries_clean.labels[std::size_t(q)]) {
          ++correct;
        }
      }
      row.accuracy = double(correct) / double(n);
      row.mean_estimation_error = est_sum / double(n);
      row.mean_original_error = orig_sum / double(n);
      rows.push_back(row);
    }
    if (params.mark_best && rows.size() > first_row) {
      std::size_t best = first_row;
      for (std::size_t i = first_row + 1; i < rows.size(); ++i) {
        if (rows[i].accuracy > rows[best].accuracy) best = i;
      }
      rows[best].best = true;
    }
  };

  if (params.include_l2) sweep(Mode::L2);
  if (params.include_l1) sweep(Mode::L1);
  return rows;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(20);
  for (int i = 0; i < 20; ++i) {
    grid[std::size_t(i)] = std::pow(10.0, -6.0 + 7.0 * double(i) / 19.0);
  }
  return grid;
}

const char* eval_mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::Baseline: return "baseline";
    case EvalMode::L2: return "l2";
    case EvalMode::L1: return "l1";
  }
  return "unknown";
}

}  // namespace sdbe
