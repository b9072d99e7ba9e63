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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"

namespace sdbe {

// Binary feature container, byte layout (all little-endian):
//   magic "SDBEFV1\0" | m: u64 | n: u64 | labels: n x i32 | data: m*n f64
// column-major, file length exactly 8 + 16 + 4n + 8mn. Loading rejects, with
// a distinct error each: wrong magic (BadMagic), length < 24
// (TruncatedHeader), length ending inside the label block
// (LabelCountMismatch), inside the data block (TruncatedPayload), beyond the
// declared end (TrailingBytes), and non-finite payload values (NaNPayload).
std::vector<std::uint8_t> encode_features(const LabeledFeatureSet& s);
LabeledFeatureSet decode_features(const std::uint8_t* data, std::size_t size);
void save_features(const std::string& path, const LabeledFeatureSet& s);
LabeledFeatureSet load_features(const std::string& path);

// Binary model container:
//   magic "SDBEMD1\0" | mode: u8 (1 = L1, 2 = L2, 3 = compiled) | lambda:
//   f64 | flags: u8 (bit0 col-norm, bit1 query-norm, bit2 out-norm) |
//   split_index: u64 | payload blocks
// Each block is (rows: u64 | cols: u64 | labels: cols x i32 | data:
// rows*cols f64). L1 stores the dictionary block; L2 stores the dictionary
// block then the solution-operator block; compiled stores the W block.
// Blocks without meaningful labels store zeros.
enum class ModelKind : std::uint8_t { L1 = 1, L2 = 2, Compiled = 3 };

struct LoadedModel {
  ModelKind kind = ModelKind::L2;
  std::optional<SdbeModel> model;        // L1 / L2
  std::optional<CompiledLinear> compiled;  // compiled
};

std::vector<std::uint8_t> encode_model(const SdbeModel& model);
std::vector<std::uint8_t> encode_compiled(const CompiledLinear& compiled);
LoadedModel decode_model(const std::uint8_t* data, std::size_t size);
void save_model(const std::string& path, const SdbeModel& model);
void save_compiled(const std::string& path, const CompiledLinear& compiled);
LoadedModel load_model(const std::string& path);

// CSV ingestion: one sample per line, label in column 1 followed by the m
// feature values; every line must have the same width.
LabeledFeatureSet read_features_csv(const std::string& path);

// Imported softmax weights: one class per line, "class_id,bias,w1,...,wm".
// Row order fixes the tie-break order.
SoftmaxClassifier read_softmax_csv(const std::string& path);

// CSV emission. All floating-point values use "%.17g", '.' decimal and
// '\n' line endings, so outputs are byte-stable across platforms.
std::string format_double(double v);
std::string eval_report_csv(const std::vector<EvalRow>& rows);
std::string corr_report_csv(const CorrReport& report);
// Coefficient sparsity counts entries with |x| > tau (tau 0 = exact nonzeros).
std::string estimate_report_csv(const std::vector<EstimateResult>& results,
                                double tau = 0.0);
std::string classify_report_csv(const std::vector<std::int32_t>& predicted,
                                const std::vector<std::int32_t>* truth);

// Plain-text key=value run configuration. '#' comments and blank lines are
// allowed; unknown and duplicate keys are BadConfig errors.
struct RunConfig {
  WorldSpec world;  // occlusion_energy ignored; energies below drive it
  std::vector<double> occlusion_energies{0.5};
  std::vector<double> lambda_grid;  // empty means default_lambda_grid()
  bool include_l2 = true;
  bool include_l1 = false;
  ClassifierChoice classifier = ClassifierChoice::Nn;
  ModelFlags flags;
  bool mark_best = true;
  L1Settings l1;
  std::string out;  // empty = stdout
};

RunConfig parse_run_config(const std::string& text);

// Generates one world per occlusion energy (same seed and spec otherwise)
// and concatenates the evaluation rows in energy order.
std::vector<EvalRow> eval_run(const RunConfig& config);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sdbe
