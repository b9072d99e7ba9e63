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

#include "containers.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace sdbe {

static_assert(std::endian::native == std::endian::little,
              "container IO assumes a little-endian host");
static_assert(sizeof(double) == 8, "container IO assumes 64-bit doubles");

namespace {

constexpr char kFeatureMagic[8] = {'S', 'D', 'B', 'E', 'F', 'V', '1', '\0'};
constexpr char kModelMagic[8] = {'S', 'D', 'B', 'E', 'M', 'D', '1', '\0'};

void append_bytes(std::vector<std::uint8_t>& out, const void* p,
                  std::size_t n) {
  const auto* b = static_cast<const std::uint8_t*>(p);
  out.insert(out.end(), b, b + n);
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  append_bytes(out, &v, 8);
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
  append_bytes(out, &v, 8);
}

// Sequential little-endian reader over a byte span.
struct Cursor {
  const std::uint8_t* p;
  std::size_t size;
  std::size_t pos = 0;

  std::size_t remaining() const { return size - pos; }

  void read(void* dst, std::size_t n) {
    std::memcpy(dst, p + pos, n);
    pos += n;
  }

  std::uint64_t u64() {
    std::uint64_t v;
    read(&v, 8);
    return v;
  }

  double f64() {
    double v;
    read(&v, 8);
    return v;
  }

  std::uint8_t u8() { return p[pos++]; }
};

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    fail(ErrorCode::NaNPayload,
         std::string(what) + " contains non-finite values");
  }
}

void append_block(std::vector<std::uint8_t>& out, const Matrix& data,
                  const std::vector<std::int32_t>* labels) {
  require_finite(data, "matrix block");
  if (labels && Index(labels->size()) != data.cols()) {
    fail(ErrorCode::LabelCountMismatch,
         "label count does not match column count");
  }
  append_u64(out, std::uint64_t(data.rows()));
  append_u64(out, std::uint64_t(data.cols()));
  if (labels) {
    append_bytes(out, labels->data(), 4 * labels->size());
  } else {
    const std::vector<std::int32_t> zeros(std::size_t(data.cols()), 0);
    append_bytes(out, zeros.data(), 4 * zeros.size());
  }
  append_bytes(out, data.data(), 8 * std::size_t(data.size()));
}

// Reads one (rows, cols, labels, data) block; the caller has already mapped
// short-read positions to the right error codes via `check`.
struct Block {
  Matrix data;
  std::vector<std::int32_t> labels;
};

Block read_block(Cursor& c) {
  if (c.remaining() < 16) {
    fail(ErrorCode::TruncatedPayload, "matrix block header is incomplete");
  }
  const std::uint64_t rows = c.u64();
  const std::uint64_t cols = c.u64();
  const unsigned __int128 label_bytes = (unsigned __int128)(4) * cols;
  const unsigned __int128 data_bytes = (unsigned __int128)(8) * rows * cols;
  if (c.remaining() < label_bytes) {
    fail(ErrorCode::LabelCountMismatch,
         "container holds fewer labels than declared");
  }
  Block b;
  b.labels.resize(std::size_t(cols));
  c.read(b.labels.data(), std::size_t(label_bytes));
  if (c.remaining() < data_bytes) {
    fail(ErrorCode::TruncatedPayload,
         "container holds less data than declared");
  }
  b.data.resize(Index(rows), Index(cols));
  c.read(b.data.data(), std::size_t(data_bytes));
  require_finite(b.data, "matrix block");
  return b;
}

}  // namespace

std::vector<std::uint8_t> encode_features(const LabeledFeatureSet& s) {
  check_consistent(s, "encode_features");
  require_finite(s.features, "feature payload");
  std::vector<std::uint8_t> out;
  out.reserve(24 + 4 * s.labels.size() + 8 * std::size_t(s.features.size()));
  append_bytes(out, kFeatureMagic, 8);
  append_u64(out, std::uint64_t(s.features.rows()));
  append_u64(out, std::uint64_t(s.features.cols()));
  append_bytes(out, s.labels.data(), 4 * s.labels.size());
  append_bytes(out, s.features.data(), 8 * std::size_t(s.features.size()));
  return out;
}

LabeledFeatureSet decode_features(const std::uint8_t* data, std::size_t size) {
  if (size >= 8 && std::memcmp(data, kFeatureMagic, 8) != 0) {
    fail(ErrorCode::BadMagic, "not a feature container");
  }
  if (size < 24) {
    fail(ErrorCode::TruncatedHeader, "feature container header is incomplete");
  }
  Cursor c{data, size};
  c.pos = 8;
  const std::uint64_t m = c.u64();
  const std::uint64_t n = c.u64();
  const unsigned __int128 labels_end =
      (unsigned __int128)(24) + (unsigned __int128)(4) * n;
  const unsigned __int128 total =
      labels_end + (unsigned __int128)(8) * m * n;
  if (size < labels_end) {
    fail(ErrorCode::LabelCountMismatch,
         "container holds fewer labels than declared");
  }
  if (size < total) {
    fail(ErrorCode::TruncatedPayload,
         "container holds less data than declared");
  }
  if (size > total) {
    fail(ErrorCode::TrailingBytes, "container has bytes past the declared end");
  }
  LabeledFeatureSet s;
  s.labels.resize(std::size_t(n));
  c.read(s.labels.data(), std::size_t(4 * n));
  s.features.resize(Index(m), Index(n));
  c.read(s.features.data(), std::size_t(8 * m * n));
  require_finite(s.features, "feature payload");
  return s;
}

void save_features(const std::string& path, const LabeledFeatureSet& s) {
  const std::vector<std::uint8_t> bytes = encode_features(s);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path);
}

namespace {

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) fail(ErrorCode::Io, "cannot open: " + path);
  const std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0) {
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) fail(ErrorCode::Io, "read failed: " + path);
  }
  return bytes;
}

}  // namespace

LabeledFeatureSet load_features(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  return decode_features(bytes.data(), bytes.size());
}

namespace {

std::uint8_t flags_to_byte(const ModelFlags& f) {
  return std::uint8_t((f.normalize_columns ? 1 : 0) |
                      (f.normalize_query ? 2 : 0) |
                      (f.normalize_output ? 4 : 0));
}

ModelFlags flags_from_byte(std::uint8_t b) {
  if (b & ~std::uint8_t(7)) {
    fail(ErrorCode::InvalidArgument, "unknown flag bits in model container");
  }
  ModelFlags f;
  f.normalize_columns = b & 1;
  f.normalize_query = b & 2;
  f.normalize_output = b & 4;
  return f;
}

void append_model_header(std::vector<std::uint8_t>& out, ModelKind kind,
                         double lambda, const ModelFlags& flags,
                         std::uint64_t split) {
  append_bytes(out, kModelMagic, 8);
  out.push_back(std::uint8_t(kind));
  append_f64(out, lambda);
  out.push_back(flags_to_byte(flags));
  append_u64(out, split);
}

constexpr std::size_t kModelHeaderSize = 8 + 1 + 8 + 1 + 8;

}  // namespace

std::vector<std::uint8_t> encode_model(const SdbeModel& model) {
  std::vector<std::uint8_t> out;
  const ModelKind kind =
      model.mode == Mode::L1 ? ModelKind::L1 : ModelKind::L2;
  append_model_header(out, kind, model.lambda, model.flags,
                      std::uint64_t(model.dict.split_index));
  append_block(out, model.dict.d, &model.dict.labels);
  if (model.mode == Mode::L2) {
    if (!model.ridge) {
      fail(ErrorCode::WrongMode, "L2 model is missing its solution operator");
    }
    append_block(out, model.ridge->p, nullptr);
  }
  return out;
}

std::vector<std::uint8_t> encode_compiled(const CompiledLinear& compiled) {
  std::vector<std::uint8_t> out;
  append_model_header(out, ModelKind::Compiled, compiled.lambda,
                      compiled.flags, 0);
  append_block(out, compiled.w, nullptr);
  return out;
}

LoadedModel decode_model(const std::uint8_t* data, std::size_t size) {
  if (size >= 8 && std::memcmp(data, kModelMagic, 8) != 0) {
    fail(ErrorCode::BadMagic, "not a model container");
  }
  if (size < kModelHeaderSize) {
    fail(ErrorCode::TruncatedHeader, "model container header is incomplete");
  }
  Cursor c{data, size};
  c.pos = 8;
  const std::uint8_t mode_byte = c.u8();
  const double lambda = c.f64();
  const ModelFlags flags = flags_from_byte(c.u8());
  const std::uint64_t split = c.u64();
  if (std::isnan(lambda)) {
    fail(ErrorCode::NaNPayload, "model lambda is not a number");
  }
  if (lambda <= 0.0) {
    fail(ErrorCode::InvalidArgument, "model lambda must be positive");
  }
  if (mode_byte < 1 || mode_byte > 3) {
    fail(ErrorCode::WrongMode, "model container mode byte is unknown");
  }

  LoadedModel loaded;
  loaded.kind = ModelKind(mode_byte);
  if (loaded.kind == ModelKind::Compiled) {
    Block w = read_block(c);
    if (c.remaining() > 0) {
      fail(ErrorCode::TrailingBytes,
           "container has bytes past the declared end");
    }
    if (w.data.rows() != w.data.cols()) {
      fail(ErrorCode::DimensionMismatch, "compiled map must be square");
    }
    CompiledLinear compiled;
    compiled.w = std::move(w.data);
    compiled.lambda = lambda;
    compiled.flags = flags;
    loaded.compiled = std::move(compiled);
    return loaded;
  }

  Block dict = read_block(c);
  if (Index(split) > dict.data.cols()) {
    fail(ErrorCode::InvalidArgument, "split index exceeds dictionary size");
  }
  SdbeModel model;
  model.dict.d = std::move(dict.data);
  model.dict.labels = std::move(dict.labels);
  model.dict.split_index = Index(split);
  model.lambda = lambda;
  model.flags = flags;
  model.l1.lambda = lambda;
  if (loaded.kind == ModelKind::L1) {
    model.mode = Mode::L1;
    model.gram = model.dict.d.transpose() * model.dict.d;
  } else {
    model.mode = Mode::L2;
    Block p = read_block(c);
    if (p.data.rows() != model.dict.d.cols() ||
        p.data.cols() != model.dict.d.rows()) {
      fail(ErrorCode::DimensionMismatch,
           "solution operator shape does not match the dictionary");
    }
    model.ridge = RidgeOperator{std::move(p.data), lambda,
                                model.dict.split_index};
  }
  if (c.remaining() > 0) {
    fail(ErrorCode::TrailingBytes, "container has bytes past the declared end");
  }
  loaded.model = std::move(model);
  return loaded;
}

void save_model(const std::string& path, const SdbeModel& model) {
  const std::vector<std::uint8_t> bytes = encode_model(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path);
}

void save_compiled(const std::string& path, const CompiledLinear& compiled) {
  const std::vector<std::uint8_t> bytes = encode_compiled(compiled);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  return decode_model(bytes.data(), bytes.size());
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) fail(ErrorCode::InvalidArgument, what + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    fail(ErrorCode::InvalidArgument, what + ": not a number: " + t);
  }
  if (!std::isfinite(v)) {
    fail(ErrorCode::InvalidArgument, what + ": not finite: " + t);
  }
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) fail(ErrorCode::InvalidArgument, what + ": empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) {
    fail(ErrorCode::InvalidArgument, what + ": not an integer: " + t);
  }
  return v;
}

std::int32_t parse_label(const std::string& s, const std::string& what) {
  const std::int64_t v = parse_int(s, what);
  if (v < INT32_MIN || v > INT32_MAX) {
    fail(ErrorCode::InvalidArgument, what + ": label out of range");
  }
  return std::int32_t(v);
}

}  // namespace

LabeledFeatureSet read_features_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::vector<std::int32_t> labels;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> cells = split(t, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() < 2) {
      fail(ErrorCode::InvalidArgument,
           where + ": need a label and at least one feature");
    }
    labels.push_back(parse_label(cells[0], where));
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      row.push_back(parse_double(cells[i], where));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::DimensionMismatch,
           where + ": inconsistent feature count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::EmptyInput, path + ": no samples");
  LabeledFeatureSet s;
  s.labels = std::move(labels);
  s.features.resize(Index(rows.front().size()), Index(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < rows[j].size(); ++i) {
      s.features(Index(i), Index(j)) = rows[j][i];
    }
  }
  return s;
}

SoftmaxClassifier read_softmax_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::vector<std::int32_t> ids;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> cells = split(t, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() < 3) {
      fail(ErrorCode::InvalidArgument,
           where + ": need class id, bias and at least one weight");
    }
    ids.push_back(parse_label(cells[0], where));
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      row.push_back(parse_double(cells[i], where));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::DimensionMismatch, where + ": inconsistent width");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    fail(ErrorCode::DegenerateLabels, path + ": need at least two classes");
  }
  SoftmaxClassifier clf;
  clf.class_ids = std::move(ids);
  clf.bias.resize(Index(rows.size()));
  clf.weights.resize(Index(rows.size()), Index(rows.front().size() - 1));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    clf.bias[Index(k)] = rows[k][0];
    for (std::size_t i = 1; i < rows[k].size(); ++i) {
      clf.weights(Index(k), Index(i - 1)) = rows[k][i];
    }
  }
  return clf;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string eval_report_csv(const std::vector<EvalRow>& rows) {
  std::string out =
      "occlusion_energy,mode,lambda,accuracy,mean_estimation_error,"
      "mean_original_error,query_count,best\n";
  for (const EvalRow& r : rows) {
    out += format_double(r.occlusion_energy);
    out += ',';
    out += eval_mode_name(r.mode);
    out += ',';
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.accuracy);
    out += ',';
    out += format_double(r.mean_estimation_error);
    out += ',';
    out += format_double(r.mean_original_error);
    out += ',';
    out += std::to_string(r.query_count);
    out += ',';
    out += r.best ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string corr_report_csv(const CorrReport& report) {
  std::string out = "mean_abs_rho,max_abs_rho,pair_count,skipped\n";
  out += format_double(report.mean_abs_rho);
  out += ',';
  out += format_double(report.max_abs_rho);
  out += ',';
  out += std::to_string(report.pair_count);
  out += ',';
  out += std::to_string(report.skipped);
  out += '\n';
  out += "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < report.counts.size(); ++i) {
    out += format_double(report.bin_edges[i]);
    out += ',';
    out += format_double(report.bin_edges[i + 1]);
    out += ',';
    out += std::to_string(report.counts[i]);
    out += '\n';
  }
  return out;
}

std::string estimate_report_csv(const std::vector<EstimateResult>& results,
                                double tau) {
  if (tau < 0.0) {
    fail(ErrorCode::InvalidArgument, "sparsity threshold must be nonnegative");
  }
  std::string out =
      "query,alpha_nnz,beta_nnz,residual_norm,iterations,kkt_residual,"
      "converged\n";
  for (std::size_t q = 0; q < results.size(); ++q) {
    const EstimateResult& r = results[q];
    const auto nnz = [tau](const Vector& v) {
      std::int64_t count = 0;
      for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > tau) ++count;
      }
      return count;
    };
    out += std::to_string(q);
    out += ',';
    out += std::to_string(nnz(r.alpha));
    out += ',';
    out += std::to_string(nnz(r.beta));
    out += ',';
    out += format_double(r.residual.norm());
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += format_double(r.kkt_residual);
    out += ',';
    out += r.converged ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string classify_report_csv(const std::vector<std::int32_t>& predicted,
                                const std::vector<std::int32_t>* truth) {
  if (truth && truth->size() != predicted.size()) {
    fail(ErrorCode::LabelCountMismatch,
         "true-label count does not match prediction count");
  }
  std::string out = "query,predicted,true_label\n";
  for (std::size_t q = 0; q < predicted.size(); ++q) {
    out += std::to_string(q);
    out += ',';
    out += std::to_string(predicted[q]);
    out += ',';
    if (truth) out += std::to_string((*truth)[q]);
    out += '\n';
  }
  return out;
}

namespace {

bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  fail(ErrorCode::BadConfig, what + ": expected on/off, got: " + t);
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> values;
  for (const std::string& part : split(s, ',')) {
    values.push_back(parse_double(part, what));
  }
  return values;
}

Index parse_count(const std::string& s, const std::string& what) {
  const std::int64_t v = parse_int(s, what);
  if (v < 0) fail(ErrorCode::BadConfig, what + ": must be nonnegative");
  return Index(v);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    if (eq == std::string::npos) {
      fail(ErrorCode::BadConfig, where + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::BadConfig, where + ": empty key");
    if (!seen.insert(key).second) {
      fail(ErrorCode::BadConfig, where + ": duplicate key: " + key);
    }

    if (key == "seed") {
      cfg.world.seed = std::uint64_t(parse_int(value, key));
    } else if (key == "m") {
      cfg.world.m = parse_count(value, key);
    } else if (key == "k_classes") {
      cfg.world.k_classes = parse_count(value, key);
    } else if (key == "class_dim") {
      cfg.world.class_dim = parse_count(value, key);
    } else if (key == "k_patterns") {
      cfg.world.k_patterns = parse_count(value, key);
    } else if (key == "pattern_dim") {
      cfg.world.pattern_dim = parse_count(value, key);
    } else if (key == "train_per_class") {
      cfg.world.train_per_class = parse_count(value, key);
    } else if (key == "queries_per_class") {
      cfg.world.queries_per_class = parse_count(value, key);
    } else if (key == "pairs_per_pattern") {
      cfg.world.pairs_per_pattern = parse_count(value, key);
    } else if (key == "noise_sigma") {
      cfg.world.noise_sigma = parse_double(value, key);
    } else if (key == "overlap") {
      cfg.world.overlap = parse_double(value, key);
    } else if (key == "nonneg_features") {
      cfg.world.nonneg_features = parse_bool(value, key);
    } else if (key == "idealized") {
      cfg.world.idealized = parse_bool(value, key);
    } else if (key == "occlusion_energies") {
      cfg.occlusion_energies = parse_double_list(value, key);
      if (cfg.occlusion_energies.empty()) {
        fail(ErrorCode::BadConfig, "occlusion_energies: empty list");
      }
    } else if (key == "lambda_grid") {
      cfg.lambda_grid = parse_double_list(value, key);
      if (cfg.lambda_grid.empty()) {
        fail(ErrorCode::BadConfig, "lambda_grid: empty list");
      }
    } else if (key == "modes") {
      cfg.include_l2 = false;
      cfg.include_l1 = false;
      for (const std::string& part : split(value, ',')) {
        const std::string mode = trim(part);
        if (mode == "l2") {
          cfg.include_l2 = true;
        } else if (mode == "l1") {
          cfg.include_l1 = true;
        } else {
          fail(ErrorCode::BadConfig, "modes: expected l1/l2, got: " + mode);
        }
      }
    } else if (key == "classifier") {
      const std::string v = trim(value);
      if (v == "nn") {
        cfg.classifier = ClassifierChoice::Nn;
      } else if (v == "softmax") {
        cfg.classifier = ClassifierChoice::Softmax;
      } else {
        fail(ErrorCode::BadConfig, "classifier: expected nn/softmax");
      }
    } else if (key == "normalize_columns") {
      cfg.flags.normalize_columns = parse_bool(value, key);
    } else if (key == "normalize_query") {
      cfg.flags.normalize_query = parse_bool(value, key);
    } else if (key == "normalize_output") {
      cfg.flags.normalize_output = parse_bool(value, key);
    } else if (key == "mark_best") {
      cfg.mark_best = parse_bool(value, key);
    } else if (key == "kkt_tol") {
      cfg.l1.kkt_tol = parse_double(value, key);
    } else if (key == "max_iters") {
      cfg.l1.max_iters = parse_int(value, key);
    } else if (key == "out") {
      cfg.out = value;
    } else {
      fail(ErrorCode::BadConfig, where + ": unknown key: " + key);
    }
  }
  return cfg;
}

std::vector<EvalRow> eval_run(const RunConfig& config) {
  EvalParams params;
  params.lambda_grid =
      config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
  params.flags = config.flags;
  params.classifier = config.classifier;
  params.include_l2 = config.include_l2;
  params.include_l1 = config.include_l1;
  params.mark_best = config.mark_best;
  params.l1 = config.l1;

  std::vector<EvalRow> rows;
  for (const double energy : config.occlusion_energies) {
    WorldSpec spec = config.world;
    spec.occlusion_energy = energy;
    const SynthWorld world = generate(spec);
    const std::vector<EvalRow> part = evaluate(world, params);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open: " + path);
  std::ostringstream out;
  out << f.rdbuf();
  if (f.bad()) fail(ErrorCode::Io, "read failed: " + path);
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  f.write(text.data(), std::streamsize(text.size()));
  if (!f) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace sdbe
