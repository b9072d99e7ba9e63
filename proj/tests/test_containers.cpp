// Copyright (c) SDBE project contributors
// SPDX-License-Identifier: Apache-2.0
//
// Binary containers, CSV readers and writers, and the run-config parser.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "containers.hpp"
#include "dictionary.hpp"
#include "doctest.h"
#include "estimator.hpp"
#include "test_util.hpp"

using namespace sdbe;
using sdbe::testing::random_matrix;
using sdbe::testing::random_vector;
using sdbe::testing::throws_code;

namespace {

// Scratch directory removed when the test block ends.
struct TempDir {
  std::filesystem::path dir;

  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "sdbe_test_XXXXXX").string();
    char* made = ::mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    dir = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

LabeledFeatureSet sample_set(std::uint64_t seed, Index dim, Index count) {
  SplitMix64 rng(seed);
  LabeledFeatureSet s;
  s.features = random_matrix(rng, dim, count);
  s.labels.resize(std::size_t(count));
  for (Index j = 0; j < count; ++j) {
    s.labels[std::size_t(j)] = std::int32_t(j % 3);
  }
  return s;
}

bool same_set(const LabeledFeatureSet& a, const LabeledFeatureSet& b) {
  if (a.labels != b.labels) return false;
  if (a.features.rows() != b.features.rows()) return false;
  if (a.features.cols() != b.features.cols()) return false;
  return (a.features.array() == b.features.array()).all();
}

// Small fitted model over random dictionaries; exercises every model field.
struct ModelFixture {
  LabeledFeatureSet train;
  ClassDictionary cd;
  OcclusionErrorDictionary oed;

  explicit ModelFixture(std::uint64_t seed) {
    SplitMix64 rng(seed);
    train = sample_set(seed, 12, 9);
    cd = build_cd(train, true);
    LabeledFeatureSet occluded = sample_set(seed + 1, 12, 5);
    LabeledFeatureSet free_pairs = sample_set(seed + 2, 12, 5);
    oed = build_oed(occluded, free_pairs, false);
    (void)rng;
  }
};

}  // namespace

TEST_CASE("feature containers round-trip bit for bit") {
  const LabeledFeatureSet s = sample_set(101, 7, 5);
  const std::vector<std::uint8_t> bytes = encode_features(s);
  CHECK(bytes.size() == 24 + 4 * 5 + 8 * 7 * 5);
  CHECK(std::memcmp(bytes.data(), "SDBEFV1\0", 8) == 0);

  const LabeledFeatureSet back = decode_features(bytes.data(), bytes.size());
  CHECK(same_set(s, back));
  CHECK(encode_features(back) == bytes);

  TempDir tmp;
  const std::string path = tmp.path("roundtrip.fv");
  save_features(path, s);
  CHECK(same_set(load_features(path), s));

  // Saved bytes are exactly the encoding; a second save is identical.
  const std::string again = tmp.path("again.fv");
  save_features(again, s);
  CHECK(read_text_file(path) == read_text_file(again));
}

TEST_CASE("feature decoding rejects each corruption distinctly") {
  const LabeledFeatureSet s = sample_set(102, 4, 3);
  const std::vector<std::uint8_t> good = encode_features(s);
  const std::size_t labels_end = 24 + 4 * 3;

  SUBCASE("wrong magic") {
    std::vector<std::uint8_t> bad = good;
    bad[0] ^= 0xFF;
    CHECK(throws_code(ErrorCode::BadMagic, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("wrong magic wins over truncation once eight bytes exist") {
    std::vector<std::uint8_t> bad(8, 0x55);
    CHECK(throws_code(ErrorCode::BadMagic, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("header cut short") {
    std::vector<std::uint8_t> bad(good.begin(), good.begin() + 23);
    CHECK(throws_code(ErrorCode::TruncatedHeader, [&] {
      decode_features(bad.data(), bad.size());
    }));
    // Below eight bytes the magic cannot be checked; still a header error.
    std::vector<std::uint8_t> tiny(4, 0x00);
    CHECK(throws_code(ErrorCode::TruncatedHeader, [&] {
      decode_features(tiny.data(), tiny.size());
    }));
  }
  SUBCASE("cut inside the label block") {
    std::vector<std::uint8_t> bad(good.begin(),
                                  good.begin() + std::ptrdiff_t(labels_end - 1));
    CHECK(throws_code(ErrorCode::LabelCountMismatch, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("cut inside the data block") {
    std::vector<std::uint8_t> bad(good.begin(), good.end() - 1);
    CHECK(throws_code(ErrorCode::TruncatedPayload, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("bytes past the declared end") {
    std::vector<std::uint8_t> bad = good;
    bad.push_back(0x00);
    CHECK(throws_code(ErrorCode::TrailingBytes, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("non-finite payload") {
    std::vector<std::uint8_t> bad = good;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(bad.data() + labels_end, &nan, 8);
    CHECK(throws_code(ErrorCode::NaNPayload, [&] {
      decode_features(bad.data(), bad.size());
    }));
  }
  SUBCASE("encoding refuses non-finite input outright") {
    LabeledFeatureSet nan_set = s;
    nan_set.features(1, 1) = std::numeric_limits<double>::infinity();
    CHECK(throws_code(ErrorCode::NaNPayload, [&] { encode_features(nan_set); }));
  }
}

TEST_CASE("feature container io errors") {
  TempDir tmp;
  CHECK(throws_code(ErrorCode::Io, [&] {
    load_features(tmp.path("missing.fv"));
  }));
  CHECK(throws_code(ErrorCode::Io, [&] {
    save_features(tmp.path("no_dir/x.fv"), sample_set(1, 2, 2));
  }));
}

TEST_CASE("ridge models survive a save and load unchanged") {
  ModelFixture fx(201);
  const SdbeModel model = fit(fx.cd, fx.oed, Mode::L2, 0.02);

  TempDir tmp;
  const std::string path = tmp.path("model_l2.bin");
  save_model(path, model);
  const LoadedModel loaded = load_model(path);

  REQUIRE(loaded.kind == ModelKind::L2);
  REQUIRE(loaded.model.has_value());
  REQUIRE(!loaded.compiled.has_value());
  const SdbeModel& back = *loaded.model;
  CHECK(back.lambda == model.lambda);
  CHECK(back.dict.split_index == model.dict.split_index);
  CHECK(back.dict.labels == model.dict.labels);
  CHECK((back.dict.d.array() == model.dict.d.array()).all());
  REQUIRE(back.ridge.has_value());
  CHECK((back.ridge->p.array() == model.ridge->p.array()).all());
  CHECK(back.flags.normalize_columns == model.flags.normalize_columns);
  CHECK(back.flags.normalize_query == model.flags.normalize_query);
  CHECK(back.flags.normalize_output == model.flags.normalize_output);

  // Same stored operator, same arithmetic: estimates agree exactly.
  SplitMix64 rng(77);
  for (int t = 0; t < 5; ++t) {
    const Vector v = random_vector(rng, 12);
    const EstimateResult a = estimate(model, v);
    const EstimateResult b = estimate(back, v);
    CHECK((a.v0_hat.array() == b.v0_hat.array()).all());
    CHECK((a.alpha.array() == b.alpha.array()).all());
    CHECK((a.beta.array() == b.beta.array()).all());
  }
}

TEST_CASE("lasso models reload with a recomputed gram matrix") {
  ModelFixture fx(202);
  ModelFlags flags;
  flags.normalize_query = false;
  const SdbeModel model = fit(fx.cd, fx.oed, Mode::L1, 0.05, flags);

  TempDir tmp;
  const std::string path = tmp.path("model_l1.bin");
  save_model(path, model);
  const LoadedModel loaded = load_model(path);

  REQUIRE(loaded.kind == ModelKind::L1);
  REQUIRE(loaded.model.has_value());
  const SdbeModel& back = *loaded.model;
  CHECK(back.mode == Mode::L1);
  CHECK(!back.ridge.has_value());
  CHECK(back.l1.lambda == model.lambda);
  REQUIRE(back.gram.has_value());
  const Matrix expected = back.dict.d.transpose() * back.dict.d;
  CHECK((*back.gram - expected).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(back.flags.normalize_query == false);

  SplitMix64 rng(78);
  const Vector v = random_vector(rng, 12);
  const EstimateResult a = estimate(model, v);
  const EstimateResult b = estimate(back, v);
  CHECK((a.v0_hat - b.v0_hat).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("compiled models survive a save and load unchanged") {
  ModelFixture fx(203);
  const SdbeModel model = fit(fx.cd, fx.oed, Mode::L2, 0.01);
  const CompiledLinear compiled = compile_linear(model);

  TempDir tmp;
  const std::string path = tmp.path("model_c.bin");
  save_compiled(path, compiled);
  const LoadedModel loaded = load_model(path);

  REQUIRE(loaded.kind == ModelKind::Compiled);
  REQUIRE(loaded.compiled.has_value());
  REQUIRE(!loaded.model.has_value());
  const CompiledLinear& back = *loaded.compiled;
  CHECK(back.lambda == compiled.lambda);
  CHECK((back.w.array() == compiled.w.array()).all());

  SplitMix64 rng(79);
  const Vector v = random_vector(rng, 12);
  const EstimateResult direct = estimate(model, v);
  const Vector via_disk = estimate_compiled(back, v);
  CHECK((direct.v0_hat - via_disk).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("model decoding rejects each corruption distinctly") {
  ModelFixture fx(204);
  const SdbeModel model = fit(fx.cd, fx.oed, Mode::L1, 0.05);
  const std::vector<std::uint8_t> good = encode_model(model);
  // Header layout: magic 0..7, mode 8, lambda 9..16, flags 17, split 18..25.
  constexpr std::size_t kHeader = 26;

  SUBCASE("wrong magic") {
    std::vector<std::uint8_t> bad = good;
    bad[3] ^= 0xFF;
    CHECK(throws_code(ErrorCode::BadMagic, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("header cut short") {
    std::vector<std::uint8_t> bad(good.begin(),
                                  good.begin() + std::ptrdiff_t(kHeader - 1));
    CHECK(throws_code(ErrorCode::TruncatedHeader, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("unknown mode byte") {
    std::vector<std::uint8_t> bad = good;
    bad[8] = 7;
    CHECK(throws_code(ErrorCode::WrongMode, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("non-finite lambda") {
    std::vector<std::uint8_t> bad = good;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(bad.data() + 9, &nan, 8);
    CHECK(throws_code(ErrorCode::NaNPayload, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("nonpositive lambda") {
    std::vector<std::uint8_t> bad = good;
    const double neg = -0.5;
    std::memcpy(bad.data() + 9, &neg, 8);
    CHECK(throws_code(ErrorCode::InvalidArgument, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("unknown flag bits") {
    std::vector<std::uint8_t> bad = good;
    bad[17] = 0x08;
    CHECK(throws_code(ErrorCode::InvalidArgument, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("split index beyond the dictionary") {
    std::vector<std::uint8_t> bad = good;
    const std::uint64_t huge = 1000;
    std::memcpy(bad.data() + 18, &huge, 8);
    CHECK(throws_code(ErrorCode::InvalidArgument, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("dictionary block cut short") {
    std::vector<std::uint8_t> bad(good.begin(),
                                  good.begin() + std::ptrdiff_t(kHeader + 10));
    CHECK(throws_code(ErrorCode::TruncatedPayload, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("dictionary labels cut short") {
    std::vector<std::uint8_t> bad(
        good.begin(), good.begin() + std::ptrdiff_t(kHeader + 16 + 2));
    CHECK(throws_code(ErrorCode::LabelCountMismatch, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("bytes past the declared end") {
    std::vector<std::uint8_t> bad = good;
    bad.push_back(0x11);
    CHECK(throws_code(ErrorCode::TrailingBytes, [&] {
      decode_model(bad.data(), bad.size());
    }));
  }
  SUBCASE("compiled map must be square") {
    CompiledLinear lopsided;
    lopsided.w = Matrix::Zero(2, 3);
    lopsided.lambda = 0.1;
    const std::vector<std::uint8_t> bytes = encode_compiled(lopsided);
    CHECK(throws_code(ErrorCode::DimensionMismatch, [&] {
      decode_model(bytes.data(), bytes.size());
    }));
  }
  SUBCASE("solution operator shape must match the dictionary") {
    SdbeModel wrong;
    wrong.mode = Mode::L2;
    wrong.dict.d = Matrix::Identity(3, 2);
    wrong.dict.labels = {0, 1};
    wrong.dict.split_index = 1;
    wrong.lambda = 0.1;
    wrong.ridge = RidgeOperator{Matrix::Zero(2, 2), 0.1, 1};
    const std::vector<std::uint8_t> bytes = encode_model(wrong);
    CHECK(throws_code(ErrorCode::DimensionMismatch, [&] {
      decode_model(bytes.data(), bytes.size());
    }));
  }
}

TEST_CASE("feature csv reader") {
  TempDir tmp;

  SUBCASE("labels, comments, and blank lines") {
    const std::string path = tmp.path("in.csv");
    write_text_file(path,
                    "# header comment\n"
                    "3, 1.0, 2.5\n"
                    "\n"
                    "-1,4,5\n");
    const LabeledFeatureSet s = read_features_csv(path);
    CHECK(s.features.rows() == 2);
    CHECK(s.features.cols() == 2);
    CHECK(s.labels == std::vector<std::int32_t>{3, -1});
    CHECK(s.features(0, 0) == 1.0);
    CHECK(s.features(1, 0) == 2.5);
    CHECK(s.features(0, 1) == 4.0);
    CHECK(s.features(1, 1) == 5.0);
  }
  SUBCASE("rejects ragged rows") {
    const std::string path = tmp.path("ragged.csv");
    write_text_file(path, "0,1,2\n1,3\n");
    CHECK(throws_code(ErrorCode::DimensionMismatch,
                      [&] { read_features_csv(path); }));
  }
  SUBCASE("rejects a label with no features") {
    const std::string path = tmp.path("short.csv");
    write_text_file(path, "4\n");
    CHECK(throws_code(ErrorCode::InvalidArgument,
                      [&] { read_features_csv(path); }));
  }
  SUBCASE("rejects non-numeric cells") {
    const std::string path = tmp.path("text.csv");
    write_text_file(path, "0,1,two\n");
    CHECK(throws_code(ErrorCode::InvalidArgument,
                      [&] { read_features_csv(path); }));
  }
  SUBCASE("rejects an empty file") {
    const std::string path = tmp.path("empty.csv");
    write_text_file(path, "# only comments\n\n");
    CHECK(throws_code(ErrorCode::EmptyInput,
                      [&] { read_features_csv(path); }));
  }
  SUBCASE("missing file is an io error") {
    CHECK(throws_code(ErrorCode::Io,
                      [&] { read_features_csv(tmp.path("nope.csv")); }));
  }
}

TEST_CASE("softmax csv reader") {
  TempDir tmp;

  SUBCASE("row order and values are preserved") {
    const std::string path = tmp.path("clf.csv");
    write_text_file(path,
                    "# class_id,bias,w1,w2\n"
                    "9,0.5,1,2\n"
                    "-3,-0.25,3,4\n"
                    "0,0,5,6\n");
    const SoftmaxClassifier clf = read_softmax_csv(path);
    CHECK(clf.class_ids == std::vector<std::int32_t>{9, -3, 0});
    CHECK(clf.dim() == 2);
    CHECK(clf.classes() == 3);
    CHECK(clf.bias[0] == 0.5);
    CHECK(clf.bias[1] == -0.25);
    CHECK(clf.weights(0, 0) == 1.0);
    CHECK(clf.weights(0, 1) == 2.0);
    CHECK(clf.weights(2, 1) == 6.0);
  }
  SUBCASE("one class is degenerate") {
    const std::string path = tmp.path("one.csv");
    write_text_file(path, "1,0,1,2\n");
    CHECK(throws_code(ErrorCode::DegenerateLabels,
                      [&] { read_softmax_csv(path); }));
  }
  SUBCASE("rows must agree on width") {
    const std::string path = tmp.path("ragged.csv");
    write_text_file(path, "1,0,1,2\n2,0,1\n");
    CHECK(throws_code(ErrorCode::DimensionMismatch,
                      [&] { read_softmax_csv(path); }));
  }
  SUBCASE("a row needs id, bias, and one weight") {
    const std::string path = tmp.path("short.csv");
    write_text_file(path, "1,0\n2,0\n");
    CHECK(throws_code(ErrorCode::InvalidArgument,
                      [&] { read_softmax_csv(path); }));
  }
}

TEST_CASE("doubles format losslessly") {
  const double values[] = {0.0,   0.005, 1.0 / 3.0, -2.5, 1e-300,
                           1e17, 0.1,   123456789.123456789};
  for (const double v : values) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("estimate report counts coefficients strictly above the threshold") {
  EstimateResult r;
  r.alpha = Vector(3);
  r.alpha << 0.3, -0.05, 0.0;
  r.beta = Vector(1);
  r.beta << 0.2;
  r.residual = Vector(2);
  r.residual << 3.0, 4.0;
  r.iterations = 7;
  r.kkt_residual = 0.25;
  r.converged = true;
  const std::vector<EstimateResult> rows{r};

  CHECK(estimate_report_csv(rows, 0.1) ==
        "query,alpha_nnz,beta_nnz,residual_norm,iterations,kkt_residual,"
        "converged\n"
        "0,1,1,5,7,0.25,1\n");
  // Zero threshold counts every nonzero entry.
  CHECK(estimate_report_csv(rows, 0.0) ==
        "query,alpha_nnz,beta_nnz,residual_norm,iterations,kkt_residual,"
        "converged\n"
        "0,2,1,5,7,0.25,1\n");
  // The comparison is strict: entries equal to the threshold do not count.
  CHECK(estimate_report_csv(rows, 0.3) ==
        "query,alpha_nnz,beta_nnz,residual_norm,iterations,kkt_residual,"
        "converged\n"
        "0,0,0,5,7,0.25,1\n");
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [&] { estimate_report_csv(rows, -0.1); }));
}

TEST_CASE("classification report with and without ground truth") {
  const std::vector<std::int32_t> predicted{5, 7};
  const std::vector<std::int32_t> truth{5, 9};
  CHECK(classify_report_csv(predicted, &truth) ==
        "query,predicted,true_label\n"
        "0,5,5\n"
        "1,7,9\n");
  CHECK(classify_report_csv(predicted, nullptr) ==
        "query,predicted,true_label\n"
        "0,5,\n"
        "1,7,\n");
  const std::vector<std::int32_t> short_truth{5};
  CHECK(throws_code(ErrorCode::LabelCountMismatch, [&] {
    classify_report_csv(predicted, &short_truth);
  }));
}

TEST_CASE("evaluation report rows") {
  EvalRow row;
  row.occlusion_energy = 0.5;
  row.mode = EvalMode::L2;
  row.lambda = 0.25;
  row.accuracy = 0.75;
  row.mean_estimation_error = 0.5;
  row.mean_original_error = 1.0;
  row.query_count = 8;
  row.best = true;
  CHECK(eval_report_csv({row}) ==
        "occlusion_energy,mode,lambda,accuracy,mean_estimation_error,"
        "mean_original_error,query_count,best\n"
        "0.5,l2,0.25,0.75,0.5,1,8,1\n");
}

TEST_CASE("correlation report layout") {
  CorrReport report;
  report.mean_abs_rho = 0.5;
  report.max_abs_rho = 1.0;
  report.pair_count = 4;
  report.skipped = 2;
  report.bin_edges = {-1.0, 0.0, 1.0};
  report.counts = {1, 3};
  CHECK(corr_report_csv(report) ==
        "mean_abs_rho,max_abs_rho,pair_count,skipped\n"
        "0.5,1,4,2\n"
        "bin_lo,bin_hi,count\n"
        "-1,0,1\n"
        "0,1,3\n");
}

TEST_CASE("run configs parse every key") {
  const std::string text =
      "# evaluation setup\n"
      "seed = 3\n"
      "m = 48\n"
      "k_classes = 3\n"
      "class_dim = 3\n"
      "k_patterns = 2\n"
      "pattern_dim = 2\n"
      "train_per_class = 6\n"
      "queries_per_class = 4\n"
      "pairs_per_pattern = 6\n"
      "noise_sigma = 0.02\n"
      "overlap = 0.25\n"
      "nonneg_features = on\n"
      "idealized = off\n"
      "occlusion_energies = 0.25, 0.5\n"
      "lambda_grid = 0.005, 0.1\n"
      "modes = l2, l1\n"
      "classifier = softmax\n"
      "normalize_columns = on\n"
      "normalize_query = off\n"
      "normalize_output = off\n"
      "mark_best = off\n"
      "kkt_tol = 1e-5\n"
      "max_iters = 400\n"
      "out = report.csv\n";
  const RunConfig cfg = parse_run_config(text);
  CHECK(cfg.world.seed == 3);
  CHECK(cfg.world.m == 48);
  CHECK(cfg.world.k_classes == 3);
  CHECK(cfg.world.class_dim == 3);
  CHECK(cfg.world.k_patterns == 2);
  CHECK(cfg.world.pattern_dim == 2);
  CHECK(cfg.world.train_per_class == 6);
  CHECK(cfg.world.queries_per_class == 4);
  CHECK(cfg.world.pairs_per_pattern == 6);
  CHECK(cfg.world.noise_sigma == 0.02);
  CHECK(cfg.world.overlap == 0.25);
  CHECK(cfg.world.nonneg_features);
  CHECK(!cfg.world.idealized);
  CHECK(cfg.occlusion_energies == std::vector<double>{0.25, 0.5});
  CHECK(cfg.lambda_grid == std::vector<double>{0.005, 0.1});
  CHECK(cfg.include_l2);
  CHECK(cfg.include_l1);
  CHECK(cfg.classifier == ClassifierChoice::Softmax);
  CHECK(cfg.flags.normalize_columns);
  CHECK(!cfg.flags.normalize_query);
  CHECK(!cfg.flags.normalize_output);
  CHECK(!cfg.mark_best);
  CHECK(cfg.l1.kkt_tol == 1e-5);
  CHECK(cfg.l1.max_iters == 400);
  CHECK(cfg.out == "report.csv");
}

TEST_CASE("run configs start from usable defaults") {
  const RunConfig cfg = parse_run_config("# nothing set\n");
  CHECK(cfg.occlusion_energies == std::vector<double>{0.5});
  CHECK(cfg.lambda_grid.empty());
  CHECK(cfg.include_l2);
  CHECK(!cfg.include_l1);
  CHECK(cfg.classifier == ClassifierChoice::Nn);
  CHECK(cfg.mark_best);
  CHECK(cfg.out.empty());
}

TEST_CASE("run configs reject malformed input") {
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("seed 3\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("= 3\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("mystery = 1\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("seed = 1\nseed = 2\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("modes = ridge\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("classifier = tree\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("nonneg_features = maybe\n"); }));
  CHECK(throws_code(ErrorCode::BadConfig,
                    [] { parse_run_config("m = -4\n"); }));
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [] { parse_run_config("lambda_grid =\n"); }));
  CHECK(throws_code(ErrorCode::InvalidArgument,
                    [] { parse_run_config("noise_sigma = fast\n"); }));
}

TEST_CASE("an evaluation run sweeps each occlusion energy in order") {
  const std::string text =
      "seed = 3\n"
      "m = 48\n"
      "k_classes = 3\n"
      "class_dim = 3\n"
      "k_patterns = 2\n"
      "pattern_dim = 2\n"
      "train_per_class = 6\n"
      "queries_per_class = 4\n"
      "pairs_per_pattern = 6\n"
      "occlusion_energies = 0.25, 0.5\n"
      "lambda_grid = 0.005, 0.1\n"
      "modes = l2\n"
      "normalize_query = off\n"
      "normalize_output = off\n";
  const RunConfig cfg = parse_run_config(text);
  const std::vector<EvalRow> rows = eval_run(cfg);

  // Per energy: one baseline row plus one ridge row per lambda.
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].occlusion_energy == 0.25);
    CHECK(rows[i + 3].occlusion_energy == 0.5);
  }
  CHECK(rows[0].mode == EvalMode::Baseline);
  CHECK(rows[1].mode == EvalMode::L2);
  CHECK(rows[1].lambda == 0.005);
  CHECK(rows[2].lambda == 0.1);
  CHECK(rows[0].query_count == 3 * 4);

  // The report renders one line per row plus the header.
  const std::string csv = eval_report_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("text files round-trip") {
  TempDir tmp;
  const std::string path = tmp.path("note.txt");
  const std::string text = "alpha,beta\n1,2\n";
  write_text_file(path, text);
  CHECK(read_text_file(path) == text);
  CHECK(throws_code(ErrorCode::Io, [&] { read_text_file(tmp.path("no")); }));
  CHECK(throws_code(ErrorCode::Io,
                    [&] { write_text_file(tmp.path("d/no"), text); }));
}
