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

#include "sdbe/sdbe.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "containers.hpp"
#include "error.hpp"

struct sdbe_features {
  sdbe::LabeledFeatureSet set;
};

struct sdbe_model {
  std::optional<sdbe::SdbeModel> model;
  std::optional<sdbe::CompiledLinear> compiled;
};

struct sdbe_world {
  sdbe::SynthWorld world;
};

struct sdbe_softmax {
  sdbe::SoftmaxClassifier clf;
};

namespace {

thread_local std::string g_last_error;

sdbe_status map_code(sdbe::ErrorCode code) {
  const int v = int(code);
  if (v >= 1 && v <= int(sdbe::ErrorCode::BadConfig)) {
    return sdbe_status(v);
  }
  return SDBE_E_UNKNOWN;
}

// Runs the body, translating exceptions into status codes and the
// thread-local message.
template <typename F>
sdbe_status guarded(F&& body) {
  try {
    body();
    return SDBE_OK;
  } catch (const sdbe::Error& e) {
    g_last_error = e.message();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SDBE_E_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDBE_E_UNKNOWN;
  }
}

void require(bool ok, const char* message) {
  if (!ok) sdbe::fail(sdbe::ErrorCode::InvalidArgument, message);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sdbe::ClassDictionary as_cd(const sdbe_features* f) {
  sdbe::check_consistent(f->set, "class dictionary");
  return sdbe::ClassDictionary{f->set.features, f->set.labels};
}

sdbe::OcclusionErrorDictionary as_oed(const sdbe_features* f) {
  if (!f) return sdbe::OcclusionErrorDictionary{};
  sdbe::check_consistent(f->set, "error dictionary");
  return sdbe::OcclusionErrorDictionary{f->set.features, f->set.labels};
}

sdbe::Vector as_vector(const double* v, size_t dim) {
  require(v != nullptr, "input vector is null");
  sdbe::Vector x(static_cast<sdbe::Index>(dim));
  std::memcpy(x.data(), v, sizeof(double) * dim);
  return x;
}

void fill_info(const sdbe::EstimateResult& r, sdbe_estimate_info* info) {
  if (!info) return;
  const auto nnz = [](const sdbe::Vector& v) {
    std::int64_t count = 0;
    for (sdbe::Index i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) ++count;
    }
    return count;
  };
  info->iterations = r.iterations;
  info->kkt_residual = r.kkt_residual;
  info->converged = r.converged ? 1 : 0;
  info->residual_norm = r.residual.size() > 0 ? r.residual.norm() : 0.0;
  info->alpha_nnz = nnz(r.alpha);
  info->beta_nnz = nnz(r.beta);
}

sdbe::EstimateResult run_estimate(const sdbe_model* model,
                                  const sdbe::Vector& v) {
  if (model->compiled) {
    sdbe::EstimateResult r;
    r.v0_hat = sdbe::estimate_compiled(*model->compiled, v);
    return r;
  }
  return sdbe::estimate(*model->model, v);
}

}  // namespace

extern "C" {

const char* sdbe_status_name(sdbe_status status) {
  if (status == SDBE_E_UNKNOWN) return "Unknown";
  return sdbe::error_code_name(sdbe::ErrorCode(int(status)));
}

const char* sdbe_last_error(void) { return g_last_error.c_str(); }

void sdbe_string_free(char* s) { std::free(s); }

/* ---- features --------------------------------------------------------- */

sdbe_status sdbe_features_create(const double* data, size_t dim, size_t count,
                                 const int32_t* labels, sdbe_features** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    require(data != nullptr || dim * count == 0, "data pointer is null");
    sdbe::LabeledFeatureSet set;
    set.features.resize(sdbe::Index(dim), sdbe::Index(count));
    if (dim * count > 0) {
      std::memcpy(set.features.data(), data, sizeof(double) * dim * count);
    }
    if (labels) {
      set.labels.assign(labels, labels + count);
    } else {
      set.labels.assign(count, 0);
    }
    *out = new sdbe_features{std::move(set)};
  });
}

sdbe_status sdbe_features_load(const char* path, sdbe_features** out) {
  return guarded([&] {
    require(path && out, "path or output handle is null");
    *out = new sdbe_features{sdbe::load_features(path)};
  });
}

sdbe_status sdbe_features_load_csv(const char* path, sdbe_features** out) {
  return guarded([&] {
    require(path && out, "path or output handle is null");
    *out = new sdbe_features{sdbe::read_features_csv(path)};
  });
}

sdbe_status sdbe_features_save(const sdbe_features* f, const char* path) {
  return guarded([&] {
    require(f && path, "features or path is null");
    sdbe::save_features(path, f->set);
  });
}

size_t sdbe_features_dim(const sdbe_features* f) {
  return f ? size_t(f->set.features.rows()) : 0;
}

size_t sdbe_features_count(const sdbe_features* f) {
  return f ? size_t(f->set.features.cols()) : 0;
}

sdbe_status sdbe_features_copy_data(const sdbe_features* f, double* out) {
  return guarded([&] {
    require(f && out, "features or output buffer is null");
    std::memcpy(out, f->set.features.data(),
                sizeof(double) * size_t(f->set.features.size()));
  });
}

sdbe_status sdbe_features_copy_labels(const sdbe_features* f, int32_t* out) {
  return guarded([&] {
    require(f && out, "features or output buffer is null");
    std::memcpy(out, f->set.labels.data(),
                sizeof(int32_t) * f->set.labels.size());
  });
}

void sdbe_features_free(sdbe_features* f) { delete f; }

/* ---- dictionaries ------------------------------------------------------ */

sdbe_status sdbe_build_cd(const sdbe_features* train, int normalize,
                          sdbe_features** out) {
  return guarded([&] {
    require(train && out, "input or output handle is null");
    const sdbe::ClassDictionary cd =
        sdbe::build_cd(train->set, normalize != 0);
    *out = new sdbe_features{sdbe::LabeledFeatureSet{cd.a, cd.labels}};
  });
}

sdbe_status sdbe_build_oed(const sdbe_features* occluded,
                           const sdbe_features* free_of_occlusion,
                           int normalize, sdbe_features** out) {
  return guarded([&] {
    require(occluded && free_of_occlusion && out,
            "input or output handle is null");
    const sdbe::OcclusionErrorDictionary oed = sdbe::build_oed(
        occluded->set, free_of_occlusion->set, normalize != 0);
    *out = new sdbe_features{sdbe::LabeledFeatureSet{oed.b, oed.pattern_ids}};
  });
}

/* ---- model -------------------------------------------------------------- */

void sdbe_fit_options_init(sdbe_fit_options* options) {
  if (!options) return;
  options->mode = SDBE_MODE_L2;
  options->lambda = sdbe::kDefaultLambda;
  options->normalize_columns = 1;
  options->normalize_query = 1;
  options->normalize_output = 1;
  options->kkt_tol = 1e-6;
  options->max_iters = 10000;
}

sdbe_status sdbe_fit(const sdbe_features* cd, const sdbe_features* oed,
                     const sdbe_fit_options* options, sdbe_model** out) {
  return guarded([&] {
    require(cd && out, "class dictionary or output handle is null");
    sdbe_fit_options defaults;
    sdbe_fit_options_init(&defaults);
    const sdbe_fit_options& o = options ? *options : defaults;
    require(o.mode == SDBE_MODE_L1 || o.mode == SDBE_MODE_L2,
            "mode must be SDBE_MODE_L1 or SDBE_MODE_L2");
    sdbe::ModelFlags flags;
    flags.normalize_columns = o.normalize_columns != 0;
    flags.normalize_query = o.normalize_query != 0;
    flags.normalize_output = o.normalize_output != 0;
    sdbe::L1Settings l1;
    l1.lambda = o.lambda;
    l1.kkt_tol = o.kkt_tol;
    l1.max_iters = o.max_iters;
    require(l1.kkt_tol > 0.0, "kkt_tol must be positive");
    require(l1.max_iters >= 1, "max_iters must be at least 1");
    sdbe::SdbeModel model = sdbe::fit(
        as_cd(cd), as_oed(oed),
        o.mode == SDBE_MODE_L1 ? sdbe::Mode::L1 : sdbe::Mode::L2, o.lambda,
        flags, l1);
    *out = new sdbe_model{std::move(model), std::nullopt};
  });
}

sdbe_status sdbe_model_save(const sdbe_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "model or path is null");
    if (model->compiled) {
      sdbe::save_compiled(path, *model->compiled);
    } else {
      sdbe::save_model(path, *model->model);
    }
  });
}

sdbe_status sdbe_model_load(const char* path, sdbe_model** out) {
  return guarded([&] {
    require(path && out, "path or output handle is null");
    sdbe::LoadedModel loaded = sdbe::load_model(path);
    *out = new sdbe_model{std::move(loaded.model), std::move(loaded.compiled)};
  });
}

sdbe_status sdbe_compile(const sdbe_model* model, sdbe_model** out) {
  return guarded([&] {
    require(model && out, "model or output handle is null");
    if (model->compiled) {
      sdbe::fail(sdbe::ErrorCode::WrongMode, "model is already compiled");
    }
    *out = new sdbe_model{std::nullopt,
                          sdbe::compile_linear(*model->model)};
  });
}

int sdbe_model_is_compiled(const sdbe_model* model) {
  return model && model->compiled ? 1 : 0;
}

size_t sdbe_model_dim(const sdbe_model* model) {
  if (!model) return 0;
  return size_t(model->compiled ? model->compiled->dim()
                                : model->model->dim());
}

sdbe_status sdbe_estimate(const sdbe_model* model, const double* v, size_t dim,
                          double* v0_hat, sdbe_estimate_info* info) {
  return guarded([&] {
    require(model && v0_hat, "model or output buffer is null");
    const sdbe::EstimateResult r = run_estimate(model, as_vector(v, dim));
    std::memcpy(v0_hat, r.v0_hat.data(), sizeof(double) * dim);
    fill_info(r, info);
  });
}

sdbe_status sdbe_estimate_batch(const sdbe_model* model,
                                const sdbe_features* queries, double tau,
                                sdbe_features** estimates, char** csv) {
  return guarded([&] {
    require(model && queries && estimates,
            "model, queries or output handle is null");
    sdbe::check_consistent(queries->set, "queries");
    const sdbe::Index n = queries->set.features.cols();
    sdbe::LabeledFeatureSet out;
    out.labels = queries->set.labels;
    out.features.resize(queries->set.features.rows(), n);
    std::vector<sdbe::EstimateResult> results;
    results.reserve(std::size_t(n));
    for (sdbe::Index q = 0; q < n; ++q) {
      results.push_back(
          run_estimate(model, sdbe::Vector(queries->set.features.col(q))));
      out.features.col(q) = results.back().v0_hat;
    }
    // Build the CSV before publishing results so a bad tau cannot leak the
    // estimates handle.
    char* csv_out = nullptr;
    if (csv) csv_out = dup_string(sdbe::estimate_report_csv(results, tau));
    *estimates = new sdbe_features{std::move(out)};
    if (csv) *csv = csv_out;
  });
}

void sdbe_model_free(sdbe_model* model) { delete model; }

/* ---- classifiers -------------------------------------------------------- */

sdbe_status sdbe_nn_classify(const sdbe_features* prototypes, const double* v,
                             size_t dim, int32_t* label) {
  return guarded([&] {
    require(prototypes && label, "prototypes or output is null");
    sdbe::check_consistent(prototypes->set, "prototypes");
    *label = sdbe::nn_classify(prototypes->set, as_vector(v, dim));
  });
}

sdbe_status sdbe_nn_classify_batch(const sdbe_features* prototypes,
                                   const sdbe_features* queries,
                                   int with_truth, char** csv) {
  return guarded([&] {
    require(prototypes && queries && csv,
            "prototypes, queries or output is null");
    sdbe::check_consistent(prototypes->set, "prototypes");
    sdbe::check_consistent(queries->set, "queries");
    std::vector<int32_t> predicted;
    const sdbe::Index n = queries->set.features.cols();
    predicted.reserve(std::size_t(n));
    for (sdbe::Index q = 0; q < n; ++q) {
      predicted.push_back(sdbe::nn_classify(
          prototypes->set, sdbe::Vector(queries->set.features.col(q))));
    }
    *csv = dup_string(sdbe::classify_report_csv(
        predicted, with_truth ? &queries->set.labels : nullptr));
  });
}

sdbe_status sdbe_softmax_train(const sdbe_features* train,
                               double learning_rate, int64_t epochs,
                               double l2_penalty, sdbe_softmax** out) {
  return guarded([&] {
    require(train && out, "training set or output handle is null");
    sdbe::TrainConfig config;
    config.learning_rate = learning_rate;
    config.epochs = epochs;
    config.l2_penalty = l2_penalty;
    *out = new sdbe_softmax{sdbe::softmax_train(train->set, config)};
  });
}

sdbe_status sdbe_softmax_load_csv(const char* path, sdbe_softmax** out) {
  return guarded([&] {
    require(path && out, "path or output handle is null");
    *out = new sdbe_softmax{sdbe::read_softmax_csv(path)};
  });
}

size_t sdbe_softmax_classes(const sdbe_softmax* clf) {
  return clf ? size_t(clf->clf.classes()) : 0;
}

sdbe_status sdbe_softmax_classify(const sdbe_softmax* clf, const double* v,
                                  size_t dim, int32_t* label,
                                  double* probabilities) {
  return guarded([&] {
    require(clf && label, "classifier or output is null");
    const sdbe::SoftmaxDecision d =
        sdbe::softmax_classify(clf->clf, as_vector(v, dim));
    *label = d.label;
    if (probabilities) {
      std::memcpy(probabilities, d.probabilities.data(),
                  sizeof(double) * size_t(d.probabilities.size()));
    }
  });
}

sdbe_status sdbe_softmax_classify_batch(const sdbe_softmax* clf,
                                        const sdbe_features* queries,
                                        int with_truth, char** csv) {
  return guarded([&] {
    require(clf && queries && csv, "classifier, queries or output is null");
    sdbe::check_consistent(queries->set, "queries");
    std::vector<int32_t> predicted;
    const sdbe::Index n = queries->set.features.cols();
    predicted.reserve(std::size_t(n));
    for (sdbe::Index q = 0; q < n; ++q) {
      predicted.push_back(
          sdbe::softmax_classify(clf->clf,
                                 sdbe::Vector(queries->set.features.col(q)))
              .label);
    }
    *csv = dup_string(sdbe::classify_report_csv(
        predicted, with_truth ? &queries->set.labels : nullptr));
  });
}

void sdbe_softmax_free(sdbe_softmax* clf) { delete clf; }

/* ---- worlds -------------------------------------------------------------- */

void sdbe_world_spec_init(sdbe_world_spec* spec) {
  if (!spec) return;
  const sdbe::WorldSpec d;
  spec->seed = d.seed;
  spec->m = d.m;
  spec->k_classes = d.k_classes;
  spec->class_dim = d.class_dim;
  spec->k_patterns = d.k_patterns;
  spec->pattern_dim = d.pattern_dim;
  spec->train_per_class = d.train_per_class;
  spec->queries_per_class = d.queries_per_class;
  spec->pairs_per_pattern = d.pairs_per_pattern;
  spec->occlusion_energy = d.occlusion_energy;
  spec->noise_sigma = d.noise_sigma;
  spec->overlap = d.overlap;
  spec->nonneg_features = d.nonneg_features ? 1 : 0;
  spec->idealized = d.idealized ? 1 : 0;
}

sdbe_status sdbe_world_generate(const sdbe_world_spec* spec,
                                sdbe_world** out) {
  return guarded([&] {
    require(spec && out, "spec or output handle is null");
    sdbe::WorldSpec s;
    s.seed = spec->seed;
    s.m = spec->m;
    s.k_classes = spec->k_classes;
    s.class_dim = spec->class_dim;
    s.k_patterns = spec->k_patterns;
    s.pattern_dim = spec->pattern_dim;
    s.train_per_class = spec->train_per_class;
    s.queries_per_class = spec->queries_per_class;
    s.pairs_per_pattern = spec->pairs_per_pattern;
    s.occlusion_energy = spec->occlusion_energy;
    s.noise_sigma = spec->noise_sigma;
    s.overlap = spec->overlap;
    s.nonneg_features = spec->nonneg_features != 0;
    s.idealized = spec->idealized != 0;
    *out = new sdbe_world{sdbe::generate(s)};
  });
}

sdbe_status sdbe_world_features(const sdbe_world* world, int which,
                                sdbe_features** out) {
  return guarded([&] {
    require(world && out, "world or output handle is null");
    const sdbe::SynthWorld& w = world->world;
    sdbe::LabeledFeatureSet set;
    switch (which) {
      case SDBE_WORLD_TRAIN: set = w.train; break;
      case SDBE_WORLD_PAIRS_FREE: set = w.pairs_free; break;
      case SDBE_WORLD_PAIRS_OCCLUDED: set = w.pairs_occluded; break;
      case SDBE_WORLD_QUERIES_CLEAN: set = w.queries_clean; break;
      case SDBE_WORLD_QUERIES_OCCLUDED: set = w.queries_occluded; break;
      case SDBE_WORLD_QUERY_EPS:
        set.features = w.query_eps;
        set.labels = w.query_pattern_ids;
        break;
      default:
        sdbe::fail(sdbe::ErrorCode::InvalidArgument,
                   "unknown world feature selector");
    }
    *out = new sdbe_features{std::move(set)};
  });
}

void sdbe_world_free(sdbe_world* world) { delete world; }

/* ---- diagnostics ----------------------------------------------------------*/

sdbe_status sdbe_corr_csv(const sdbe_features* cd, const sdbe_features* oed,
                          int bins, char** csv) {
  return guarded([&] {
    require(cd && oed && csv, "inputs or output are null");
    const sdbe::CorrReport report =
        sdbe::cross_corr_report(as_cd(cd), as_oed(oed), bins);
    *csv = dup_string(sdbe::corr_report_csv(report));
  });
}

sdbe_status sdbe_eval_csv(const char* config_text, char** csv,
                          char** out_path) {
  return guarded([&] {
    require(config_text && csv, "config or output is null");
    const sdbe::RunConfig config = sdbe::parse_run_config(config_text);
    const std::vector<sdbe::EvalRow> rows = sdbe::eval_run(config);
    char* report = dup_string(sdbe::eval_report_csv(rows));
    if (out_path) {
      *out_path = dup_string(config.out);
    }
    *csv = report;
  });
}

} /* extern "C" */
