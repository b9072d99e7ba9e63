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

// sdbe: occlusion-robust feature recovery pipeline.
//
// Every command is deterministic: identical inputs and --seed produce
// byte-identical outputs. Failures print one line to stderr,
// "error: <Category>: <message>", and exit nonzero.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdbe/sdbe.h"

namespace {

[[noreturn]] void die(const char* category, const std::string& message) {
  std::fprintf(stderr, "error: %s: %s\n", category, message.c_str());
  std::exit(1);
}

void check(sdbe_status status) {
  if (status != SDBE_OK) die(sdbe_status_name(status), sdbe_last_error());
}

struct FeaturesFree {
  void operator()(sdbe_features* f) const { sdbe_features_free(f); }
};
struct ModelFree {
  void operator()(sdbe_model* m) const { sdbe_model_free(m); }
};
struct SoftmaxFree {
  void operator()(sdbe_softmax* s) const { sdbe_softmax_free(s); }
};
struct WorldFree {
  void operator()(sdbe_world* w) const { sdbe_world_free(w); }
};
struct StringFree {
  void operator()(char* s) const { sdbe_string_free(s); }
};

using FeaturesPtr = std::unique_ptr<sdbe_features, FeaturesFree>;
using ModelPtr = std::unique_ptr<sdbe_model, ModelFree>;
using SoftmaxPtr = std::unique_ptr<sdbe_softmax, SoftmaxFree>;
using WorldPtr = std::unique_ptr<sdbe_world, WorldFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

FeaturesPtr load_features(const std::string& path) {
  sdbe_features* f = nullptr;
  check(sdbe_features_load(path.c_str(), &f));
  return FeaturesPtr(f);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("Io", "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (!in.good() && !in.eof()) die("Io", "cannot read " + path);
  return text.str();
}

// Empty path means stdout.
void emit_text(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) die("Io", "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out.good()) die("Io", "cannot write " + path);
}

bool flag_on(const std::string& value) { return value == "on"; }

// Adds an on/off option bound to `value` (which holds the default).
CLI::Option* add_switch(CLI::App* cmd, const std::string& name,
                        std::string& value, const std::string& help) {
  return cmd->add_option(name, value, help)
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
}

/* ---- synth ------------------------------------------------------------- */

struct SynthArgs {
  sdbe_world_spec spec;
  std::string out_dir = ".";
};

void run_synth(const SynthArgs& args) {
  sdbe_world* world_raw = nullptr;
  check(sdbe_world_generate(&args.spec, &world_raw));
  WorldPtr world(world_raw);

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec) die("Io", ("cannot create " + args.out_dir).c_str());

  const struct {
    int which;
    const char* name;
  } parts[] = {
      {SDBE_WORLD_TRAIN, "train.fv"},
      {SDBE_WORLD_PAIRS_FREE, "pairs_free.fv"},
      {SDBE_WORLD_PAIRS_OCCLUDED, "pairs_occluded.fv"},
      {SDBE_WORLD_QUERIES_OCCLUDED, "queries.fv"},
      {SDBE_WORLD_QUERIES_CLEAN, "truth_clean.fv"},
      {SDBE_WORLD_QUERY_EPS, "truth_eps.fv"},
  };
  for (const auto& part : parts) {
    sdbe_features* f = nullptr;
    check(sdbe_world_features(world.get(), part.which, &f));
    FeaturesPtr features(f);
    const std::string path = args.out_dir + "/" + part.name;
    check(sdbe_features_save(features.get(), path.c_str()));
    std::printf("wrote %s\n", path.c_str());
  }
}

/* ---- fit options shared by fit ----------------------------------------- */

struct FitArgs {
  std::string cd_path;
  std::string oed_path;
  std::string mode = "l2";
  double lambda = 0.005;
  std::string norm_columns = "on";
  std::string norm_query = "on";
  std::string norm_output = "on";
  double kkt_tol = 1e-6;
  std::int64_t max_iters = 10000;
  std::string out;
};

void run_fit(const FitArgs& args) {
  FeaturesPtr cd = load_features(args.cd_path);
  FeaturesPtr oed;
  if (!args.oed_path.empty()) oed = load_features(args.oed_path);

  sdbe_fit_options options;
  sdbe_fit_options_init(&options);
  options.mode = args.mode == "l1" ? SDBE_MODE_L1 : SDBE_MODE_L2;
  options.lambda = args.lambda;
  options.normalize_columns = flag_on(args.norm_columns);
  options.normalize_query = flag_on(args.norm_query);
  options.normalize_output = flag_on(args.norm_output);
  options.kkt_tol = args.kkt_tol;
  options.max_iters = args.max_iters;

  sdbe_model* model_raw = nullptr;
  check(sdbe_fit(cd.get(), oed.get(), &options, &model_raw));
  ModelPtr model(model_raw);
  check(sdbe_model_save(model.get(), args.out.c_str()));
  std::printf("wrote %s\n", args.out.c_str());
}

/* ---- remaining commands ------------------------------------------------- */

void run_build_cd(const std::string& train_path, const std::string& normalize,
                  const std::string& out) {
  FeaturesPtr train = load_features(train_path);
  sdbe_features* cd_raw = nullptr;
  check(sdbe_build_cd(train.get(), flag_on(normalize) ? 1 : 0, &cd_raw));
  FeaturesPtr cd(cd_raw);
  check(sdbe_features_save(cd.get(), out.c_str()));
  std::printf("wrote %s\n", out.c_str());
}

void run_build_oed(const std::string& occluded_path,
                   const std::string& free_path, const std::string& normalize,
                   const std::string& out) {
  FeaturesPtr occluded = load_features(occluded_path);
  FeaturesPtr free_set = load_features(free_path);
  sdbe_features* oed_raw = nullptr;
  check(sdbe_build_oed(occluded.get(), free_set.get(),
                       flag_on(normalize) ? 1 : 0, &oed_raw));
  FeaturesPtr oed(oed_raw);
  check(sdbe_features_save(oed.get(), out.c_str()));
  std::printf("wrote %s\n", out.c_str());
}

void run_compile(const std::string& model_path, const std::string& out) {
  sdbe_model* in_raw = nullptr;
  check(sdbe_model_load(model_path.c_str(), &in_raw));
  ModelPtr in(in_raw);
  sdbe_model* compiled_raw = nullptr;
  check(sdbe_compile(in.get(), &compiled_raw));
  ModelPtr compiled(compiled_raw);
  check(sdbe_model_save(compiled.get(), out.c_str()));
  std::printf("wrote %s\n", out.c_str());
}

void run_estimate(const std::string& model_path, const std::string& queries_path,
                  double tau, const std::string& out,
                  const std::string& report) {
  sdbe_model* model_raw = nullptr;
  check(sdbe_model_load(model_path.c_str(), &model_raw));
  ModelPtr model(model_raw);
  FeaturesPtr queries = load_features(queries_path);

  sdbe_features* estimates_raw = nullptr;
  char* csv_raw = nullptr;
  check(sdbe_estimate_batch(model.get(), queries.get(), tau, &estimates_raw,
                            &csv_raw));
  FeaturesPtr estimates(estimates_raw);
  StringPtr csv(csv_raw);
  check(sdbe_features_save(estimates.get(), out.c_str()));
  if (!out.empty()) std::printf("wrote %s\n", out.c_str());
  emit_text(report, csv.get());
}

void run_classify(const std::string& model_path,
                  const std::string& prototypes_path,
                  const std::string& softmax_path,
                  const std::string& queries_path, bool with_truth,
                  const std::string& out) {
  FeaturesPtr queries = load_features(queries_path);

  FeaturesPtr inputs;  // what the classifier actually sees
  if (!model_path.empty()) {
    sdbe_model* model_raw = nullptr;
    check(sdbe_model_load(model_path.c_str(), &model_raw));
    ModelPtr model(model_raw);
    sdbe_features* estimates_raw = nullptr;
    check(sdbe_estimate_batch(model.get(), queries.get(), 0.0, &estimates_raw,
                              nullptr));
    inputs.reset(estimates_raw);
  } else {
    inputs = std::move(queries);
  }

  char* csv_raw = nullptr;
  if (!prototypes_path.empty()) {
    FeaturesPtr prototypes = load_features(prototypes_path);
    check(sdbe_nn_classify_batch(prototypes.get(), inputs.get(),
                                 with_truth ? 1 : 0, &csv_raw));
  } else {
    sdbe_softmax* clf_raw = nullptr;
    check(sdbe_softmax_load_csv(softmax_path.c_str(), &clf_raw));
    SoftmaxPtr clf(clf_raw);
    check(sdbe_softmax_classify_batch(clf.get(), inputs.get(),
                                      with_truth ? 1 : 0, &csv_raw));
  }
  StringPtr csv(csv_raw);
  emit_text(out, csv.get());
}

void run_eval(const std::string& config_path, const std::string& out_override) {
  const std::string config = read_text(config_path);
  char* csv_raw = nullptr;
  char* out_raw = nullptr;
  check(sdbe_eval_csv(config.c_str(), &csv_raw, &out_raw));
  StringPtr csv(csv_raw);
  StringPtr config_out(out_raw);
  const std::string destination =
      !out_override.empty() ? out_override : std::string(config_out.get());
  emit_text(destination, csv.get());
}

void run_corr(const std::string& cd_path, const std::string& oed_path,
              int bins, const std::string& out) {
  FeaturesPtr cd = load_features(cd_path);
  FeaturesPtr oed = load_features(oed_path);
  char* csv_raw = nullptr;
  check(sdbe_corr_csv(cd.get(), oed.get(), bins, &csv_raw));
  StringPtr csv(csv_raw);
  emit_text(out, csv.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sdbe: recover clean feature vectors from occlusion-corrupted ones by "
      "regularized decomposition over a class + occlusion-error dictionary, "
      "then classify"};
  app.require_subcommand(1);

  // synth
  SynthArgs synth;
  sdbe_world_spec_init(&synth.spec);
  bool nonneg = false;
  bool idealized = false;
  CLI::App* s = app.add_subcommand(
      "synth", "Generate a seeded synthetic world and write its containers");
  s->add_option("--seed", synth.spec.seed, "world seed")
      ->capture_default_str();
  s->add_option("--dim", synth.spec.m, "feature dimension m")
      ->capture_default_str();
  s->add_option("--classes", synth.spec.k_classes, "number of classes")
      ->capture_default_str();
  s->add_option("--class-dim", synth.spec.class_dim,
                "dimension of each class subspace")
      ->capture_default_str();
  s->add_option("--patterns", synth.spec.k_patterns,
                "number of occlusion patterns")
      ->capture_default_str();
  s->add_option("--pattern-dim", synth.spec.pattern_dim,
                "dimension of each occlusion subspace")
      ->capture_default_str();
  s->add_option("--train-per-class", synth.spec.train_per_class,
                "training samples per class")
      ->capture_default_str();
  s->add_option("--queries-per-class", synth.spec.queries_per_class,
                "query samples per class")
      ->capture_default_str();
  s->add_option("--pairs-per-pattern", synth.spec.pairs_per_pattern,
                "occluded/free pairs per pattern")
      ->capture_default_str();
  s->add_option("--occlusion-energy", synth.spec.occlusion_energy,
                "occlusion error norm relative to the clean feature norm")
      ->capture_default_str();
  s->add_option("--noise-sigma", synth.spec.noise_sigma,
                "additive Gaussian noise level")
      ->capture_default_str();
  s->add_option("--overlap", synth.spec.overlap,
                "planted class/occlusion subspace overlap in [0, 1]")
      ->capture_default_str();
  s->add_flag("--nonneg", nonneg, "clip clean features to be non-negative");
  s->add_flag("--idealized", idealized,
              "exactly orthonormal subspace bases (diagnostic geometry)");
  s->add_option("--out-dir", synth.out_dir, "output directory")
      ->capture_default_str();

  // build-cd
  std::string bc_train, bc_out, bc_normalize = "on";
  CLI::App* bc = app.add_subcommand(
      "build-cd", "Build the class dictionary from labeled training features");
  bc->add_option("--train", bc_train, "training features container")
      ->required();
  add_switch(bc, "--normalize", bc_normalize, "unit-normalize columns");
  bc->add_option("--out", bc_out, "output container")->required();

  // build-oed
  std::string bo_occ, bo_free, bo_out, bo_normalize = "off";
  CLI::App* bo = app.add_subcommand(
      "build-oed",
      "Build the occlusion-error dictionary from paired occluded/free sets");
  bo->add_option("--occluded", bo_occ, "occluded features container")
      ->required();
  bo->add_option("--free", bo_free, "occlusion-free features container")
      ->required();
  add_switch(bo, "--normalize", bo_normalize, "unit-normalize columns");
  bo->add_option("--out", bo_out, "output container")->required();

  // fit
  FitArgs fit;
  CLI::App* f = app.add_subcommand(
      "fit", "Fit an estimation model from the dictionaries");
  f->add_option("--cd", fit.cd_path, "class dictionary container")->required();
  f->add_option("--oed", fit.oed_path,
                "occlusion-error dictionary container (omit for none)");
  f->add_option("--mode", fit.mode, "solver mode")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
  f->add_option("--lambda", fit.lambda, "regularization weight")
      ->capture_default_str();
  add_switch(f, "--normalize-columns", fit.norm_columns,
             "unit-normalize dictionary columns at fit");
  add_switch(f, "--normalize-query", fit.norm_query,
             "unit-normalize queries before solving");
  add_switch(f, "--normalize-output", fit.norm_output,
             "unit-normalize estimates");
  f->add_option("--kkt-tol", fit.kkt_tol, "l1 stopping tolerance")
      ->capture_default_str();
  f->add_option("--max-iters", fit.max_iters, "l1 iteration cap")
      ->capture_default_str();
  f->add_option("--out", fit.out, "output model container")->required();

  // compile
  std::string cp_model, cp_out;
  CLI::App* cp = app.add_subcommand(
      "compile", "Collapse an l2 model into a single linear map");
  cp->add_option("--model", cp_model, "l2 model container")->required();
  cp->add_option("--out", cp_out, "output model container")->required();

  // estimate
  std::string es_model, es_queries, es_out, es_report;
  double es_tau = 0.0;
  CLI::App* es = app.add_subcommand(
      "estimate", "Recover clean-feature estimates for every query");
  es->add_option("--model", es_model, "model container")->required();
  es->add_option("--queries", es_queries, "queries container")->required();
  es->add_option("--out", es_out, "estimates container")->required();
  es->add_option("--report", es_report,
                 "diagnostics CSV destination (default stdout)");
  es->add_option("--tau", es_tau,
                 "sparsity threshold: count coefficients with |x| > tau")
      ->capture_default_str();

  // classify
  std::string cl_model, cl_protos, cl_softmax, cl_queries, cl_out;
  bool cl_truth = false;
  CLI::App* cl = app.add_subcommand(
      "classify",
      "Classify queries, optionally recovering them with a model first");
  cl->add_option("--queries", cl_queries, "queries container")->required();
  cl->add_option("--model", cl_model,
                 "model container; omit to classify raw queries");
  CLI::Option* protos_opt = cl->add_option(
      "--prototypes", cl_protos, "nearest-prototype classifier container");
  cl->add_option("--softmax", cl_softmax, "softmax weights CSV")
      ->excludes(protos_opt);
  cl->add_flag("--truth", cl_truth, "include query labels as true_label");
  cl->add_option("--out", cl_out, "CSV destination (default stdout)");

  // eval
  std::string ev_config, ev_out;
  CLI::App* ev = app.add_subcommand(
      "eval", "Run the evaluation protocol described by a config file");
  ev->add_option("--config", ev_config, "key=value config file")->required();
  ev->add_option("--out", ev_out, "report CSV destination (overrides config)");

  // corr
  std::string co_cd, co_oed, co_out;
  int co_bins = 20;
  CLI::App* co = app.add_subcommand(
      "corr", "Cross-correlation diagnostics between the two dictionaries");
  co->add_option("--cd", co_cd, "class dictionary container")->required();
  co->add_option("--oed", co_oed, "occlusion-error dictionary container")
      ->required();
  co->add_option("--bins", co_bins, "histogram bin count")
      ->capture_default_str();
  co->add_option("--out", co_out, "CSV destination (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (s->parsed()) {
    synth.spec.nonneg_features = nonneg ? 1 : 0;
    synth.spec.idealized = idealized ? 1 : 0;
    run_synth(synth);
  } else if (bc->parsed()) {
    run_build_cd(bc_train, bc_normalize, bc_out);
  } else if (bo->parsed()) {
    run_build_oed(bo_occ, bo_free, bo_normalize, bo_out);
  } else if (f->parsed()) {
    run_fit(fit);
  } else if (cp->parsed()) {
    run_compile(cp_model, cp_out);
  } else if (es->parsed()) {
    run_estimate(es_model, es_queries, es_tau, es_out, es_report);
  } else if (cl->parsed()) {
    if (cl_protos.empty() && cl_softmax.empty()) {
      die("InvalidArgument", "classify needs --prototypes or --softmax");
    }
    run_classify(cl_model, cl_protos, cl_softmax, cl_queries, cl_truth,
                 cl_out);
  } else if (ev->parsed()) {
    run_eval(ev_config, ev_out);
  } else if (co->parsed()) {
    run_corr(co_cd, co_oed, co_bins, co_out);
  }
  return 0;
}
