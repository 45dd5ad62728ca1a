#include "vsa/vsa.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "vsa/binding.hpp"
#include "vsa/classify.hpp"
#include "vsa/error.hpp"
#include "vsa/experiments.hpp"
#include "vsa/reasoning.hpp"

#ifndef VSA_VERSION
#define VSA_VERSION "0.0.0"
#endif

struct vsa_config {
  vsa::Config cfg;
};
struct vsa_knowledge {
  vsa::KnowledgeBase kb;
};
struct vsa_ranking {
  vsa::Analogy analogy;
};
struct vsa_dataset {
  vsa::Dataset data;
};
struct vsa_classifier {
  vsa::TrainedClassifier clf;
};
struct vsa_block_code {
  vsa::BlockCode code;
};

namespace {

thread_local std::string last_error;

vsa_status fail(vsa_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

/// Runs `f`, mapping library exceptions to status codes.
template <class F>
vsa_status guard(F&& f) {
  try {
    last_error.clear();
    f();
    return VSA_OK;
  } catch (const vsa::ConfigError& e) {
    return fail(VSA_ERR_CONFIG, e.what());
  } catch (const vsa::DimensionError& e) {
    return fail(VSA_ERR_DIMENSION, e.what());
  } catch (const vsa::InvalidArgument& e) {
    return fail(VSA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const vsa::NumericalError& e) {
    return fail(VSA_ERR_NUMERICAL, e.what());
  } catch (const vsa::IoError& e) {
    return fail(VSA_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(VSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VSA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VSA_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (!p) throw vsa::InvalidArgument(std::string(what) + " must not be NULL");
}

vsa::PipelineConfig to_cpp(const vsa_pipeline_config& c) {
  vsa::PipelineConfig p;
  p.n = c.n;
  p.k = c.k;
  p.kappa = c.kappa;
  p.lambda = c.lambda;
  if (c.scheme != VSA_SCHEME_BLOCK_SHIFT && c.scheme != VSA_SCHEME_THERMOMETRIC)
    throw vsa::InvalidArgument("unknown encoding scheme");
  p.scheme = c.scheme == VSA_SCHEME_THERMOMETRIC ? vsa::EncodingScheme::thermometric : vsa::EncodingScheme::block_shift;
  p.folds = c.folds;
  p.seed = c.seed;
  return p;
}

vsa_pipeline_config to_c(const vsa::PipelineConfig& p) {
  return {p.n,
          p.k,
          p.kappa,
          p.lambda,
          p.scheme == vsa::EncodingScheme::thermometric ? VSA_SCHEME_THERMOMETRIC : VSA_SCHEME_BLOCK_SHIFT,
          p.folds,
          p.seed};
}

}  // namespace

extern "C" {

const char* vsa_version(void) { return VSA_VERSION; }
const char* vsa_last_error(void) { return last_error.c_str(); }

const char* vsa_status_name(vsa_status status) {
  switch (status) {
    case VSA_OK: return "ok";
    case VSA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VSA_ERR_DIMENSION: return "dimension mismatch";
    case VSA_ERR_CONFIG: return "configuration error";
    case VSA_ERR_NUMERICAL: return "numerical failure";
    case VSA_ERR_IO: return "i/o error";
    case VSA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// --- configuration ---------------------------------------------------------------

vsa_status vsa_config_create(vsa_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new vsa_config{};
  });
}

void vsa_config_free(vsa_config* cfg) { delete cfg; }

vsa_status vsa_config_load(vsa_config* cfg, const char* path) {
  return guard([&] {
    need(cfg, "cfg");
    need(path, "path");
    cfg->cfg.merge(vsa::Config::load(path));
  });
}

vsa_status vsa_config_set(vsa_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

vsa_status vsa_config_get(const vsa_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    const auto v = cfg->cfg.get(key);
    if (!v) throw vsa::ConfigError(std::string("missing config key '") + key + "'");
    if (needed) *needed = v->size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, v->size());
      v->copy(buf, n);
      buf[n] = '\0';
    }
  });
}

// --- experiments -------------------------------------------------------------------

size_t vsa_experiment_count(void) { return vsa::experiment_catalog().size(); }

const char* vsa_experiment_name(size_t index) {
  const auto& c = vsa::experiment_catalog();
  return index < c.size() ? c[index].id.c_str() : nullptr;
}

const char* vsa_experiment_description(size_t index) {
  const auto& c = vsa::experiment_catalog();
  return index < c.size() ? c[index].description.c_str() : nullptr;
}

vsa_status vsa_experiment_resolve(const char* id, const vsa_config* cfg, vsa_config** resolved) {
  return guard([&] {
    need(id, "id");
    const vsa::Config user = cfg ? cfg->cfg : vsa::Config{};
    auto full = vsa::resolve_config(id, user);
    if (resolved) *resolved = new vsa_config{std::move(full)};
  });
}

vsa_status vsa_experiment_run(const char* id, const vsa_config* cfg, uint64_t seed, size_t threads,
                              const char* out_dir) {
  return guard([&] {
    need(id, "id");
    need(out_dir, "out_dir");
    vsa::execute_run(id, cfg ? cfg->cfg : vsa::Config{}, seed, threads, out_dir);
  });
}

vsa_status vsa_rerun(const char* manifest_path, const char* out_dir, size_t threads, int* identical) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(out_dir, "out_dir");
    const auto rep = vsa::rerun_manifest(manifest_path, out_dir, threads);
    if (identical) *identical = rep.identical ? 1 : 0;
    if (!rep.identical) {
      std::string files;
      for (const auto& f : rep.mismatched) files += (files.empty() ? "" : ", ") + f;
      last_error = "outputs differ from the manifest: " + files;
    }
  });
}

const char* vsa_default_output_dir(void) {
  thread_local std::string s;
  s = vsa::default_output_dir();
  return s.c_str();
}

const char* vsa_default_data_dir(void) {
  thread_local std::string s;
  s = vsa::default_data_dir();
  return s.c_str();
}

// --- knowledge base ------------------------------------------------------------------

vsa_status vsa_knowledge_load(const char* path, size_t n, size_t k, uint64_t seed, vsa_knowledge** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new vsa_knowledge{vsa::KnowledgeBase(vsa::load_knowledge(path), n, k, vsa::BlockKind::binary, seed)};
  });
}

void vsa_knowledge_free(vsa_knowledge* kb) { delete kb; }

vsa_status vsa_knowledge_analogy(const vsa_knowledge* kb, const char* probe, const char* from, const char* to,
                                 vsa_ranking** out) {
  return guard([&] {
    need(kb, "kb");
    need(probe, "probe");
    need(from, "from");
    need(to, "to");
    need(out, "out");
    *out = new vsa_ranking{kb->kb.analogy(probe, from, to)};
  });
}

void vsa_ranking_free(vsa_ranking* r) { delete r; }
const char* vsa_ranking_role(const vsa_ranking* r) { return r ? r->analogy.role.c_str() : nullptr; }
size_t vsa_ranking_size(const vsa_ranking* r) { return r ? r->analogy.ranked.size() : 0; }

const char* vsa_ranking_name(const vsa_ranking* r, size_t i) {
  return r && i < r->analogy.ranked.size() ? r->analogy.ranked[i].first.c_str() : nullptr;
}

double vsa_ranking_score(const vsa_ranking* r, size_t i) {
  return r && i < r->analogy.ranked.size() ? r->analogy.ranked[i].second : 0.0;
}

vsa_status vsa_predict_accuracy(size_t n, size_t r, size_t m, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vsa::predict_accuracy(n, r, m);
  });
}

// --- classification -----------------------------------------------------------------

void vsa_pipeline_config_default(vsa_pipeline_config* cfg) {
  if (cfg) *cfg = to_c(vsa::PipelineConfig{});
}

vsa_status vsa_dataset_load(const char* path, const char* label_column, vsa_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new vsa_dataset{vsa::ingest_dataset(path, label_column ? label_column : "label")};
  });
}

void vsa_dataset_free(vsa_dataset* d) { delete d; }
size_t vsa_dataset_samples(const vsa_dataset* d) { return d ? d->data.samples() : 0; }
size_t vsa_dataset_features(const vsa_dataset* d) { return d ? d->data.feature_names.size() : 0; }
size_t vsa_dataset_classes(const vsa_dataset* d) { return d ? d->data.classes() : 0; }

vsa_status vsa_cross_validate(const vsa_dataset* d, const vsa_pipeline_config* cfg, size_t threads, double* mean,
                              double* std) {
  return guard([&] {
    need(d, "dataset");
    need(cfg, "cfg");
    const auto rep = vsa::cross_validate(d->data, to_cpp(*cfg), threads);
    if (mean) *mean = rep.mean;
    if (std) *std = rep.std;
  });
}

vsa_status vsa_grid_search(const vsa_dataset* d, vsa_scheme scheme, const size_t* shape_n, const size_t* shape_k,
                           size_t n_shapes, const int64_t* kappas, size_t n_kappas, const double* lambdas,
                           size_t n_lambdas, size_t folds, uint64_t seed, size_t threads, vsa_pipeline_config* best,
                           double* mean, double* std, size_t* evaluated) {
  return guard([&] {
    need(d, "dataset");
    vsa_pipeline_config probe{};
    probe.scheme = scheme;
    probe.n = probe.k = probe.folds = 1;
    const auto cpp_scheme = to_cpp(probe).scheme;
    auto grid = cpp_scheme == vsa::EncodingScheme::thermometric ? vsa::GridSpec::dense_default()
                                                                 : vsa::GridSpec::sparse_default();
    grid.scheme = cpp_scheme;
    if (shape_n || shape_k) {
      need(shape_n, "shape_n");
      need(shape_k, "shape_k");
      grid.shapes.clear();
      for (size_t i = 0; i < n_shapes; ++i) grid.shapes.emplace_back(shape_n[i], shape_k[i]);
    }
    if (kappas) grid.kappas.assign(kappas, kappas + n_kappas);
    if (lambdas) grid.lambdas.assign(lambdas, lambdas + n_lambdas);
    const auto res = vsa::grid_search(d->data, grid, folds, seed, threads);
    if (best) *best = to_c(res.best.config);
    if (mean) *mean = res.best.report.mean;
    if (std) *std = res.best.report.std;
    if (evaluated) *evaluated = res.entries.size();
  });
}

vsa_status vsa_classifier_train(const vsa_dataset* d, const vsa_pipeline_config* cfg, vsa_classifier** out) {
  return guard([&] {
    need(d, "dataset");
    need(cfg, "cfg");
    need(out, "out");
    *out = new vsa_classifier{vsa::train_classifier(d->data, to_cpp(*cfg))};
  });
}

void vsa_classifier_free(vsa_classifier* c) { delete c; }

vsa_status vsa_classifier_save(const vsa_classifier* c, const char* path) {
  return guard([&] {
    need(c, "classifier");
    need(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw vsa::IoError(std::string("cannot write ") + path);
    out << vsa::save_classifier(c->clf);
    if (!out) throw vsa::IoError(std::string("cannot write ") + path);
  });
}

vsa_status vsa_classifier_load(const char* path, vsa_classifier** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vsa::IoError(std::string("cannot read ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new vsa_classifier{vsa::load_classifier(ss.str())};
  });
}

vsa_status vsa_classifier_config(const vsa_classifier* c, vsa_pipeline_config* out) {
  return guard([&] {
    need(c, "classifier");
    need(out, "out");
    *out = to_c(c->clf.config);
  });
}

vsa_status vsa_classifier_evaluate(const vsa_classifier* c, const vsa_dataset* d, double* accuracy) {
  return guard([&] {
    need(c, "classifier");
    need(d, "dataset");
    need(accuracy, "accuracy");
    *accuracy = vsa::evaluate(c->clf, d->data);
  });
}

// --- block codes ------------------------------------------------------------------------

vsa_status vsa_block_code_random(size_t n, size_t k, uint64_t seed, vsa_block_code** out) {
  return guard([&] {
    need(out, "out");
    *out = new vsa_block_code{vsa::gen_block_code(n, k, vsa::BlockKind::binary, seed)};
  });
}

vsa_status vsa_block_code_from_hot(size_t n, size_t k, const uint32_t* hot, vsa_block_code** out) {
  return guard([&] {
    need(hot, "hot");
    need(out, "out");
    if (k == 0 || n % k != 0) throw vsa::InvalidArgument("K must divide N");
    *out = new vsa_block_code{vsa::BlockCode(k, n / k, std::vector<std::uint32_t>(hot, hot + k))};
  });
}

void vsa_block_code_free(vsa_block_code* c) { delete c; }
size_t vsa_block_code_blocks(const vsa_block_code* c) { return c ? c->code.n_blocks() : 0; }

vsa_status vsa_block_code_hot(const vsa_block_code* c, uint32_t* hot, size_t cap) {
  return guard([&] {
    need(c, "code");
    need(hot, "hot");
    if (cap < c->code.n_blocks()) throw vsa::DimensionError("hot buffer is smaller than K");
    std::copy(c->code.hot().begin(), c->code.hot().end(), hot);
  });
}

vsa_status vsa_lcc_bind(const vsa_block_code* a, const vsa_block_code* b, vsa_block_code** out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = new vsa_block_code{vsa::lcc_bind(a->code, b->code)};
  });
}

vsa_status vsa_lcc_unbind(const vsa_block_code* c, const vsa_block_code* a, vsa_block_code** out) {
  return guard([&] {
    need(c, "c");
    need(a, "a");
    need(out, "out");
    *out = new vsa_block_code{vsa::lcc_unbind(c->code, a->code)};
  });
}

vsa_status vsa_block_code_overlap(const vsa_block_code* a, const vsa_block_code* b, double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = vsa::overlap(a->code, b->code);
  });
}

vsa_status vsa_min_fanin(size_t n, size_t k, unsigned theta, double* exact, size_t* integer) {
  return guard([&] {
    const auto f = vsa::min_fanin(n, k, theta);
    if (exact) *exact = f.exact;
    if (integer) *integer = f.integer;
  });
}

}  // extern "C"
