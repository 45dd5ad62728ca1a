// Command-line front end; talks to the library only through vsa.h.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsa/vsa.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

int exit_code(vsa_status s) {
  switch (s) {
    case VSA_OK: return exit_ok;
    case VSA_ERR_CONFIG:
    case VSA_ERR_INVALID_ARGUMENT:
    case VSA_ERR_DIMENSION: return exit_config;
    case VSA_ERR_NUMERICAL: return exit_numerical;
    default: return exit_failure;
  }
}

/// Thrown to unwind to main with a library status.
struct Failure {
  vsa_status status;
};

void check(vsa_status s) {
  if (s != VSA_OK) throw Failure{s};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<vsa_config, Deleter<vsa_config, vsa_config_free>>;
using KnowledgePtr = std::unique_ptr<vsa_knowledge, Deleter<vsa_knowledge, vsa_knowledge_free>>;
using RankingPtr = std::unique_ptr<vsa_ranking, Deleter<vsa_ranking, vsa_ranking_free>>;
using DatasetPtr = std::unique_ptr<vsa_dataset, Deleter<vsa_dataset, vsa_dataset_free>>;
using ClassifierPtr = std::unique_ptr<vsa_classifier, Deleter<vsa_classifier, vsa_classifier_free>>;

struct Globals {
  std::string config_file;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::size_t threads = 0;
  std::vector<std::string> sets;
};

/// Defaults < config file < --set flags.
ConfigPtr build_config(const Globals& g) {
  vsa_config* raw = nullptr;
  check(vsa_config_create(&raw));
  ConfigPtr cfg(raw);
  if (!g.config_file.empty()) check(vsa_config_load(cfg.get(), g.config_file.c_str()));
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw Failure{VSA_ERR_CONFIG};
    }
    check(vsa_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  return cfg;
}

std::string out_dir(const Globals& g) { return g.out_dir.empty() ? vsa_default_output_dir() : g.out_dir; }

void run_experiment(const std::string& id, const Globals& g) {
  const auto cfg = build_config(g);
  const std::string dir = out_dir(g);
  check(vsa_experiment_run(id.c_str(), cfg.get(), g.seed, g.threads, dir.c_str()));
  const auto base = std::filesystem::path(dir) / id;
  std::printf("wrote %s.csv, %s.svg, %s.manifest.json\n", base.c_str(), base.c_str(), base.c_str());
}

void run_rerun(const std::string& manifest, const Globals& g) {
  int identical = 0;
  const std::string dir = out_dir(g);
  check(vsa_rerun(manifest.c_str(), dir.c_str(), g.threads, &identical));
  if (!identical) {
    std::fprintf(stderr, "error: %s\n", vsa_last_error());
    throw Failure{VSA_ERR_INTERNAL};
  }
  std::printf("reproduced %s into %s: all outputs identical\n", manifest.c_str(), dir.c_str());
}

struct QueryArgs {
  std::string knowledge;
  std::size_t n = 2048;
  std::size_t k = 128;
  std::string probe, from, to;
  std::size_t top = 5;
};

void run_query(const QueryArgs& q, const Globals& g) {
  const std::string path = q.knowledge.empty()
                               ? (std::filesystem::path(vsa_default_data_dir()) / "countries.json").string()
                               : q.knowledge;
  vsa_knowledge* kb_raw = nullptr;
  check(vsa_knowledge_load(path.c_str(), q.n, q.k, g.seed, &kb_raw));
  KnowledgePtr kb(kb_raw);
  vsa_ranking* r_raw = nullptr;
  check(vsa_knowledge_analogy(kb.get(), q.probe.c_str(), q.from.c_str(), q.to.c_str(), &r_raw));
  RankingPtr r(r_raw);
  const std::size_t size = vsa_ranking_size(r.get());
  if (size == 0) throw Failure{VSA_ERR_NUMERICAL};
  std::printf("%s : %s :: %s : %s  (role %s)\n", q.probe.c_str(), q.from.c_str(), vsa_ranking_name(r.get(), 0),
              q.to.c_str(), vsa_ranking_role(r.get()));
  for (std::size_t i = 0; i < std::min(q.top, size); ++i)
    std::printf("%2zu  %-24s %.4f\n", i + 1, vsa_ranking_name(r.get(), i), vsa_ranking_score(r.get(), i));
}

struct PipelineArgs {
  vsa_pipeline_config cfg{};
  std::string scheme = "block_shift";
  std::string data;
  std::string label = "label";
  std::string model;
};

void add_pipeline_flags(CLI::App* app, PipelineArgs& p) {
  app->add_option("--n", p.cfg.n, "Vector dimension N")->capture_default_str();
  app->add_option("--k", p.cfg.k, "Block count K (block_shift only)")->capture_default_str();
  app->add_option("--kappa", p.cfg.kappa, "Clipping threshold, 0 disables clipping")->capture_default_str();
  app->add_option("--lambda", p.cfg.lambda, "Ridge regulariser")->capture_default_str();
  app->add_option("--scheme", p.scheme, "Level encoding")
      ->check(CLI::IsMember({"block_shift", "thermometric"}))
      ->capture_default_str();
  app->add_option("--folds", p.cfg.folds, "Cross-validation folds")->capture_default_str();
}

vsa_scheme scheme_of(const std::string& s) {
  return s == "thermometric" ? VSA_SCHEME_THERMOMETRIC : VSA_SCHEME_BLOCK_SHIFT;
}

const char* scheme_name(vsa_scheme s) { return s == VSA_SCHEME_THERMOMETRIC ? "thermometric" : "block_shift"; }

DatasetPtr load_dataset(const PipelineArgs& p) {
  vsa_dataset* raw = nullptr;
  check(vsa_dataset_load(p.data.c_str(), p.label.c_str(), &raw));
  return DatasetPtr(raw);
}

void print_pipeline(const vsa_pipeline_config& c) {
  std::printf("scheme=%s\nn=%zu\nk=%zu\nkappa=%lld\nlambda=%.17g\nfolds=%zu\nseed=%llu\n", scheme_name(c.scheme), c.n,
              c.k, static_cast<long long>(c.kappa), c.lambda, c.folds, static_cast<unsigned long long>(c.seed));
}

void run_train(PipelineArgs p, const Globals& g) {
  p.cfg.scheme = scheme_of(p.scheme);
  p.cfg.seed = g.seed;
  const auto data = load_dataset(p);
  double mean = 0.0, sd = 0.0;
  check(vsa_cross_validate(data.get(), &p.cfg, g.threads, &mean, &sd));
  vsa_classifier* raw = nullptr;
  check(vsa_classifier_train(data.get(), &p.cfg, &raw));
  ClassifierPtr clf(raw);
  const auto parent = std::filesystem::path(p.model).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  check(vsa_classifier_save(clf.get(), p.model.c_str()));
  print_pipeline(p.cfg);
  std::printf("cv_mean=%.6f\ncv_std=%.6f\nmodel=%s\n", mean, sd, p.model.c_str());
}

void run_eval(const PipelineArgs& p) {
  vsa_classifier* raw = nullptr;
  check(vsa_classifier_load(p.model.c_str(), &raw));
  ClassifierPtr clf(raw);
  const auto data = load_dataset(p);
  double acc = 0.0;
  check(vsa_classifier_evaluate(clf.get(), data.get(), &acc));
  std::printf("samples=%zu\naccuracy=%.6f\n", vsa_dataset_samples(data.get()), acc);
}

struct GridArgs {
  std::vector<std::size_t> n_values, k_values;
  std::vector<std::int64_t> kappas;
  std::vector<double> lambdas;
};

void run_grid(PipelineArgs p, const GridArgs& grid, const Globals& g) {
  const vsa_scheme scheme = scheme_of(p.scheme);
  const auto data = load_dataset(p);
  std::vector<std::size_t> sn, sk;
  if (!grid.n_values.empty()) {
    const std::vector<std::size_t> ks =
        scheme == VSA_SCHEME_THERMOMETRIC || grid.k_values.empty() ? std::vector<std::size_t>{1} : grid.k_values;
    for (const auto n : grid.n_values)
      for (const auto k : ks)
        if (scheme == VSA_SCHEME_THERMOMETRIC || (k < n && n % k == 0)) {
          sn.push_back(n);
          sk.push_back(k);
        }
    if (sn.empty()) {
      std::fprintf(stderr, "error: no (N, K) pair in the grid has K dividing N\n");
      throw Failure{VSA_ERR_CONFIG};
    }
  }
  vsa_pipeline_config best{};
  double mean = 0.0, sd = 0.0;
  std::size_t evaluated = 0;
  check(vsa_grid_search(data.get(), scheme, sn.empty() ? nullptr : sn.data(), sn.empty() ? nullptr : sk.data(),
                        sn.size(), grid.kappas.empty() ? nullptr : grid.kappas.data(), grid.kappas.size(),
                        grid.lambdas.empty() ? nullptr : grid.lambdas.data(), grid.lambdas.size(), p.cfg.folds,
                        g.seed, g.threads, &best, &mean, &sd, &evaluated));
  print_pipeline(best);
  std::printf("cv_mean=%.6f\ncv_std=%.6f\nevaluated=%zu\n", mean, sd, evaluated);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector symbolic architecture experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vsa_version()));

  Globals g;
  app.add_option("--config", g.config_file, "Key = value config file");
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out_dir, "Output directory (default $VSA_OUT_DIR or vsa_out)");
  app.add_option("--threads", g.threads, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--set", g.sets, "Override one config key: --set key=value (repeatable)");
  app.fallthrough();

  std::string chosen;
  for (std::size_t i = 0; i < vsa_experiment_count(); ++i) {
    const std::string id = vsa_experiment_name(i);
    auto* sub = app.add_subcommand(id, vsa_experiment_description(i));
    sub->fallthrough();
    sub->callback([&chosen, id, sub] {
      if (sub->get_subcommands().empty()) chosen = id;
    });
  }

  QueryArgs query;
  auto* reason = app.get_subcommand("reason");
  auto* query_cmd = reason->add_subcommand("query", "Answer one analogy from a knowledge file");
  query_cmd->fallthrough();
  query_cmd->add_option("--knowledge", query.knowledge, "Knowledge JSON (default: bundled countries.json)");
  query_cmd->add_option("--n", query.n, "Dimension N")->capture_default_str();
  query_cmd->add_option("--k", query.k, "Block count K")->capture_default_str();
  query_cmd->add_option("--probe", query.probe, "Known filler")->required();
  query_cmd->add_option("--from", query.from, "Record the probe belongs to")->required();
  query_cmd->add_option("--to", query.to, "Record to answer for")->required();
  query_cmd->add_option("--top", query.top, "Candidates to print")->capture_default_str();

  auto* classify = app.get_subcommand("classify");
  PipelineArgs train_args, eval_args, grid_args;
  vsa_pipeline_config_default(&train_args.cfg);
  grid_args.cfg = eval_args.cfg = train_args.cfg;
  GridArgs grid;

  auto* train_cmd = classify->add_subcommand("train", "Train one pipeline and save the model");
  train_cmd->fallthrough();
  train_cmd->add_option("--data", train_args.data, "CSV dataset")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--label", train_args.label, "Label column")->capture_default_str();
  train_cmd->add_option("--model", train_args.model, "Model JSON to write")->required();
  add_pipeline_flags(train_cmd, train_args);

  auto* eval_cmd = classify->add_subcommand("eval", "Evaluate a saved model on a dataset");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--data", eval_args.data, "CSV dataset")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--label", eval_args.label, "Label column")->capture_default_str();
  eval_cmd->add_option("--model", eval_args.model, "Model JSON")->required()->check(CLI::ExistingFile);

  auto* grid_cmd = classify->add_subcommand("grid", "Grid search by cross-validation accuracy");
  grid_cmd->fallthrough();
  grid_cmd->add_option("--data", grid_args.data, "CSV dataset")->required()->check(CLI::ExistingFile);
  grid_cmd->add_option("--label", grid_args.label, "Label column")->capture_default_str();
  grid_cmd->add_option("--scheme", grid_args.scheme, "Level encoding")
      ->check(CLI::IsMember({"block_shift", "thermometric"}))
      ->capture_default_str();
  grid_cmd->add_option("--folds", grid_args.cfg.folds, "Cross-validation folds")->capture_default_str();
  grid_cmd->add_option("--n", grid.n_values, "Candidate N values")->delimiter(',');
  grid_cmd->add_option("--k", grid.k_values, "Candidate K values (block_shift)")->delimiter(',');
  grid_cmd->add_option("--kappa", grid.kappas, "Candidate clipping thresholds")->delimiter(',');
  grid_cmd->add_option("--lambda", grid.lambdas, "Candidate ridge regularisers")->delimiter(',');

  std::string manifest;
  auto* rerun_cmd = app.add_subcommand("rerun", "Repeat a recorded run and verify its outputs");
  rerun_cmd->fallthrough();
  rerun_cmd->add_option("manifest", manifest, "Manifest JSON of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (*query_cmd) {
      run_query(query, g);
    } else if (*train_cmd) {
      run_train(train_args, g);
    } else if (*eval_cmd) {
      run_eval(eval_args);
    } else if (*grid_cmd) {
      run_grid(grid_args, grid, g);
    } else if (*rerun_cmd) {
      run_rerun(manifest, g);
    } else {
      run_experiment(chosen, g);
    }
  } catch (const Failure& f) {
    const char* msg = vsa_last_error();
    if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_failure;
  }
  return exit_ok;
}
