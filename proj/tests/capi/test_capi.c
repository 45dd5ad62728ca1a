/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "vsa/vsa.h"

static int failures = 0;

#define CHECK(cond)                                               \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: CHECK(%s) failed: %s\n", __FILE__, \
              __LINE__, #cond, vsa_last_error());                 \
      ++failures;                                                 \
    }                                                             \
  } while (0)

/* Real a with P(Binomial(a, q^2) >= 1) = q, q = k / n, by bisection. */
static double fanin_oracle(double n, double k) {
  const double q = k / n;
  double lo = 0.0, hi = 10.0 * n;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - pow(1.0 - q * q, mid) < q) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

static void test_errors(void) {
  vsa_config* cfg = NULL;
  CHECK(vsa_config_create(&cfg) == VSA_OK);
  CHECK(vsa_config_load(cfg, "/nonexistent/file.cfg") == VSA_ERR_CONFIG);
  CHECK(strlen(vsa_last_error()) > 0);
  CHECK(vsa_config_set(cfg, "trials", "12") == VSA_OK);
  CHECK(vsa_config_set(cfg, "Bad Key", "1") == VSA_ERR_CONFIG);
  char buf[8];
  size_t needed = 0;
  CHECK(vsa_config_get(cfg, "trials", buf, sizeof buf, &needed) == VSA_OK);
  CHECK(strcmp(buf, "12") == 0 && needed == 3);
  CHECK(vsa_config_get(cfg, "absent", buf, sizeof buf, NULL) == VSA_ERR_CONFIG);
  CHECK(vsa_experiment_resolve("sparsity", cfg, NULL) == VSA_OK);
  CHECK(vsa_experiment_resolve("no_such_experiment", cfg, NULL) == VSA_ERR_CONFIG);
  CHECK(vsa_config_create(NULL) == VSA_ERR_INVALID_ARGUMENT);
  vsa_config_free(cfg);
  vsa_config_free(NULL);
  CHECK(strcmp(vsa_status_name(VSA_ERR_NUMERICAL), "numerical failure") == 0);
}

static void test_catalog(void) {
  const char* expected[] = {"readout", "rip", "bindbench", "sparsity", "fanin", "reason", "classify"};
  CHECK(vsa_experiment_count() == 7);
  for (size_t i = 0; i < 7; ++i) {
    const char* name = vsa_experiment_name(i);
    CHECK(name != NULL && strcmp(name, expected[i]) == 0);
  }
  CHECK(vsa_experiment_name(7) == NULL);
}

static void test_block_codes(void) {
  vsa_block_code *a = NULL, *b = NULL, *c = NULL, *r = NULL;
  CHECK(vsa_block_code_random(1024, 16, 3, &a) == VSA_OK);
  CHECK(vsa_block_code_random(1024, 16, 4, &b) == VSA_OK);
  CHECK(vsa_lcc_bind(a, b, &c) == VSA_OK);
  CHECK(vsa_lcc_unbind(c, a, &r) == VSA_OK);
  double ov = 0.0;
  CHECK(vsa_block_code_overlap(r, b, &ov) == VSA_OK);
  CHECK(ov == 16.0);
  uint32_t ha[16], hb[16], hc[16];
  CHECK(vsa_block_code_hot(a, ha, 16) == VSA_OK);
  CHECK(vsa_block_code_hot(b, hb, 16) == VSA_OK);
  CHECK(vsa_block_code_hot(c, hc, 16) == VSA_OK);
  for (int i = 0; i < 16; ++i) CHECK(hc[i] == (ha[i] + hb[i]) % 64);
  CHECK(vsa_block_code_hot(c, hc, 15) == VSA_ERR_DIMENSION);
  vsa_block_code* d = NULL;
  CHECK(vsa_block_code_random(512, 16, 1, &d) == VSA_OK);
  vsa_block_code* bad = NULL;
  CHECK(vsa_lcc_bind(a, d, &bad) == VSA_ERR_DIMENSION);
  CHECK(bad == NULL);
  CHECK(vsa_block_code_from_hot(100, 7, ha, &bad) == VSA_ERR_INVALID_ARGUMENT);
  vsa_block_code_free(a);
  vsa_block_code_free(b);
  vsa_block_code_free(c);
  vsa_block_code_free(r);
  vsa_block_code_free(d);
}

static void test_fanin(void) {
  double exact = 0.0;
  size_t integer = 0;
  CHECK(vsa_min_fanin(1000, 100, 1, &exact, &integer) == VSA_OK);
  CHECK(fabs(exact - fanin_oracle(1000, 100)) < 1e-6 * exact);
  CHECK(fabs(exact - 10.48) < 0.01);
  CHECK(integer == (size_t)ceil(exact));
  double acc = 0.0;
  CHECK(vsa_predict_accuracy(1024, 2, 16, &acc) == VSA_OK);
  CHECK(acc > 0.0 && acc <= 1.0);
}

static void test_knowledge(const char* data_dir) {
  char path[4096];
  snprintf(path, sizeof path, "%s/countries.json", data_dir);
  vsa_knowledge* kb = NULL;
  CHECK(vsa_knowledge_load(path, 2048, 128, 1, &kb) == VSA_OK);
  vsa_ranking* r = NULL;
  CHECK(vsa_knowledge_analogy(kb, "Dollar", "USA", "Mexico", &r) == VSA_OK);
  CHECK(vsa_ranking_size(r) > 1);
  CHECK(strcmp(vsa_ranking_name(r, 0), "Peso") == 0);
  CHECK(vsa_ranking_score(r, 0) >= vsa_ranking_score(r, 1));
  CHECK(vsa_ranking_name(r, vsa_ranking_size(r)) == NULL);
  vsa_ranking_free(r);
  CHECK(vsa_knowledge_analogy(kb, "Dollar", "USA", "Atlantis", &r) == VSA_ERR_INVALID_ARGUMENT);
  vsa_knowledge_free(kb);
  CHECK(vsa_knowledge_load("/nonexistent.json", 256, 16, 1, &kb) == VSA_ERR_IO);
}

static void test_classifier(const char* data_dir, const char* work) {
  char path[4096], model[4096];
  snprintf(path, sizeof path, "%s/datasets/iris.csv", data_dir);
  snprintf(model, sizeof model, "%s/capi_model.json", work);
  vsa_dataset* d = NULL;
  CHECK(vsa_dataset_load(path, "label", &d) == VSA_OK);
  CHECK(vsa_dataset_samples(d) == 150 && vsa_dataset_features(d) == 4 && vsa_dataset_classes(d) == 3);
  vsa_pipeline_config cfg;
  vsa_pipeline_config_default(&cfg);
  cfg.n = 128;
  cfg.k = 8;
  double mean = 0.0, sd = 0.0;
  CHECK(vsa_cross_validate(d, &cfg, 1, &mean, &sd) == VSA_OK);
  CHECK(mean > 0.85 && sd >= 0.0);
  vsa_classifier* clf = NULL;
  CHECK(vsa_classifier_train(d, &cfg, &clf) == VSA_OK);
  double acc1 = 0.0, acc2 = 0.0;
  CHECK(vsa_classifier_evaluate(clf, d, &acc1) == VSA_OK);
  CHECK(vsa_classifier_save(clf, model) == VSA_OK);
  vsa_classifier* back = NULL;
  CHECK(vsa_classifier_load(model, &back) == VSA_OK);
  CHECK(vsa_classifier_evaluate(back, d, &acc2) == VSA_OK);
  CHECK(acc1 == acc2);
  vsa_pipeline_config got;
  CHECK(vsa_classifier_config(back, &got) == VSA_OK);
  CHECK(got.n == 128 && got.k == 8 && got.kappa == cfg.kappa && got.lambda == cfg.lambda);
  size_t shape_n[] = {64, 128}, shape_k[] = {8, 8};
  int64_t kappas[] = {3};
  double lambdas[] = {1.0};
  vsa_pipeline_config best;
  size_t evaluated = 0;
  CHECK(vsa_grid_search(d, VSA_SCHEME_BLOCK_SHIFT, shape_n, shape_k, 2, kappas, 1, lambdas, 1, 3, 1, 1, &best, &mean,
                        &sd, &evaluated) == VSA_OK);
  CHECK(evaluated == 2 && (best.n == 64 || best.n == 128));
  cfg.k = 7;
  CHECK(vsa_classifier_train(d, &cfg, &clf) == VSA_ERR_INVALID_ARGUMENT);
  vsa_classifier_free(clf);
  vsa_classifier_free(back);
  vsa_dataset_free(d);
}

int main(int argc, char** argv) {
  if (argc != 3) {
    fprintf(stderr, "usage: %s DATA_DIR WORK_DIR\n", argv[0]);
    return 2;
  }
  CHECK(strlen(vsa_version()) > 0);
  test_errors();
  test_catalog();
  test_block_codes();
  test_fanin();
  test_knowledge(argv[1]);
  test_classifier(argv[1], argv[2]);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
