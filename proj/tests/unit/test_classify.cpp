#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "vsa/binding.hpp"
#include "vsa/classify.hpp"
#include "vsa/error.hpp"

using namespace vsa;

namespace {

Dataset load(const std::string& name) { return ingest_dataset(std::string(VSA_DATA_DIR) + "/datasets/" + name + ".csv"); }

// Two Gaussian blobs in d dimensions, n per class.
Dataset blobs(std::size_t n, std::size_t d, double sep, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "blobs";
  data.class_names = {"a", "b"};
  data.features.resize(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const std::size_t c = i % 2;
    data.labels.push_back(c);
    for (std::size_t j = 0; j < d; ++j)
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.normal() + (c == 1 && j == 0 ? sep : 0.0);
  }
  for (std::size_t j = 0; j < d; ++j) data.feature_names.push_back("x" + std::to_string(j));
  return data;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("block-shift overlap profile is exactly K - d") {
    const LevelEncoder enc(128, 16, EncodingScheme::block_shift);
    REQUIRE(enc.levels() == 113);
    std::vector<BlockCode> codes;
    for (std::size_t v = 0; v < enc.levels(); ++v) codes.push_back(enc.block_code(v));
    for (const auto h : codes.front().hot()) CHECK(h == 0);
    std::set<std::vector<std::uint32_t>> distinct;
    for (const auto& c : codes) distinct.insert(std::vector<std::uint32_t>(c.hot().begin(), c.hot().end()));
    CHECK(distinct.size() == 113);
    bool profile_ok = true;
    for (std::size_t v = 0; v < codes.size(); ++v)
      for (std::size_t w = 0; w < codes.size(); ++w) {
        const long d = std::labs(static_cast<long>(v) - static_cast<long>(w));
        const double expect = static_cast<double>(std::max(0L, 16 - d));
        profile_ok = profile_ok && overlap(codes[v], codes[w]) == expect;
      }
    CHECK(profile_ok);
    // Each increment moves exactly one block by one, in cyclic block order.
    for (std::size_t v = 0; v + 1 < codes.size(); ++v) {
      const auto a = codes[v].hot(), b = codes[v + 1].hot();
      for (std::size_t blk = 0; blk < 16; ++blk) CHECK(b[blk] - a[blk] == (blk == v % 16 ? 1u : 0u));
    }
    CHECK_THROWS_AS(enc.block_code(113), InvalidArgument);
    CHECK_THROWS_AS(enc.thermometric(0), InvalidArgument);
  }

  TEST_CASE("thermometric profile is N - 2d") {
    const LevelEncoder enc(40, 1, EncodingScheme::thermometric);
    REQUIRE(enc.levels() == 41);
    for (std::size_t v = 0; v <= 40; v += 3)
      for (std::size_t w = 0; w <= 40; w += 7) {
        const double d = std::abs(static_cast<double>(v) - static_cast<double>(w));
        CHECK(similarity(enc.thermometric(v), enc.thermometric(w), Norm::raw) == doctest::Approx(40.0 - 2.0 * d));
      }
    CHECK(enc.thermometric(0).values()[0].real() == -1.0);
    CHECK(enc.thermometric(40).values()[39].real() == 1.0);
  }

  TEST_CASE("sample encoding matches the generic binding route") {
    for (const auto scheme : {EncodingScheme::block_shift, EncodingScheme::thermometric}) {
      PipelineConfig cfg;
      cfg.scheme = scheme;
      cfg.n = 256;
      cfg.k = 16;
      cfg.seed = 9;
      const std::size_t features = 5;
      const SampleEncoder enc(cfg, features);
      const std::vector<std::uint32_t> q{0, 3, 100, 240, 17};
      Accumulator expect(cfg.n, Accumulator::Domain::integer);
      if (scheme == EncodingScheme::block_shift) {
        const auto keys = BlockCodebook::generate(cfg.n, cfg.k, features, BlockKind::binary, cfg.seed);
        for (std::size_t f = 0; f < features; ++f) expect.add(lcc_bind(keys.column(f), enc.levels().block_code(q[f])));
      } else {
        const auto keys = Codebook::generate(cfg.n, features, DenseKind::bipolar, cfg.seed);
        for (std::size_t f = 0; f < features; ++f) expect.add(hadamard_bind(keys.column(f), enc.levels().thermometric(q[f])));
      }
      CHECK(enc.accumulate(q) == expect);
      const auto h = enc.encode(q, 1);
      CHECK(h.cwiseAbs().maxCoeff() <= 1.0);
      const auto clipped = clip(expect, 1);
      for (std::size_t i = 0; i < cfg.n; ++i) CHECK(h[static_cast<Eigen::Index>(i)] == clipped.at(i).real());
    }
  }

  TEST_CASE("single feature without clipping is the bound pair") {
    PipelineConfig cfg;
    cfg.n = 128;
    cfg.k = 8;
    const SampleEncoder enc(cfg, 1);
    const std::vector<std::uint32_t> q{42};
    const auto key = BlockCodebook::generate(128, 8, 1, BlockKind::binary, cfg.seed).column(0);
    const auto pair = lcc_bind(key, enc.levels().block_code(42)).to_dense();
    const auto h = enc.encode(q, 0);
    for (std::size_t i = 0; i < 128; ++i) CHECK(h[static_cast<Eigen::Index>(i)] == pair[i].real());
    CHECK_THROWS_AS(enc.encode(std::vector<std::uint32_t>{121}, 0), InvalidArgument);
    CHECK_THROWS_AS(enc.encode(std::vector<std::uint32_t>{1, 2}, 0), DimensionError);
  }

  TEST_CASE("nearby feature values give more similar hidden vectors") {
    // Averaged over 100 key draws, similarity to a base sample falls with level distance.
    std::vector<double> mean_sim(4, 0.0);
    const std::vector<std::uint32_t> shifts{0, 8, 32, 96};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      PipelineConfig cfg;
      cfg.n = 256;
      cfg.k = 16;
      cfg.seed = seed;
      const SampleEncoder enc(cfg, 3);
      const std::vector<std::uint32_t> base{20, 100, 60};
      const auto h0 = enc.encode(base, 3);
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        auto q = base;
        q[0] += shifts[s];
        const auto h = enc.encode(q, 3);
        mean_sim[s] += h0.dot(h) / (h0.norm() * h.norm()) / 100.0;
      }
    }
    for (std::size_t s = 1; s < shifts.size(); ++s) CHECK(mean_sim[s] < mean_sim[s - 1]);
  }

  TEST_CASE("ridge: normal equations hold in primal and dual form") {
    Rng rng(4);
    for (const auto [rows, cols] : std::vector<std::pair<int, int>>{{60, 20}, {20, 60}}) {
      Eigen::MatrixXd h(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) h(i, j) = rng.normal();
      std::vector<std::size_t> labels(static_cast<std::size_t>(rows));
      for (auto& l : labels) l = rng.below(3);
      const double lambda = 0.5;
      const auto m = ridge_train(h, labels, 3, lambda);
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows, 3);
      for (int i = 0; i < rows; ++i) y(i, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)])) = 1.0;
      Eigen::MatrixXd a = h.transpose() * h;
      a.diagonal().array() += lambda;
      const Eigen::MatrixXd rhs = h.transpose() * y;
      CHECK((a * m.w.transpose() - rhs).norm() / rhs.norm() < 1e-6);
    }
  }

  TEST_CASE("ridge: closed-form limits") {
    // Orthonormal rows, lambda = 0: exact interpolation of the one-hot targets.
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(8, 8).topRows(4);
    const std::vector<std::size_t> labels{0, 1, 1, 0};
    const auto m = ridge_train(q, labels, 2, 0.0);
    const Eigen::MatrixXd fit = q * m.w.transpose();
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 2; ++c) CHECK(fit(i, c) == doctest::Approx(labels[static_cast<std::size_t>(i)] == static_cast<std::size_t>(c) ? 1.0 : 0.0));
    // Heavy shrinkage.
    CHECK(ridge_train(q, labels, 2, 1e12).w.norm() < 1e-10);
    // Rank-deficient without regularisation.
    Eigen::MatrixXd dup(6, 3);
    dup << 1, 2, 3, 1, 2, 3, 2, 4, 6, 0, 0, 0, 1, 2, 3, 2, 4, 6;
    CHECK_THROWS_AS(ridge_train(dup, std::vector<std::size_t>{0, 1, 0, 1, 0, 1}, 2, 0.0), NumericalError);
    // One class only: always predicted.
    const auto one = ridge_train(dup, std::vector<std::size_t>(6, 0), 1, 1.0);
    CHECK(ridge_predict(one, Eigen::VectorXd(Eigen::VectorXd::Ones(3))) == 0);
  }

  TEST_CASE("ridge: separable toy set and scale invariance") {
    const auto data = blobs(50, 2, 12.0, 8);
    PipelineConfig cfg;
    cfg.n = 256;
    cfg.k = 16;
    cfg.kappa = 7;
    cfg.lambda = 1e-2;
    const auto clf = train_classifier(data, cfg);
    CHECK(evaluate(clf, data) == 1.0);

    const SampleEncoder enc(cfg, 2);
    const auto q = clf.normalizer.quantize(data.features.row(3).transpose(), enc.levels().levels());
    const Eigen::VectorXd h = enc.encode(q, cfg.kappa);
    CHECK(ridge_predict(clf.model, h) == ridge_predict(clf.model, Eigen::VectorXd(3.5 * h)));
  }

  TEST_CASE("ridge with an intercept matches whitened nearest centroid") {
    const std::size_t n = 100, d = 3;
    Rng rng(17);
    Eigen::MatrixXd x(2 * n, d);
    std::vector<std::size_t> labels(2 * n);
    Eigen::Matrix3d mix;
    mix << 1.0, 0.4, 0.0, 0.0, 0.7, 0.3, 0.2, 0.0, 1.2;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      labels[i] = i % 2;
      Eigen::Vector3d z(rng.normal(), rng.normal(), rng.normal());
      x.row(static_cast<Eigen::Index>(i)) = (mix * z).transpose() + (labels[i] ? Eigen::RowVector3d(1.0, -0.5, 0.3) : Eigen::RowVector3d::Zero());
    }
    Eigen::MatrixXd h(2 * n, d + 1);
    h << x, Eigen::VectorXd::Ones(2 * n);
    const auto m = ridge_train(h, labels, 2, 0.0);

    Eigen::RowVector3d mu[2] = {Eigen::RowVector3d::Zero(), Eigen::RowVector3d::Zero()};
    for (std::size_t i = 0; i < 2 * n; ++i) mu[labels[i]] += x.row(static_cast<Eigen::Index>(i)) / static_cast<double>(n);
    Eigen::Matrix3d sw = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const Eigen::RowVector3d c = x.row(static_cast<Eigen::Index>(i)) - mu[labels[i]];
      sw += c.transpose() * c;
    }
    const Eigen::Matrix3d sw_inv = sw.inverse();
    std::size_t agree = 0;
    const std::size_t probes = 500;
    for (std::size_t t = 0; t < probes; ++t) {
      const Eigen::RowVector3d p(2.0 * rng.normal(), 2.0 * rng.normal(), 2.0 * rng.normal());
      const double d0 = (p - mu[0]) * sw_inv * (p - mu[0]).transpose();
      const double d1 = (p - mu[1]) * sw_inv * (p - mu[1]).transpose();
      Eigen::VectorXd hp(d + 1);
      hp << p.transpose(), 1.0;
      agree += ridge_predict(m, hp) == (d1 < d0 ? 1u : 0u);
    }
    CHECK(agree == probes);
  }

  TEST_CASE("dataset ingestion and quantization") {
    const auto d = parse_dataset("a,b,label\n5,1,x\n5,2,y\n5,3,x\n", "label", "toy");
    CHECK(d.samples() == 3);
    CHECK(d.classes() == 2);
    CHECK(d.class_names[1] == "y");
    const auto z = Normalizer::fit(d.features);
    CHECK(z.quantize(d.features.row(0).transpose(), 10)[0] == 0);   // constant feature
    CHECK(z.quantize(d.features.row(2).transpose(), 10)[1] == 9);   // max value
    CHECK(z.quantize(d.features.row(0).transpose(), 10)[1] == 0);
    Rng rng(2);
    const double width = 2.0 / 9.0;
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd s(2);
      s << 5.0, 1.0 + 2.0 * rng.uniform();
      const auto q = z.quantize(s, 10);
      CHECK(std::abs(z.dequantize(1, q[1], 10) - s[1]) <= width / 2 + 1e-12);
    }
    CHECK_THROWS_AS(parse_dataset("a,label\n1,x\nfoo,y\n"), IoError);
    CHECK_THROWS_AS(parse_dataset(""), IoError);
    CHECK_THROWS_AS(parse_dataset("a,label\n1,x\n2,x\n"), IoError);
    CHECK_THROWS_AS(parse_dataset("a,b\n1,2\n"), IoError);
    CHECK_THROWS_AS(ingest_dataset("/nonexistent.csv"), IoError);

    const auto iris = load("iris");
    CHECK(iris.samples() == 150);
    CHECK(iris.classes() == 3);
    CHECK(iris.features.cols() == 4);
  }

  TEST_CASE("stratified folds partition every class evenly") {
    const auto iris = load("iris");
    const auto folds = stratified_folds(iris.labels, 3, 4, 5);
    std::vector<std::size_t> all;
    for (const auto& f : folds) {
      all.insert(all.end(), f.begin(), f.end());
      std::vector<std::size_t> per(3, 0);
      for (const auto i : f) ++per[iris.labels[i]];
      for (const auto c : per) CHECK((c == 12 || c == 13));
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(150);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    CHECK(stratified_folds(iris.labels, 3, 4, 5) == folds);
    CHECK(stratified_folds(iris.labels, 3, 4, 6) != folds);
    CHECK_THROWS_AS(stratified_folds(std::vector<std::size_t>{0, 0, 0, 1, 1}, 2, 3, 1), InvalidArgument);
  }

  TEST_CASE("cross-validation sanity") {
    const auto dup = parse_dataset("a,b,label\n0,1,x\n0,1,x\n0,1,x\n0,1,x\n1,0,y\n1,0,y\n1,0,y\n1,0,y\n");
    PipelineConfig cfg;
    cfg.n = 128;
    cfg.k = 16;
    CHECK(cross_validate(dup, cfg).mean == 1.0);

    auto iris = load("iris");
    const auto r1 = cross_validate(iris, cfg);
    CHECK(r1.mean > 0.85);
    const auto r2 = cross_validate(iris, cfg, 3);
    CHECK(r1.fold_accuracy == r2.fold_accuracy);

    // Permutation control: shuffled labels give chance accuracy.
    double shuffled = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(100 + s);
      std::shuffle(iris.labels.begin(), iris.labels.end(), rng);
      shuffled += cross_validate(iris, cfg).mean / 5.0;
    }
    CHECK(std::abs(shuffled - 1.0 / 3.0) < 0.08);
  }

  TEST_CASE("grid search agrees with direct cross-validation") {
    const auto wine = load("wine");
    for (const auto scheme : {EncodingScheme::block_shift, EncodingScheme::thermometric}) {
      GridSpec g;
      g.scheme = scheme;
      g.shapes = scheme == EncodingScheme::block_shift ? std::vector<std::pair<std::size_t, std::size_t>>{{64, 16}, {256, 16}}
                                                       : std::vector<std::pair<std::size_t, std::size_t>>{{50, 1}, {300, 1}};
      g.kappas = {1, 7};
      g.lambdas = {0.25, 4.0};
      const auto res = grid_search(wine, g, 4, 3);
      CHECK(res.entries.size() == 8);
      for (const auto& e : res.entries) {
        const auto direct = cross_validate(wine, e.config);
        for (std::size_t f = 0; f < 4; ++f)
          CHECK(e.report.fold_accuracy[f] == doctest::Approx(direct.fold_accuracy[f]).epsilon(1e-12));
        const bool better = e.report.mean > res.best.report.mean;
        CHECK_FALSE(better);
      }
      CHECK(res.best.report.mean > 0.85);
    }
  }

  TEST_CASE("grid defaults and classifier files") {
    const auto dense = GridSpec::dense_default();
    CHECK(dense.shapes.size() == 30);
    CHECK(dense.lambdas.size() == 16);
    CHECK(dense.lambdas.front() == std::ldexp(1.0, -10));
    const auto sparse = GridSpec::sparse_default();
    CHECK(sparse.shapes.size() == 16);
    CHECK(sparse.shapes.front() == std::pair<std::size_t, std::size_t>{64, 16});
    CHECK(sparse.shapes.back() == std::pair<std::size_t, std::size_t>{4096, 128});

    const auto iris = load("iris");
    PipelineConfig cfg;
    cfg.n = 256;
    cfg.k = 32;
    const auto clf = train_classifier(iris, cfg);
    const auto back = load_classifier(save_classifier(clf));
    CHECK(classify(back, iris.features) == classify(clf, iris.features));
    CHECK(evaluate(back, iris) > 0.9);
    CHECK_THROWS_AS(load_classifier("{}"), ConfigError);
  }
}
