#include "vsa/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "vsa/error.hpp"
#include "vsa/parallel.hpp"

namespace vsa {

using detail::require;

// --- level encoder -------------------------------------------------------------

LevelEncoder::LevelEncoder(std::size_t n, std::size_t k, EncodingScheme scheme) : n_(n), k_(k), scheme_(scheme) {
  require(n >= 1, "LevelEncoder: N must be >= 1");
  if (scheme == EncodingScheme::block_shift)
    require(k >= 1 && k <= n && n % k == 0, "LevelEncoder: K must divide N");
}

std::size_t LevelEncoder::levels() const noexcept {
  return scheme_ == EncodingScheme::block_shift ? n_ - k_ + 1 : n_ + 1;
}

void LevelEncoder::check_level(std::size_t level) const {
  require(level < levels(), "LevelEncoder: level " + std::to_string(level) + " out of range [0, " +
                                std::to_string(levels() - 1) + "]");
}

BlockCode LevelEncoder::block_code(std::size_t level) const {
  require(scheme_ == EncodingScheme::block_shift, "LevelEncoder: not a block-shift encoder");
  check_level(level);
  std::vector<std::uint32_t> hot(k_);
  for (std::size_t b = 0; b < k_; ++b) hot[b] = static_cast<std::uint32_t>((level + k_ - 1 - b) / k_);
  return BlockCode(k_, n_ / k_, std::move(hot));
}

DenseVector LevelEncoder::thermometric(std::size_t level) const {
  require(scheme_ == EncodingScheme::thermometric, "LevelEncoder: not a thermometric encoder");
  check_level(level);
  std::vector<cplx> v(n_, cplx{-1.0, 0.0});
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(level), cplx{1.0, 0.0});
  return DenseVector(DenseKind::bipolar, std::move(v));
}

// --- datasets ----------------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Dataset parse_dataset(const std::string& csv_text, const std::string& label_column, const std::string& name) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line))
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  require<IoError>(!header.empty(), "dataset '" + name + "': empty file");
  const auto lit = std::find(header.begin(), header.end(), label_column);
  require<IoError>(lit != header.end(), "dataset '" + name + "': no '" + label_column + "' column");
  const auto label_idx = static_cast<std::size_t>(lit - header.begin());
  require<IoError>(header.size() >= 2, "dataset '" + name + "': no feature columns");

  Dataset d;
  d.name = name;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) d.feature_names.push_back(header[c]);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    require<IoError>(cells.size() == header.size(), "dataset '" + name + "' line " + std::to_string(line_no) +
                                                        ": expected " + std::to_string(header.size()) + " cells");
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      require<IoError>(!cells[c].empty() && end == cells[c].c_str() + cells[c].size() && std::isfinite(v),
                       "dataset '" + name + "' line " + std::to_string(line_no) + ": non-numeric cell '" +
                           cells[c] + "'");
      row.push_back(v);
    }
    const auto& label = cells[label_idx];
    require<IoError>(!label.empty(), "dataset '" + name + "' line " + std::to_string(line_no) + ": empty label");
    auto cit = std::find(d.class_names.begin(), d.class_names.end(), label);
    if (cit == d.class_names.end()) {
      d.class_names.push_back(label);
      cit = d.class_names.end() - 1;
    }
    d.labels.push_back(static_cast<std::size_t>(cit - d.class_names.begin()));
    rows.push_back(std::move(row));
  }
  require<IoError>(!rows.empty(), "dataset '" + name + "': no samples");
  require<IoError>(d.class_names.size() >= 2, "dataset '" + name + "': needs at least two classes");
  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return d;
}

Dataset ingest_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("dataset: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  auto name = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  if (const auto dot = name.rfind('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_dataset(ss.str(), label_column, name);
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  require(!rows.empty(), "Normalizer: no rows");
  Normalizer z;
  z.lo = x.row(static_cast<Eigen::Index>(rows.front())).transpose();
  z.hi = z.lo;
  for (const auto r : rows) {
    const auto row = x.row(static_cast<Eigen::Index>(r)).transpose();
    z.lo = z.lo.cwiseMin(row);
    z.hi = z.hi.cwiseMax(row);
  }
  return z;
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& x) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit(x, rows);
}

std::vector<std::uint32_t> Normalizer::quantize(const Eigen::Ref<const Eigen::VectorXd>& sample,
                                                std::size_t levels) const {
  require<DimensionError>(sample.size() == lo.size(), "Normalizer: feature count mismatch");
  require(levels >= 1, "Normalizer: levels must be >= 1");
  const double top = static_cast<double>(levels - 1);
  std::vector<std::uint32_t> out(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index f = 0; f < sample.size(); ++f) {
    const double range = hi[f] - lo[f];
    if (!(range > 0.0)) {
      out[static_cast<std::size_t>(f)] = 0;
      continue;
    }
    const double u = std::clamp((sample[f] - lo[f]) / range, 0.0, 1.0);
    out[static_cast<std::size_t>(f)] = static_cast<std::uint32_t>(std::lround(u * top));
  }
  return out;
}

double Normalizer::dequantize(std::size_t feature, std::uint32_t level, std::size_t levels) const {
  const auto f = static_cast<Eigen::Index>(feature);
  if (levels <= 1) return lo[f];
  return lo[f] + (hi[f] - lo[f]) * static_cast<double>(level) / static_cast<double>(levels - 1);
}

// --- encoding ------------------------------------------------------------------------

SampleEncoder::SampleEncoder(const PipelineConfig& cfg, std::size_t features)
    : levels_(cfg.n, cfg.k, cfg.scheme), features_(features) {
  require(features >= 1, "SampleEncoder: at least one feature is required");
  if (cfg.scheme == EncodingScheme::block_shift) {
    const auto keys = BlockCodebook::generate(cfg.n, cfg.k, features, BlockKind::binary, cfg.seed);
    key_hot_.reserve(features * cfg.k);
    for (std::size_t f = 0; f < features; ++f) {
      const auto hot = keys.column(f).hot();
      key_hot_.insert(key_hot_.end(), hot.begin(), hot.end());
    }
  } else {
    const auto keys = Codebook::generate(cfg.n, features, DenseKind::bipolar, cfg.seed);
    key_sign_.reserve(features * cfg.n);
    for (std::size_t f = 0; f < features; ++f)
      for (const auto& v : keys.column(f).values()) key_sign_.push_back(v.real() > 0 ? 1 : -1);
  }
}

Accumulator SampleEncoder::accumulate(std::span<const std::uint32_t> feature_levels) const {
  require<DimensionError>(feature_levels.size() == features_, "SampleEncoder: feature count mismatch");
  const std::size_t n = levels_.n();
  std::vector<std::int64_t> acc(n, 0);
  for (std::size_t f = 0; f < features_; ++f)
    require(feature_levels[f] < levels_.levels(), "SampleEncoder: unquantized feature value");
  if (levels_.scheme() == EncodingScheme::block_shift) {
    const std::size_t k = levels_.k(), lb = n / k;
    for (std::size_t f = 0; f < features_; ++f) {
      const std::size_t v = feature_levels[f];
      const std::uint32_t* key = key_hot_.data() + f * k;
      for (std::size_t b = 0; b < k; ++b) {
        const std::size_t value_hot = (v + k - 1 - b) / k;
        ++acc[b * lb + (key[b] + value_hot) % lb];
      }
    }
  } else {
    for (std::size_t f = 0; f < features_; ++f) {
      const std::size_t v = feature_levels[f];
      const std::int8_t* key = key_sign_.data() + f * n;
      for (std::size_t i = 0; i < v; ++i) acc[i] += key[i];
      for (std::size_t i = v; i < n; ++i) acc[i] -= key[i];
    }
  }
  return Accumulator(std::move(acc));
}

Eigen::VectorXd clip_to_real(const Accumulator& acc, std::int64_t kappa) {
  require(kappa >= 0, "clip: kappa must be >= 0");
  require(acc.domain() == Accumulator::Domain::integer, "clip_to_real: integer accumulator expected");
  const auto v = acc.integers();
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(kappa > 0 ? std::clamp(v[i], -kappa, kappa) : v[i]);
  return out;
}

Eigen::VectorXd SampleEncoder::encode(std::span<const std::uint32_t> feature_levels, std::int64_t kappa) const {
  return clip_to_real(accumulate(feature_levels), kappa);
}

// --- ridge ----------------------------------------------------------------------------

namespace {

Eigen::MatrixXd one_hot(const std::vector<std::size_t>& labels, std::size_t classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < classes, "label out of range");
    y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 1.0;
  }
  return y;
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericalError("ridge: factorization failed");
  const auto d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0) || d.minCoeff() <= dmax * 1e-13 * static_cast<double>(a.rows()))
    throw NumericalError("ridge: singular system (increase lambda)");
  Eigen::MatrixXd x = ldlt.solve(b);
  if (!x.allFinite()) throw NumericalError("ridge: non-finite solution");
  return x;
}

std::size_t argmax(const Eigen::Ref<const Eigen::VectorXd>& s) {
  std::size_t best = 0;
  for (Eigen::Index c = 1; c < s.size(); ++c)
    if (s[c] > s[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(c);
  return best;
}

}  // namespace

RidgeModel ridge_train(const Eigen::MatrixXd& h, const std::vector<std::size_t>& labels, std::size_t classes,
                       double lambda) {
  require<DimensionError>(static_cast<std::size_t>(h.rows()) == labels.size(), "ridge: rows(H) != labels");
  require(h.rows() >= 1 && classes >= 1, "ridge: empty problem");
  require(lambda >= 0.0 && std::isfinite(lambda), "ridge: lambda must be finite and >= 0");
  const Eigen::MatrixXd y = one_hot(labels, classes);
  RidgeModel m;
  m.lambda = lambda;
  if (h.cols() <= h.rows()) {
    Eigen::MatrixXd a = h.transpose() * h;
    a.diagonal().array() += lambda;
    m.w = solve_spd(a, h.transpose() * y).transpose();
  } else {
    Eigen::MatrixXd a = h * h.transpose();
    a.diagonal().array() += lambda;
    m.w = (h.transpose() * solve_spd(a, y)).transpose();
  }
  return m;
}

std::size_t ridge_predict(const RidgeModel& model, const Eigen::VectorXd& h) {
  require<DimensionError>(h.size() == model.w.cols(), "ridge_predict: dimension mismatch");
  const Eigen::VectorXd s = model.w * h;
  return argmax(s);
}

std::vector<std::size_t> ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& h) {
  require<DimensionError>(h.cols() == model.w.cols(), "ridge_predict: dimension mismatch");
  const Eigen::MatrixXd s = h * model.w.transpose();
  std::vector<std::size_t> out(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index i = 0; i < h.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax(s.row(i).transpose());
  return out;
}

// --- evaluation -------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::size_t>& labels, std::size_t classes,
                                                       std::size_t folds, std::uint64_t seed) {
  require(folds >= 2, "folds must be >= 2");
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < classes, "label out of range");
    by_class[labels[i]].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    auto& idx = by_class[c];
    require(idx.size() >= folds, "class " + std::to_string(c) + " has fewer samples (" + std::to_string(idx.size()) +
                                     ") than folds (" + std::to_string(folds) + ")");
    Rng rng(child_seed(seed, c));
    std::shuffle(idx.begin(), idx.end(), rng);
    // Continue dealing where the previous class stopped so fold sizes stay balanced.
    for (const auto i : idx) out[next++ % folds].push_back(i);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

namespace {

struct FoldSplit {
  std::vector<std::size_t> train, test;
};

std::vector<FoldSplit> make_splits(const Dataset& data, std::size_t folds, std::uint64_t seed) {
  const auto parts = stratified_folds(data.labels, data.classes(), folds, seed);
  std::vector<FoldSplit> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    out[f].test = parts[f];
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) out[f].train.insert(out[f].train.end(), parts[g].begin(), parts[g].end());
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

// Integer pre-clip hidden matrix for every sample, normalised by `z`.
std::vector<Accumulator> accumulate_all(const Dataset& data, const Normalizer& z, const SampleEncoder& enc) {
  std::vector<Accumulator> out;
  out.reserve(data.samples());
  const std::size_t levels = enc.levels().levels();
  for (std::size_t i = 0; i < data.samples(); ++i) {
    const auto q = z.quantize(data.features.row(static_cast<Eigen::Index>(i)).transpose(), levels);
    out.push_back(enc.accumulate(q));
  }
  return out;
}

Eigen::MatrixXd hidden_rows(const std::vector<Accumulator>& acc, const std::vector<std::size_t>& rows,
                            std::int64_t kappa) {
  Eigen::MatrixXd h(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(acc.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    h.row(static_cast<Eigen::Index>(i)) = clip_to_real(acc[rows[i]], kappa).transpose();
  return h;
}

std::vector<std::size_t> pick(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = labels[rows[i]];
  return out;
}

void summarize(CvReport& r) {
  const double n = static_cast<double>(r.fold_accuracy.size());
  r.mean = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / n;
  double ss = 0.0;
  for (const auto a : r.fold_accuracy) ss += (a - r.mean) * (a - r.mean);
  r.std = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
}

}  // namespace

CvReport cross_validate(const Dataset& data, const PipelineConfig& cfg, std::size_t threads) {
  const auto splits = make_splits(data, cfg.folds, cfg.seed);
  const SampleEncoder enc(cfg, static_cast<std::size_t>(data.features.cols()));
  CvReport report;
  report.fold_accuracy.assign(cfg.folds, 0.0);
  parallel_for(cfg.folds, threads, [&](std::size_t f) {
    const auto& s = splits[f];
    const auto z = Normalizer::fit(data.features, s.train);
    const auto acc = accumulate_all(data, z, enc);
    const auto model = ridge_train(hidden_rows(acc, s.train, cfg.kappa), pick(data.labels, s.train),
                                   data.classes(), cfg.lambda);
    const auto pred = ridge_predict(model, hidden_rows(acc, s.test, cfg.kappa));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[s.test[i]];
    report.fold_accuracy[f] = static_cast<double>(hits) / static_cast<double>(s.test.size());
  });
  summarize(report);
  return report;
}

namespace {

std::vector<double> lambda_powers() {
  std::vector<double> out;
  for (int e = -10; e <= 5; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

}  // namespace

GridSpec GridSpec::dense_default() {
  GridSpec g;
  g.scheme = EncodingScheme::thermometric;
  for (std::size_t n = 50; n <= 1500; n += 50) g.shapes.emplace_back(n, 1);
  g.lambdas = lambda_powers();
  return g;
}

GridSpec GridSpec::sparse_default() {
  GridSpec g;
  g.scheme = EncodingScheme::block_shift;
  for (const std::size_t k : {16, 32, 64, 128})
    for (std::size_t ratio = 4; ratio <= 32; ratio *= 2) g.shapes.emplace_back(k * ratio, k);
  g.lambdas = lambda_powers();
  return g;
}

GridResult grid_search(const Dataset& data, const GridSpec& grid, std::size_t folds, std::uint64_t seed,
                       std::size_t threads) {
  require(!grid.shapes.empty() && !grid.kappas.empty() && !grid.lambdas.empty(), "grid_search: empty grid");
  const auto splits = make_splits(data, folds, seed);
  const std::size_t n_shape = grid.shapes.size(), n_kappa = grid.kappas.size(), n_lambda = grid.lambdas.size();
  const std::size_t classes = data.classes();
  // accuracy[((shape * n_kappa + kappa) * n_lambda + lambda) * folds + fold]
  std::vector<double> accuracy(n_shape * n_kappa * n_lambda * folds, 0.0);

  std::vector<Normalizer> norms;
  for (const auto& s : splits) norms.push_back(Normalizer::fit(data.features, s.train));

  parallel_for(n_shape * folds, threads, [&](std::size_t task) {
    const std::size_t si = task / folds, f = task % folds;
    PipelineConfig cfg;
    cfg.scheme = grid.scheme;
    cfg.n = grid.shapes[si].first;
    cfg.k = grid.shapes[si].second;
    cfg.seed = seed;
    const SampleEncoder enc(cfg, static_cast<std::size_t>(data.features.cols()));
    const auto acc = accumulate_all(data, norms[f], enc);
    const auto& s = splits[f];
    const Eigen::MatrixXd y = one_hot(pick(data.labels, s.train), classes);
    for (std::size_t ki = 0; ki < n_kappa; ++ki) {
      const Eigen::MatrixXd htr = hidden_rows(acc, s.train, grid.kappas[ki]);
      const Eigen::MatrixXd hte = hidden_rows(acc, s.test, grid.kappas[ki]);
      // Scores for every lambda are A diag(1 / (d + lambda)) B.
      Eigen::MatrixXd a, b;
      Eigen::VectorXd d;
      if (htr.cols() <= htr.rows()) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(htr.transpose() * htr);
        d = es.eigenvalues();
        a = hte * es.eigenvectors();
        b = es.eigenvectors().transpose() * (htr.transpose() * y);
      } else {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(htr * htr.transpose());
        d = es.eigenvalues();
        a = (hte * htr.transpose()) * es.eigenvectors();
        b = es.eigenvectors().transpose() * y;
      }
      d = d.cwiseMax(0.0);
      for (std::size_t li = 0; li < n_lambda; ++li) {
        const Eigen::VectorXd inv = (d.array() + grid.lambdas[li]).inverse().matrix();
        const Eigen::MatrixXd scores = a * inv.asDiagonal() * b;
        std::size_t hits = 0;
        for (Eigen::Index i = 0; i < scores.rows(); ++i)
          hits += argmax(scores.row(i).transpose()) == data.labels[s.test[static_cast<std::size_t>(i)]];
        accuracy[((si * n_kappa + ki) * n_lambda + li) * folds + f] =
            static_cast<double>(hits) / static_cast<double>(s.test.size());
      }
    }
  });

  GridResult result;
  for (std::size_t si = 0; si < n_shape; ++si)
    for (std::size_t ki = 0; ki < n_kappa; ++ki)
      for (std::size_t li = 0; li < n_lambda; ++li) {
        GridEntry e;
        e.config.scheme = grid.scheme;
        e.config.n = grid.shapes[si].first;
        e.config.k = grid.shapes[si].second;
        e.config.kappa = grid.kappas[ki];
        e.config.lambda = grid.lambdas[li];
        e.config.folds = folds;
        e.config.seed = seed;
        const auto base = accuracy.begin() + static_cast<std::ptrdiff_t>(((si * n_kappa + ki) * n_lambda + li) * folds);
        e.report.fold_accuracy.assign(base, base + static_cast<std::ptrdiff_t>(folds));
        summarize(e.report);
        result.entries.push_back(std::move(e));
      }
  auto key = [](const GridEntry& e) {
    return std::make_tuple(-e.report.mean, e.config.n, e.config.lambda, e.config.kappa, e.config.k);
  };
  result.best = *std::min_element(result.entries.begin(), result.entries.end(),
                                  [&](const GridEntry& x, const GridEntry& y) { return key(x) < key(y); });
  return result;
}

// --- trained pipeline --------------------------------------------------------------

TrainedClassifier train_classifier(const Dataset& data, const PipelineConfig& cfg) {
  TrainedClassifier clf;
  clf.config = cfg;
  clf.normalizer = Normalizer::fit(data.features);
  clf.class_names = data.class_names;
  clf.feature_names = data.feature_names;
  const SampleEncoder enc(cfg, static_cast<std::size_t>(data.features.cols()));
  const auto acc = accumulate_all(data, clf.normalizer, enc);
  std::vector<std::size_t> rows(data.samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  clf.model = ridge_train(hidden_rows(acc, rows, cfg.kappa), data.labels, data.classes(), cfg.lambda);
  return clf;
}

std::vector<std::size_t> classify(const TrainedClassifier& clf, const Eigen::MatrixXd& features) {
  require<DimensionError>(static_cast<std::size_t>(features.cols()) == clf.feature_names.size(),
                          "classify: feature count mismatch");
  const SampleEncoder enc(clf.config, clf.feature_names.size());
  const std::size_t levels = enc.levels().levels();
  std::vector<std::size_t> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const auto q = clf.normalizer.quantize(features.row(i).transpose(), levels);
    out[static_cast<std::size_t>(i)] = ridge_predict(clf.model, enc.encode(q, clf.config.kappa));
  }
  return out;
}

double evaluate(const TrainedClassifier& clf, const Dataset& data) {
  const auto pred = classify(clf, data.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += clf.class_names.at(pred[i]) == data.class_names[data.labels[i]];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::string save_classifier(const TrainedClassifier& clf) {
  nlohmann::ordered_json j;
  const auto& c = clf.config;
  j["config"] = {{"N", c.n},         {"K", c.k},         {"kappa", c.kappa}, {"lambda", c.lambda},
                 {"scheme", c.scheme == EncodingScheme::block_shift ? "block-shift" : "thermometric"},
                 {"folds", c.folds}, {"seed", c.seed}};
  j["classes"] = clf.class_names;
  j["features"] = clf.feature_names;
  j["min"] = std::vector<double>(clf.normalizer.lo.data(), clf.normalizer.lo.data() + clf.normalizer.lo.size());
  j["max"] = std::vector<double>(clf.normalizer.hi.data(), clf.normalizer.hi.data() + clf.normalizer.hi.size());
  auto& w = j["w"] = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < clf.model.w.rows(); ++r) {
    const Eigen::VectorXd row = clf.model.w.row(r).transpose();
    w.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  return j.dump(1);
}

TrainedClassifier load_classifier(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    TrainedClassifier clf;
    const auto& c = j.at("config");
    clf.config.n = c.at("N").get<std::size_t>();
    clf.config.k = c.at("K").get<std::size_t>();
    clf.config.kappa = c.at("kappa").get<std::int64_t>();
    clf.config.lambda = c.at("lambda").get<double>();
    const auto scheme = c.at("scheme").get<std::string>();
    require<ConfigError>(scheme == "block-shift" || scheme == "thermometric", "unknown scheme '" + scheme + "'");
    clf.config.scheme = scheme == "block-shift" ? EncodingScheme::block_shift : EncodingScheme::thermometric;
    clf.config.folds = c.at("folds").get<std::size_t>();
    clf.config.seed = c.at("seed").get<std::uint64_t>();
    clf.class_names = j.at("classes").get<std::vector<std::string>>();
    clf.feature_names = j.at("features").get<std::vector<std::string>>();
    const auto lo = j.at("min").get<std::vector<double>>();
    const auto hi = j.at("max").get<std::vector<double>>();
    require<ConfigError>(lo.size() == clf.feature_names.size() && hi.size() == lo.size(), "min/max size mismatch");
    clf.normalizer.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    clf.normalizer.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    const auto w = j.at("w").get<std::vector<std::vector<double>>>();
    require<ConfigError>(w.size() == clf.class_names.size(), "weight rows != classes");
    clf.model.lambda = clf.config.lambda;
    clf.model.w.resize(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(clf.config.n));
    for (std::size_t r = 0; r < w.size(); ++r) {
      require<ConfigError>(w[r].size() == clf.config.n, "weight row length != N");
      for (std::size_t i = 0; i < w[r].size(); ++i)
        clf.model.w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = w[r][i];
    }
    return clf;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("classifier file: ") + e.what());
  }
}

}  // namespace vsa
