#include "vsa/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vsa/error.hpp"

namespace vsa {

using detail::require;

namespace {

void check_phasor(const cplx& v, const char* what) {
  require(std::abs(std::abs(v) - 1.0) <= kPhasorTolerance,
          std::string(what) + ": component is not unit magnitude");
}

void check_len(std::size_t a, std::size_t b, const char* what) {
  require<DimensionError>(a == b, std::string(what) + ": length mismatch (" + std::to_string(a) +
                                      " vs " + std::to_string(b) + ")");
}

}  // namespace

// --- DenseVector -------------------------------------------------------------

DenseVector::DenseVector(DenseKind kind, std::vector<cplx> values)
    : kind_(kind), values_(std::move(values)) {
  require(!values_.empty(), "DenseVector: length must be >= 1");
  for (const auto& v : values_) {
    if (kind_ == DenseKind::bipolar) {
      require(v.imag() == 0.0 && (v.real() == 1.0 || v.real() == -1.0),
              "DenseVector: bipolar component must be +-1");
    } else {
      check_phasor(v, "DenseVector");
    }
  }
}

DenseVector DenseVector::from_signs(std::span<const int> signs) {
  std::vector<cplx> v(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) v[i] = signs[i] >= 0 ? 1.0 : -1.0;
  return DenseVector(DenseKind::bipolar, std::move(v));
}

// --- SparseVector ------------------------------------------------------------

SparseVector::SparseVector(std::size_t dimension, SparseKind kind, std::vector<SparseEntry> entries)
    : dimension_(dimension), kind_(kind), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    require(entries_[i].index < dimension_, "SparseVector: index out of range");
    require(i == 0 || entries_[i].index != entries_[i - 1].index,
            "SparseVector: duplicate index");
    const cplx& v = entries_[i].value;
    switch (kind_) {
      case SparseKind::binary:
        require(v == cplx(1.0, 0.0), "SparseVector: binary value must be 1");
        break;
      case SparseKind::phasor:
        check_phasor(v, "SparseVector");
        break;
      case SparseKind::real:
        require(v.imag() == 0.0 && std::isfinite(v.real()), "SparseVector: value must be real");
        break;
    }
  }
}

SparseVector SparseVector::from_dense(std::span<const cplx> values, SparseKind kind, double tol) {
  std::vector<SparseEntry> e;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double mag = std::abs(values[i]);
    if (mag <= tol) continue;
    cplx v = values[i];
    if (kind == SparseKind::binary) v = 1.0;
    else if (kind == SparseKind::phasor) v /= mag;
    else v = v.real();
    e.push_back({static_cast<std::uint32_t>(i), v});
  }
  return SparseVector(values.size(), kind, std::move(e));
}

std::vector<cplx> SparseVector::to_dense() const {
  std::vector<cplx> out(dimension_);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

// --- BlockCode ---------------------------------------------------------------

BlockCode::BlockCode(std::size_t n_blocks, std::size_t block_size, std::vector<std::uint32_t> hot)
    : kind_(BlockKind::binary), block_size_(block_size), hot_(std::move(hot)) {
  require(n_blocks >= 1 && block_size >= 1, "BlockCode: empty shape");
  require<DimensionError>(hot_.size() == n_blocks, "BlockCode: need one hot index per block");
  for (auto h : hot_) require(h < block_size_, "BlockCode: hot index outside block");
}

BlockCode::BlockCode(std::size_t n_blocks, std::size_t block_size, std::vector<std::uint32_t> hot,
                     std::vector<cplx> phases)
    : BlockCode(n_blocks, block_size, std::move(hot)) {
  require<DimensionError>(phases.size() == n_blocks, "BlockCode: need one phase per block");
  for (const auto& p : phases) check_phasor(p, "BlockCode");
  kind_ = BlockKind::phasor;
  phases_ = std::move(phases);
}

BlockCode BlockCode::from_dense(std::span<const cplx> values, std::size_t n_blocks, BlockKind kind) {
  require(n_blocks >= 1 && values.size() % n_blocks == 0, "BlockCode: K must divide N");
  const std::size_t lb = values.size() / n_blocks;
  std::vector<std::uint32_t> hot(n_blocks);
  std::vector<cplx> phases(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    int found = 0;
    for (std::size_t j = 0; j < lb; ++j) {
      const cplx v = values[b * lb + j];
      if (v == cplx(0.0, 0.0)) continue;
      ++found;
      hot[b] = static_cast<std::uint32_t>(j);
      phases[b] = v;
    }
    require(found == 1, "BlockCode: block " + std::to_string(b) + " must have exactly one active component");
  }
  if (kind == BlockKind::binary) {
    for (const auto& p : phases) require(p == cplx(1.0, 0.0), "BlockCode: binary value must be 1");
    return BlockCode(n_blocks, lb, std::move(hot));
  }
  return BlockCode(n_blocks, lb, std::move(hot), std::move(phases));
}

BlockCode BlockCode::identity(std::size_t n_blocks, std::size_t block_size, BlockKind kind) {
  std::vector<std::uint32_t> hot(n_blocks, 0);
  if (kind == BlockKind::binary) return BlockCode(n_blocks, block_size, std::move(hot));
  return BlockCode(n_blocks, block_size, std::move(hot), std::vector<cplx>(n_blocks, 1.0));
}

std::vector<cplx> BlockCode::to_dense() const {
  std::vector<cplx> out(dimension());
  for (std::size_t b = 0; b < hot_.size(); ++b) out[position(b)] = phase(b);
  return out;
}

SparseVector BlockCode::to_sparse() const {
  std::vector<SparseEntry> e(hot_.size());
  for (std::size_t b = 0; b < hot_.size(); ++b)
    e[b] = {static_cast<std::uint32_t>(position(b)), phase(b)};
  return SparseVector(dimension(), kind_ == BlockKind::binary ? SparseKind::binary : SparseKind::phasor,
                      std::move(e));
}

// --- Accumulator -------------------------------------------------------------

Accumulator::Accumulator(std::size_t n, Domain domain) {
  if (domain == Domain::integer) data_ = Ints(n, 0);
  else data_ = Cplx(n);
}

Accumulator::Accumulator(std::vector<std::int64_t> values) : data_(std::move(values)) {}
Accumulator::Accumulator(std::vector<cplx> values) : data_(std::move(values)) {}

std::size_t Accumulator::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

std::span<const std::int64_t> Accumulator::integers() const {
  require(domain() == Domain::integer, "Accumulator: not an integer accumulator");
  return std::get<Ints>(data_);
}

std::span<const cplx> Accumulator::complexes() const {
  require(domain() == Domain::complex, "Accumulator: not a complex accumulator");
  return std::get<Cplx>(data_);
}

cplx Accumulator::at(std::size_t i) const {
  if (const auto* p = std::get_if<Ints>(&data_)) return static_cast<double>((*p)[i]);
  return std::get<Cplx>(data_)[i];
}

std::vector<cplx> Accumulator::to_complex() const {
  if (const auto* p = std::get_if<Cplx>(&data_)) return *p;
  const auto& ints = std::get<Ints>(data_);
  return std::vector<cplx>(ints.begin(), ints.end());
}

void Accumulator::promote() {
  if (domain() == Domain::complex) return;
  data_ = to_complex();
}

Accumulator& Accumulator::add(const DenseVector& v) {
  check_len(size(), v.size(), "Accumulator::add");
  if (v.kind() == DenseKind::bipolar) {
    if (auto* p = std::get_if<Ints>(&data_)) {
      for (std::size_t i = 0; i < v.size(); ++i) (*p)[i] += v[i].real() > 0 ? 1 : -1;
      return *this;
    }
  }
  promote();
  auto& c = std::get<Cplx>(data_);
  for (std::size_t i = 0; i < v.size(); ++i) c[i] += v[i];
  return *this;
}

Accumulator& Accumulator::add(const SparseVector& v) {
  check_len(size(), v.dimension(), "Accumulator::add");
  if (v.kind() == SparseKind::binary) {
    if (auto* p = std::get_if<Ints>(&data_)) {
      for (const auto& e : v.entries()) (*p)[e.index] += 1;
      return *this;
    }
  }
  promote();
  auto& c = std::get<Cplx>(data_);
  for (const auto& e : v.entries()) c[e.index] += e.value;
  return *this;
}

Accumulator& Accumulator::add(const BlockCode& v) {
  check_len(size(), v.dimension(), "Accumulator::add");
  if (v.kind() == BlockKind::binary) {
    if (auto* p = std::get_if<Ints>(&data_)) {
      for (std::size_t b = 0; b < v.n_blocks(); ++b) (*p)[v.position(b)] += 1;
      return *this;
    }
  }
  promote();
  auto& c = std::get<Cplx>(data_);
  for (std::size_t b = 0; b < v.n_blocks(); ++b) c[v.position(b)] += v.phase(b);
  return *this;
}

Accumulator& Accumulator::add(const Accumulator& other) {
  check_len(size(), other.size(), "Accumulator::add");
  if (other.domain() == Domain::integer) {
    if (auto* p = std::get_if<Ints>(&data_)) {
      const auto o = other.integers();
      for (std::size_t i = 0; i < o.size(); ++i) (*p)[i] += o[i];
      return *this;
    }
  }
  promote();
  auto& c = std::get<Cplx>(data_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.at(i);
  return *this;
}

// --- codebooks ---------------------------------------------------------------

Codebook Codebook::generate(std::size_t n, std::size_t m, DenseKind kind, std::uint64_t seed) {
  require(n >= 1, "Codebook: N must be >= 1");
  Codebook cb;
  cb.rows_ = n;
  cb.kind_ = kind;
  cb.seed_ = seed;
  cb.generated_ = true;
  cb.columns_.reserve(m);
  const Rng root(seed);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = root.child(i);
    cb.columns_.push_back(gen_dense(n, kind, r));
  }
  return cb;
}

Codebook::Codebook(std::vector<DenseVector> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "Codebook: no columns");
  rows_ = columns_.front().size();
  kind_ = columns_.front().kind();
  for (const auto& c : columns_) {
    check_len(c.size(), rows_, "Codebook");
    require(c.kind() == kind_, "Codebook: mixed column kinds");
  }
}

BlockCodebook BlockCodebook::generate(std::size_t n, std::size_t k, std::size_t m, BlockKind kind,
                                      std::uint64_t seed) {
  require(k >= 1 && n % k == 0, "BlockCodebook: K must divide N");
  BlockCodebook cb;
  cb.rows_ = n;
  cb.n_blocks_ = k;
  cb.kind_ = kind;
  cb.seed_ = seed;
  cb.generated_ = true;
  cb.columns_.reserve(m);
  const Rng root(seed);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = root.child(i);
    cb.columns_.push_back(gen_block_code(n, k, kind, r));
  }
  return cb;
}

BlockCodebook::BlockCodebook(std::vector<BlockCode> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "BlockCodebook: no columns");
  rows_ = columns_.front().dimension();
  n_blocks_ = columns_.front().n_blocks();
  kind_ = columns_.front().kind();
  for (const auto& c : columns_) {
    require<DimensionError>(c.dimension() == rows_ && c.n_blocks() == n_blocks_,
                            "BlockCodebook: shape mismatch");
    require(c.kind() == kind_, "BlockCodebook: mixed column kinds");
  }
}

// --- generators --------------------------------------------------------------

DenseVector gen_dense(std::size_t n, DenseKind kind, Rng& rng) {
  require(n >= 1, "gen_dense: N must be >= 1");
  std::vector<cplx> v(n);
  for (auto& x : v) x = kind == DenseKind::bipolar ? cplx(rng.sign(), 0.0) : rng.phasor();
  return DenseVector(kind, std::move(v));
}

DenseVector gen_dense(std::size_t n, DenseKind kind, std::uint64_t seed) {
  Rng rng(seed);
  return gen_dense(n, kind, rng);
}

SparseVector gen_sparse(std::size_t m, std::size_t k, SparseKind kind, Rng& rng) {
  require(k <= m, "gen_sparse: K must not exceed M");
  // Floyd's algorithm: uniform K-subset in O(K) draws.
  std::vector<std::uint32_t> support;
  support.reserve(k);
  for (std::size_t j = m - k; j < m; ++j) {
    auto t = static_cast<std::uint32_t>(rng.below(j + 1));
    if (std::find(support.begin(), support.end(), t) != support.end()) t = static_cast<std::uint32_t>(j);
    support.push_back(t);
  }
  std::sort(support.begin(), support.end());
  std::vector<SparseEntry> e(k);
  for (std::size_t i = 0; i < k; ++i) {
    cplx v = 1.0;
    if (kind == SparseKind::phasor) v = rng.phasor();
    else if (kind == SparseKind::real) v = rng.normal();
    e[i] = {support[i], v};
  }
  return SparseVector(m, kind, std::move(e));
}

SparseVector gen_sparse(std::size_t m, std::size_t k, SparseKind kind, std::uint64_t seed) {
  Rng rng(seed);
  return gen_sparse(m, k, kind, rng);
}

BlockCode gen_block_code(std::size_t n, std::size_t k, BlockKind kind, Rng& rng) {
  require(k >= 1 && n >= k && n % k == 0, "gen_block_code: K must divide N");
  const std::size_t lb = n / k;
  std::vector<std::uint32_t> hot(k);
  for (auto& h : hot) h = static_cast<std::uint32_t>(rng.below(lb));
  if (kind == BlockKind::binary) return BlockCode(k, lb, std::move(hot));
  std::vector<cplx> phases(k);
  for (auto& p : phases) p = rng.phasor();
  return BlockCode(k, lb, std::move(hot), std::move(phases));
}

BlockCode gen_block_code(std::size_t n, std::size_t k, BlockKind kind, std::uint64_t seed) {
  Rng rng(seed);
  return gen_block_code(n, k, kind, rng);
}

// --- similarity --------------------------------------------------------------

double similarity(std::span<const cplx> u, std::span<const cplx> v, Norm norm) {
  check_len(u.size(), v.size(), "similarity");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += (u[i] * std::conj(v[i])).real();
    nu += std::norm(u[i]);
    nv += std::norm(v[i]);
  }
  if (norm == Norm::raw) return dot;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / std::sqrt(nu * nv);
}

double similarity(const DenseVector& u, const DenseVector& v, Norm norm) {
  return similarity(u.values(), v.values(), norm);
}

double similarity(const SparseVector& u, const SparseVector& v, Norm norm) {
  check_len(u.dimension(), v.dimension(), "similarity");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  auto a = u.entries();
  auto b = v.entries();
  for (const auto& e : a) nu += std::norm(e.value);
  for (const auto& e : b) nv += std::norm(e.value);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) ++i;
    else if (b[j].index < a[i].index) ++j;
    else {
      dot += (a[i].value * std::conj(b[j].value)).real();
      ++i;
      ++j;
    }
  }
  if (norm == Norm::raw) return dot;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / std::sqrt(nu * nv);
}

double similarity(const BlockCode& u, const BlockCode& v, Norm norm) {
  require<DimensionError>(u.dimension() == v.dimension() && u.n_blocks() == v.n_blocks(),
                          "similarity: block-code shape mismatch");
  double dot = 0.0;
  for (std::size_t b = 0; b < u.n_blocks(); ++b)
    if (u.hot()[b] == v.hot()[b]) dot += (u.phase(b) * std::conj(v.phase(b))).real();
  return norm == Norm::raw ? dot : dot / static_cast<double>(u.n_blocks());
}

// --- superposition and normalisation ----------------------------------------

namespace {

template <class V, class LenFn>
Accumulator superpose_impl(std::span<const V> vs, LenFn len, bool integer) {
  require(!vs.empty(), "superpose: empty input list");
  Accumulator acc(len(vs.front()), integer ? Accumulator::Domain::integer : Accumulator::Domain::complex);
  for (const auto& v : vs) acc.add(v);
  return acc;
}

}  // namespace

Accumulator superpose(std::span<const DenseVector> vs) {
  const bool integer = !vs.empty() && std::all_of(vs.begin(), vs.end(), [](const DenseVector& v) {
    return v.kind() == DenseKind::bipolar;
  });
  return superpose_impl(vs, [](const DenseVector& v) { return v.size(); }, integer);
}

Accumulator superpose(std::span<const SparseVector> vs) {
  const bool integer = !vs.empty() && std::all_of(vs.begin(), vs.end(), [](const SparseVector& v) {
    return v.kind() == SparseKind::binary;
  });
  return superpose_impl(vs, [](const SparseVector& v) { return v.dimension(); }, integer);
}

Accumulator superpose(std::span<const BlockCode> vs) {
  const bool integer = !vs.empty() && std::all_of(vs.begin(), vs.end(), [](const BlockCode& v) {
    return v.kind() == BlockKind::binary;
  });
  return superpose_impl(vs, [](const BlockCode& v) { return v.dimension(); }, integer);
}

SparseVector normalize_topk(const Accumulator& acc, std::size_t k) {
  const std::size_t n = acc.size();
  require(k <= n, "normalize_topk: K exceeds dimension");
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(acc.at(i));
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return mag[a] > mag[b]; });
  idx.resize(k);
  const bool integer = acc.domain() == Accumulator::Domain::integer;
  std::vector<SparseEntry> e;
  e.reserve(k);
  for (auto i : idx) {
    if (integer || mag[i] == 0.0) e.push_back({i, 1.0});
    else e.push_back({i, acc.at(i) / mag[i]});
  }
  return SparseVector(n, integer ? SparseKind::binary : SparseKind::phasor, std::move(e));
}

BlockCode normalize_blockwise(const Accumulator& acc, std::size_t n_blocks) {
  const std::size_t n = acc.size();
  require(n_blocks >= 1 && n % n_blocks == 0, "normalize_blockwise: K must divide N");
  const std::size_t lb = n / n_blocks;
  std::vector<std::uint32_t> hot(n_blocks);
  std::vector<cplx> phases(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    double best = -1.0;
    for (std::size_t j = 0; j < lb; ++j) {
      const double m = std::abs(acc.at(b * lb + j));
      if (m > best) {
        best = m;
        hot[b] = static_cast<std::uint32_t>(j);
      }
    }
    const cplx v = acc.at(b * lb + hot[b]);
    phases[b] = best > 0.0 ? v / best : cplx(1.0, 0.0);
  }
  if (acc.domain() == Accumulator::Domain::integer) return BlockCode(n_blocks, lb, std::move(hot));
  return BlockCode(n_blocks, lb, std::move(hot), std::move(phases));
}

DenseVector sign(const Accumulator& acc) {
  std::vector<cplx> v(acc.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = acc.at(i).real() < 0.0 ? -1.0 : 1.0;
  return DenseVector(DenseKind::bipolar, std::move(v));
}

// --- cleanup -----------------------------------------------------------------

CleanupResult cleanup(std::span<const cplx> query, const Codebook& codebook) {
  require(codebook.cols() > 0, "cleanup: empty codebook");
  CleanupResult best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < codebook.cols(); ++i) {
    const double s = similarity(query, codebook.column(i).values());
    if (s > best.score) best = {i, s};
  }
  return best;
}

std::vector<double> block_scores(std::span<const cplx> query, const BlockCodebook& codebook) {
  check_len(query.size(), codebook.rows(), "block_scores");
  std::vector<double> scores(codebook.cols());
  for (std::size_t i = 0; i < codebook.cols(); ++i) {
    const BlockCode& c = codebook.column(i);
    double s = 0.0;
    for (std::size_t b = 0; b < c.n_blocks(); ++b)
      s += (query[c.position(b)] * std::conj(c.phase(b))).real();
    scores[i] = s;
  }
  return scores;
}

CleanupResult cleanup(std::span<const cplx> query, const BlockCodebook& codebook) {
  require(codebook.cols() > 0, "cleanup: empty codebook");
  const auto scores = block_scores(query, codebook);
  // Every column has norm sqrt(K), so the argmax of raw scores is the argmax
  // of normalised similarity.
  double qn = 0.0;
  for (const auto& q : query) qn += std::norm(q);
  const double scale = qn > 0.0 ? 1.0 / std::sqrt(qn * static_cast<double>(codebook.n_blocks())) : 0.0;
  CleanupResult best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > best.score) best = {i, scores[i]};
  best.score *= scale;
  return best;
}

CleanupResult cleanup(const Accumulator& query, const BlockCodebook& codebook) {
  const auto q = query.to_complex();
  return cleanup(std::span<const cplx>(q), codebook);
}

// --- entropy -----------------------------------------------------------------

double block_code_entropy_bits(std::size_t n, std::size_t k) {
  require(k >= 1 && n % k == 0, "block_code_entropy_bits: K must divide N");
  return static_cast<double>(k) * std::log2(static_cast<double>(n) / static_cast<double>(k));
}

double sparse_code_entropy_bits(std::size_t n, std::size_t k) {
  require(k <= n, "sparse_code_entropy_bits: K exceeds N");
  const double ln = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                    std::lgamma(static_cast<double>(n - k) + 1);
  return ln / std::log(2.0);
}

}  // namespace vsa
