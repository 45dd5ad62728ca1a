#include "vsa/binding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

#include "vsa/error.hpp"

namespace vsa {

using detail::require;

namespace {

void check_len(std::size_t a, std::size_t b, const char* what) {
  require<DimensionError>(a == b, std::string(what) + ": length mismatch (" + std::to_string(a) +
                                      " vs " + std::to_string(b) + ")");
}

// kissfft caches twiddles per instance, so each thread keeps its own.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

std::vector<cplx> fwd(std::span<const cplx> x) {
  std::vector<cplx> in(x.begin(), x.end()), out;
  fft_engine().fwd(out, in);
  return out;
}

std::vector<cplx> inv(const std::vector<cplx>& x) {
  std::vector<cplx> out;
  fft_engine().inv(out, x);
  return out;
}

void check_block_shape(const BlockCode& a, const BlockCode& b, const char* what) {
  require<DimensionError>(a.n_blocks() == b.n_blocks() && a.block_size() == b.block_size(),
                          std::string(what) + ": block-code shape mismatch");
}

std::size_t block_size_of(const Accumulator& a, std::size_t n_blocks, const char* what) {
  require(n_blocks >= 1 && a.size() % n_blocks == 0, std::string(what) + ": K must divide N");
  return a.size() / n_blocks;
}

}  // namespace

// --- Hadamard ----------------------------------------------------------------

std::vector<cplx> hadamard(std::span<const cplx> x, std::span<const cplx> y) {
  check_len(x.size(), y.size(), "hadamard");
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return out;
}

DenseVector hadamard_bind(const DenseVector& x, const DenseVector& y) {
  check_len(x.size(), y.size(), "hadamard_bind");
  auto v = hadamard(x.values(), y.values());
  if (x.kind() == DenseKind::bipolar && y.kind() == DenseKind::bipolar)
    return DenseVector(DenseKind::bipolar, std::move(v));
  for (auto& c : v) c /= std::abs(c);  // remove rounding drift
  return DenseVector(DenseKind::phasor, std::move(v));
}

Accumulator hadamard_bind(const Accumulator& acc, const DenseVector& key) {
  check_len(acc.size(), key.size(), "hadamard_bind");
  if (acc.domain() == Accumulator::Domain::integer && key.kind() == DenseKind::bipolar) {
    auto in = acc.integers();
    std::vector<std::int64_t> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = key[i].real() > 0 ? in[i] : -in[i];
    return Accumulator(std::move(out));
  }
  std::vector<cplx> out(acc.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc.at(i) * key[i];
  return Accumulator(std::move(out));
}

Accumulator hadamard_unbind(const Accumulator& acc, const DenseVector& key) {
  if (key.kind() == DenseKind::bipolar) return hadamard_bind(acc, key);
  std::vector<cplx> conj_key(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) conj_key[i] = std::conj(key[i]);
  return hadamard_bind(acc, DenseVector(DenseKind::phasor, std::move(conj_key)));
}

// --- circular convolution ----------------------------------------------------

std::vector<cplx> circular_convolve(std::span<const cplx> x, std::span<const cplx> y) {
  check_len(x.size(), y.size(), "circular_convolve");
  require(!x.empty(), "circular_convolve: empty input");
  auto fx = fwd(x);
  const auto fy = fwd(y);
  for (std::size_t i = 0; i < fx.size(); ++i) fx[i] *= fy[i];
  return inv(fx);
}

std::vector<cplx> circular_correlate(std::span<const cplx> x, std::span<const cplx> y) {
  check_len(x.size(), y.size(), "circular_correlate");
  require(!x.empty(), "circular_correlate: empty input");
  auto fx = fwd(x);
  const auto fy = fwd(y);
  for (std::size_t i = 0; i < fx.size(); ++i) fx[i] = std::conj(fx[i]) * fy[i];
  return inv(fx);
}

// --- LCC -----------------------------------------------------------------------

BlockCode lcc_bind(const BlockCode& a, const BlockCode& b) {
  check_block_shape(a, b, "lcc_bind");
  const std::size_t k = a.n_blocks(), lb = a.block_size();
  std::vector<std::uint32_t> hot(k);
  for (std::size_t i = 0; i < k; ++i) hot[i] = static_cast<std::uint32_t>((a.hot()[i] + b.hot()[i]) % lb);
  if (a.kind() == BlockKind::binary && b.kind() == BlockKind::binary) return BlockCode(k, lb, std::move(hot));
  std::vector<cplx> ph(k);
  for (std::size_t i = 0; i < k; ++i) {
    ph[i] = a.phase(i) * b.phase(i);
    ph[i] /= std::abs(ph[i]);
  }
  return BlockCode(k, lb, std::move(hot), std::move(ph));
}

BlockCode lcc_inverse(const BlockCode& a) {
  const std::size_t k = a.n_blocks(), lb = a.block_size();
  std::vector<std::uint32_t> hot(k);
  for (std::size_t i = 0; i < k; ++i) hot[i] = static_cast<std::uint32_t>((lb - a.hot()[i]) % lb);
  if (a.kind() == BlockKind::binary) return BlockCode(k, lb, std::move(hot));
  std::vector<cplx> ph(k);
  for (std::size_t i = 0; i < k; ++i) ph[i] = std::conj(a.phase(i));
  return BlockCode(k, lb, std::move(hot), std::move(ph));
}

BlockCode lcc_unbind(const BlockCode& c, const BlockCode& a) { return lcc_bind(c, lcc_inverse(a)); }

Accumulator lcc_bind(const Accumulator& a, const Accumulator& b, std::size_t n_blocks) {
  check_len(a.size(), b.size(), "lcc_bind");
  const std::size_t lb = block_size_of(a, n_blocks, "lcc_bind");
  const auto av = a.to_complex();
  const auto bv = b.to_complex();
  std::vector<cplx> out(a.size());
  std::span<const cplx> as(av), bs(bv);
  for (std::size_t blk = 0; blk < n_blocks; ++blk) {
    auto fa = fwd(as.subspan(blk * lb, lb));
    const auto fb = fwd(bs.subspan(blk * lb, lb));
    for (std::size_t j = 0; j < lb; ++j) fa[j] *= fb[j];
    const auto r = inv(fa);
    std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(blk * lb));
  }
  if (a.domain() == Accumulator::Domain::integer && b.domain() == Accumulator::Domain::integer) {
    std::vector<std::int64_t> ints(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) ints[i] = std::llround(out[i].real());
    return Accumulator(std::move(ints));
  }
  return Accumulator(std::move(out));
}

Accumulator lcc_bind(const Accumulator& a, const BlockCode& b) {
  check_len(a.size(), b.dimension(), "lcc_bind");
  const std::size_t lb = b.block_size();
  if (a.domain() == Accumulator::Domain::integer && b.kind() == BlockKind::binary) {
    auto in = a.integers();
    std::vector<std::int64_t> out(in.size());
    for (std::size_t blk = 0; blk < b.n_blocks(); ++blk) {
      const std::size_t base = blk * lb, shift = b.hot()[blk];
      for (std::size_t j = 0; j < lb; ++j) out[base + (j + shift) % lb] = in[base + j];
    }
    return Accumulator(std::move(out));
  }
  std::vector<cplx> out(a.size());
  for (std::size_t blk = 0; blk < b.n_blocks(); ++blk) {
    const std::size_t base = blk * lb, shift = b.hot()[blk];
    const cplx ph = b.phase(blk);
    for (std::size_t j = 0; j < lb; ++j) out[base + (j + shift) % lb] = a.at(base + j) * ph;
  }
  return Accumulator(std::move(out));
}

Accumulator lcc_inverse(const Accumulator& a, std::size_t n_blocks) {
  const std::size_t lb = block_size_of(a, n_blocks, "lcc_inverse");
  if (a.domain() == Accumulator::Domain::integer) {
    auto in = a.integers();
    std::vector<std::int64_t> out(in.size());
    for (std::size_t blk = 0; blk < n_blocks; ++blk)
      for (std::size_t j = 0; j < lb; ++j) out[blk * lb + j] = in[blk * lb + (lb - j) % lb];
    return Accumulator(std::move(out));
  }
  auto in = a.complexes();
  std::vector<cplx> out(in.size());
  for (std::size_t blk = 0; blk < n_blocks; ++blk)
    for (std::size_t j = 0; j < lb; ++j) out[blk * lb + j] = std::conj(in[blk * lb + (lb - j) % lb]);
  return Accumulator(std::move(out));
}

Accumulator lcc_unbind(const Accumulator& c, const BlockCode& a) { return lcc_bind(c, lcc_inverse(a)); }

// --- sampling tensor -----------------------------------------------------------

SamplingTensor SamplingTensor::build(std::size_t n, std::size_t alpha, SamplingMode mode, bool symmetric,
                                     std::uint64_t seed, std::size_t n_blocks) {
  require(n >= 1 && n < (std::size_t{1} << 20), "SamplingTensor: N out of supported range");
  require(alpha >= 1, "SamplingTensor: alpha must be >= 1");
  const std::size_t nn = n * n;
  std::size_t lb = n;
  switch (mode) {
    case SamplingMode::random:
      require(alpha <= nn, "SamplingTensor: alpha exceeds N^2 available slots");
      break;
    case SamplingMode::structured:
      require(alpha <= n, "SamplingTensor: structured alpha exceeds diagonal length N");
      break;
    case SamplingMode::block_diagonal:
      require(n_blocks >= 1 && n % n_blocks == 0, "SamplingTensor: K must divide N");
      lb = n / n_blocks;
      require(alpha <= lb, "SamplingTensor: block-diagonal alpha exceeds block size");
      break;
  }

  SamplingTensor t;
  t.n_ = n;
  t.alpha_ = alpha;
  t.mode_ = mode;
  t.symmetric_ = symmetric;
  t.seed_ = seed;
  t.n_blocks_ = mode == SamplingMode::block_diagonal ? n_blocks : 1;

  const Rng root(seed);
  // Candidate stream for output l: the t-th pair it would like to sample.
  std::vector<std::uint64_t> offset(n);
  {
    Rng r = root.child(0);
    for (auto& o : offset) o = r.below(mode == SamplingMode::block_diagonal ? lb : n);
  }
  auto stream_len = [&](std::size_t) -> std::size_t {
    return mode == SamplingMode::structured ? n : lb;
  };
  auto structured_pair = [&](std::size_t l, std::size_t step) -> SamplingPair {
    if (mode == SamplingMode::structured) {
      const std::size_t i = (offset[l] + step) % n;
      return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>((l + n - i) % n)};
    }
    const std::size_t base = (l / lb) * lb, p = l % lb, q = (offset[l] + step) % lb;
    return {static_cast<std::uint32_t>(base + q), static_cast<std::uint32_t>(base + (p + lb - q) % lb)};
  };

  std::vector<std::vector<SamplingPair>> lists(n);
  if (!symmetric) {
    for (std::size_t l = 0; l < n; ++l) {
      auto& list = lists[l];
      list.reserve(alpha);
      if (mode == SamplingMode::random) {
        Rng r = root.child(l + 1);
        std::unordered_set<std::uint64_t> seen;
        while (list.size() < alpha) {
          const std::uint64_t key = r.below(nn);
          if (!seen.insert(key).second) continue;
          list.push_back({static_cast<std::uint32_t>(key / n), static_cast<std::uint32_t>(key % n)});
        }
      } else {
        for (std::size_t s = 0; s < alpha; ++s) list.push_back(structured_pair(l, s));
      }
    }
  } else {
    std::unordered_set<std::uint64_t> stored;
    auto triple = [nn, n](std::size_t l, std::size_t i, std::size_t j) {
      return static_cast<std::uint64_t>(l) * nn + static_cast<std::uint64_t>(i) * n + j;
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    {
      Rng r = root.child(n + 1);
      std::shuffle(order.begin(), order.end(), r);
    }
    for (std::size_t l : order) {
      Rng r = root.child(l + 1);
      std::size_t step = 0, tries = 0;
      while (lists[l].size() < alpha) {
        SamplingPair c;
        if (mode == SamplingMode::random) {
          const std::uint64_t key = r.below(nn);
          c = {static_cast<std::uint32_t>(key / n), static_cast<std::uint32_t>(key % n)};
          ++tries;
        } else {
          if (step >= stream_len(l)) break;
          c = structured_pair(l, step++);
        }
        if (stored.count(triple(l, c.i, c.j))) continue;
        const std::size_t orbit[3][3] = {{l, c.i, c.j}, {c.i, c.j, l}, {c.j, l, c.i}};
        // Orbits can repeat when indices coincide; count only distinct new entries.
        std::size_t fresh[3] = {0, 0, 0};
        for (int a = 0; a < 3; ++a) {
          bool dup = stored.count(triple(orbit[a][0], orbit[a][1], orbit[a][2])) > 0;
          for (int b = 0; b < a && !dup; ++b)
            dup = orbit[a][0] == orbit[b][0] && orbit[a][1] == orbit[b][1] && orbit[a][2] == orbit[b][2];
          fresh[a] = dup ? 0 : 1;
        }
        if (mode == SamplingMode::random && tries < 50 * alpha) {
          // Reject orbits that would push any output more than 2 past alpha.
          bool over = false;
          for (int a = 0; a < 3; ++a) {
            std::size_t grow = 0;
            for (int b = 0; b < 3; ++b)
              if (orbit[b][0] == orbit[a][0]) grow += fresh[b];
            over = over || lists[orbit[a][0]].size() + grow > alpha + 2;
          }
          if (over) continue;
        }
        tries = 0;
        for (int a = 0; a < 3; ++a) {
          if (!fresh[a]) continue;
          stored.insert(triple(orbit[a][0], orbit[a][1], orbit[a][2]));
          lists[orbit[a][0]].push_back(
              {static_cast<std::uint32_t>(orbit[a][1]), static_cast<std::uint32_t>(orbit[a][2])});
        }
      }
    }
  }
  t.finalize(lists);
  return t;
}

void SamplingTensor::finalize(std::vector<std::vector<SamplingPair>>& lists) {
  offsets_.assign(n_ + 1, 0);
  for (std::size_t l = 0; l < n_; ++l) offsets_[l + 1] = offsets_[l] + lists[l].size();
  pairs_.clear();
  pairs_.reserve(offsets_.back());
  std::vector<std::pair<std::uint64_t, std::uint32_t>> rev;
  rev.reserve(offsets_.back());
  for (std::size_t l = 0; l < n_; ++l) {
    for (const auto& p : lists[l]) {
      pairs_.push_back(p);
      rev.emplace_back(static_cast<std::uint64_t>(p.i) * n_ + p.j, static_cast<std::uint32_t>(l));
    }
  }
  std::sort(rev.begin(), rev.end());
  rev_keys_.clear();
  rev_offsets_.clear();
  rev_outputs_.clear();
  rev_outputs_.reserve(rev.size());
  for (std::size_t i = 0; i < rev.size(); ++i) {
    if (i == 0 || rev[i].first != rev[i - 1].first) {
      rev_keys_.push_back(rev[i].first);
      rev_offsets_.push_back(i);
    }
    rev_outputs_.push_back(rev[i].second);
  }
  rev_offsets_.push_back(rev.size());
}

std::span<const std::uint32_t> SamplingTensor::outputs(std::uint32_t i, std::uint32_t j) const {
  const std::uint64_t key = static_cast<std::uint64_t>(i) * n_ + j;
  auto it = std::lower_bound(rev_keys_.begin(), rev_keys_.end(), key);
  if (it == rev_keys_.end() || *it != key) return {};
  const auto k = static_cast<std::size_t>(it - rev_keys_.begin());
  return {rev_outputs_.data() + rev_offsets_[k], rev_offsets_[k + 1] - rev_offsets_[k]};
}

bool SamplingTensor::contains(std::size_t l, std::uint32_t i, std::uint32_t j) const {
  for (const auto& p : pairs(l))
    if (p.i == i && p.j == j) return true;
  return false;
}

// --- SPTP ----------------------------------------------------------------------

std::vector<cplx> sptp_project(const SamplingTensor& w, const SparseVector& a, const SparseVector& b) {
  const std::size_t n = w.dimension();
  check_len(a.dimension(), n, "sptp");
  check_len(b.dimension(), n, "sptp");
  std::vector<cplx> z(n);
  if (a.nnz() * b.nnz() <= w.entries()) {
    for (const auto& ea : a.entries())
      for (const auto& eb : b.entries()) {
        const cplx v = ea.value * eb.value;
        for (auto l : w.outputs(ea.index, eb.index)) z[l] += v;
      }
    return z;
  }
  const auto ad = a.to_dense();
  const auto bd = b.to_dense();
  for (std::size_t l = 0; l < n; ++l) {
    cplx s = 0.0;
    for (const auto& p : w.pairs(l)) s += ad[p.i] * bd[p.j];
    z[l] = s;
  }
  return z;
}

std::vector<cplx> sptp_unproject(const SamplingTensor& w, std::span<const cplx> c, const SparseVector& b) {
  const std::size_t n = w.dimension();
  check_len(c.size(), n, "sptp_unbind");
  check_len(b.dimension(), n, "sptp_unbind");
  std::vector<std::uint32_t> c_support;
  for (std::size_t l = 0; l < n; ++l)
    if (c[l] != cplx(0.0, 0.0)) c_support.push_back(static_cast<std::uint32_t>(l));
  std::vector<cplx> z(n);
  if (b.nnz() * c_support.size() <= w.entries()) {
    for (const auto& eb : b.entries()) {
      const cplx cb = std::conj(eb.value);
      for (auto l : c_support)
        for (auto i : w.outputs(eb.index, l)) z[i] += cb * c[l];
    }
    return z;
  }
  const auto bd = b.to_dense();
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (const auto& p : w.pairs(i)) s += std::conj(bd[p.i]) * c[p.j];
    z[i] = s;
  }
  return z;
}

namespace {

SparseVector threshold_binary(const std::vector<cplx>& z, unsigned theta) {
  require(theta >= 1, "sptp: binary threshold must be >= 1");
  std::vector<SparseEntry> e;
  for (std::size_t l = 0; l < z.size(); ++l)
    if (z[l].real() >= static_cast<double>(theta) - 0.5) e.push_back({static_cast<std::uint32_t>(l), 1.0});
  return SparseVector(z.size(), SparseKind::binary, std::move(e));
}

SparseVector threshold_phasor(const std::vector<cplx>& z, double big_theta) {
  require(big_theta >= 0.0, "sptp: threshold must be nonnegative");
  std::vector<SparseEntry> e;
  for (std::size_t l = 0; l < z.size(); ++l) {
    const double m = std::abs(z[l]);
    if (m > 0.0 && m >= big_theta - 1e-12) e.push_back({static_cast<std::uint32_t>(l), z[l] / m});
  }
  return SparseVector(z.size(), SparseKind::phasor, std::move(e));
}

}  // namespace

SparseVector sptp_bind(const SparseVector& a, const SparseVector& b, const SamplingTensor& w, unsigned theta) {
  require(a.kind() == SparseKind::binary && b.kind() == SparseKind::binary, "sptp_bind: binary inputs required");
  return threshold_binary(sptp_project(w, a, b), theta);
}

SparseVector sptp_bind_phasor(const SparseVector& a, const SparseVector& b, const SamplingTensor& w,
                              double big_theta) {
  return threshold_phasor(sptp_project(w, a, b), big_theta);
}

SparseVector sptp_unbind(const SparseVector& c, const SparseVector& b, const SamplingTensor& w, unsigned theta) {
  require(c.kind() == SparseKind::binary && b.kind() == SparseKind::binary, "sptp_unbind: binary inputs required");
  const auto cd = c.to_dense();
  return threshold_binary(sptp_unproject(w, cd, b), theta);
}

SparseVector sptp_unbind_phasor(std::span<const cplx> c, const SparseVector& b, const SamplingTensor& w,
                                double big_theta) {
  return threshold_phasor(sptp_unproject(w, c, b), big_theta);
}

FanIn min_fanin(std::size_t n, std::size_t k, unsigned theta) {
  require(k > 0 && k < n, "min_fanin: need 0 < K < N");
  require(theta >= 1, "min_fanin: theta must be >= 1");
  const double q = static_cast<double>(k) / static_cast<double>(n);
  const double p = q * q;
  double exact;
  if (theta == 1) {
    exact = std::log1p(-q) / std::log1p(-p);
  } else {
    // P(d <= theta - 1) for d ~ Binomial(alpha, p), continued to real alpha.
    const double th = theta;
    auto f = [&](double alpha) { return boost::math::ibeta(alpha - th + 1.0, th, 1.0 - p) - (1.0 - q); };
    double lo = th, hi = 2.0 * th;
    while (f(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      require<NumericalError>(hi < 1e15, "min_fanin: root not bracketed");
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    exact = 0.5 * (r.first + r.second);
  }
  const double rounded = std::round(exact);
  const double integer = std::abs(exact - rounded) < 1e-9 ? rounded : std::ceil(exact);
  return {exact, static_cast<std::size_t>(integer)};
}

// --- protected sums ----------------------------------------------------------

Permutation::Permutation(std::vector<std::uint32_t> mapping, std::size_t cached_powers)
    : mapping_(std::move(mapping)) {
  std::vector<bool> hit(mapping_.size(), false);
  for (auto m : mapping_) {
    require(m < mapping_.size() && !hit[m], "Permutation: mapping is not a bijection");
    hit[m] = true;
  }
  std::vector<std::uint32_t> cur(mapping_.size());
  std::iota(cur.begin(), cur.end(), 0u);
  for (std::size_t p = 0; p < cached_powers; ++p) {
    powers_.push_back(cur);
    for (auto& c : cur) c = mapping_[c];
  }
}

Permutation Permutation::random(std::size_t n, std::uint64_t seed, std::size_t cached_powers) {
  std::vector<std::uint32_t> m(n);
  std::iota(m.begin(), m.end(), 0u);
  Rng r(seed);
  std::shuffle(m.begin(), m.end(), r);
  return Permutation(std::move(m), cached_powers);
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::uint32_t> m(n);
  std::iota(m.begin(), m.end(), 0u);
  return Permutation(std::move(m), 1);
}

std::vector<std::uint32_t> Permutation::power_map(std::size_t power) const {
  if (power < powers_.size()) return powers_[power];
  std::size_t start = powers_.empty() ? 0 : powers_.size() - 1;
  std::vector<std::uint32_t> cur;
  if (powers_.empty()) {
    cur.resize(mapping_.size());
    std::iota(cur.begin(), cur.end(), 0u);
  } else {
    cur = powers_.back();
  }
  for (std::size_t p = start; p < power; ++p)
    for (auto& c : cur) c = mapping_[c];
  return cur;
}

std::vector<cplx> Permutation::apply(std::span<const cplx> x, std::size_t power) const {
  check_len(x.size(), mapping_.size(), "Permutation::apply");
  const auto m = power_map(power);
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[m[i]] = x[i];
  return out;
}

DenseVector Permutation::apply(const DenseVector& x, std::size_t power) const {
  return DenseVector(x.kind(), apply(x.values(), power));
}

Accumulator protected_sum(std::span<const DenseVector> vectors, std::span<const DenseVector> keys) {
  require(!vectors.empty(), "protected_sum: empty input list");
  require(keys.size() >= vectors.size(), "protected_sum: key shortage");
  std::vector<DenseVector> bound;
  bound.reserve(vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) bound.push_back(hadamard_bind(keys[j], vectors[j]));
  return superpose(std::span<const DenseVector>(bound));
}

Accumulator permute_protect(std::span<const DenseVector> vectors, const Permutation& p) {
  require(!vectors.empty(), "permute_protect: empty input list");
  std::vector<DenseVector> moved;
  moved.reserve(vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) moved.push_back(p.apply(vectors[j], j));
  return superpose(std::span<const DenseVector>(moved));
}

Accumulator clip(const Accumulator& acc, std::int64_t kappa) {
  require(kappa >= 1, "clip: kappa must be >= 1");
  if (acc.domain() == Accumulator::Domain::integer) {
    auto in = acc.integers();
    std::vector<std::int64_t> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::clamp(in[i], -kappa, kappa);
    return Accumulator(std::move(out));
  }
  auto in = acc.complexes();
  std::vector<cplx> out(in.begin(), in.end());
  const double k = static_cast<double>(kappa);
  for (auto& v : out) {
    const double m = std::abs(v);
    if (m > k) v *= k / m;
  }
  return Accumulator(std::move(out));
}

}  // namespace vsa
