#pragma once

// Variable binding: Hadamard, circular convolution, local circular
// convolution (LCC) for block-codes, sparsity-preserving tensor projection
// (SPTP), protected sums and clipping.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vsa/core.hpp"

namespace vsa {

// --- Hadamard ----------------------------------------------------------------

DenseVector hadamard_bind(const DenseVector& x, const DenseVector& y);
/// Binding of an accumulator with a dense key; integer accumulators stay
/// integer for bipolar keys.
Accumulator hadamard_bind(const Accumulator& acc, const DenseVector& key);
/// x ⊙ conj(key). Equal to hadamard_bind for bipolar keys.
Accumulator hadamard_unbind(const Accumulator& acc, const DenseVector& key);
std::vector<cplx> hadamard(std::span<const cplx> x, std::span<const cplx> y);

// --- circular convolution ----------------------------------------------------

/// (x * y)_k = sum_i x_{(k-i) mod N} y_i, evaluated by FFT.
std::vector<cplx> circular_convolve(std::span<const cplx> x, std::span<const cplx> y);
/// (x # y)_k = sum_i conj(x_i) y_{(i+k) mod N}; the adjoint of convolving with x.
std::vector<cplx> circular_correlate(std::span<const cplx> x, std::span<const cplx> y);

// --- LCC -----------------------------------------------------------------------

/// Per block: hot index (i_a + i_b) mod Lb, phase product.
BlockCode lcc_bind(const BlockCode& a, const BlockCode& b);
/// Per block: hot index (Lb - i) mod Lb, conjugated phase.
BlockCode lcc_inverse(const BlockCode& a);
/// lcc_bind(c, lcc_inverse(a)).
BlockCode lcc_unbind(const BlockCode& c, const BlockCode& a);

/// Dense per-block circular convolution of two accumulators via per-block FFT.
/// If both inputs are integer the result is rounded back to integers.
Accumulator lcc_bind(const Accumulator& a, const Accumulator& b, std::size_t n_blocks);
/// Accumulator bound with a block-code: an exact per-block cyclic shift.
Accumulator lcc_bind(const Accumulator& a, const BlockCode& b);
/// Per-block spectral conjugate, i.e. x'_j = conj(x_{(-j) mod Lb}). Agrees with
/// the block-code inverse on clean codes.
Accumulator lcc_inverse(const Accumulator& a, std::size_t n_blocks);
Accumulator lcc_unbind(const Accumulator& c, const BlockCode& a);

// --- sampling tensors and SPTP -----------------------------------------------

enum class SamplingMode { random, structured, block_diagonal };

struct SamplingPair {
  std::uint32_t i;
  std::uint32_t j;
  bool operator==(const SamplingPair&) const = default;
};

/// Sparse binary third-order tensor W^l_{ij}, stored as per-output pair lists
/// plus a reverse index from (i, j) to the outputs it feeds.
///
/// random:         alpha distinct (i, j) pairs per output, uniform over N^2.
/// structured:     output l takes alpha consecutive pairs (i, (l - i) mod N)
///                 along its anti-diagonal, starting at a seeded offset; alpha = N
///                 reproduces circular convolution exactly.
/// block_diagonal: as structured but confined to the output's block; alpha =
///                 block size reproduces LCC on dense blocks.
///
/// With `symmetric`, every stored (l; i, j) also stores (i; j, l) and
/// (j; l, i). Outputs then reach fan-in alpha and may overshoot by up to 2.
class SamplingTensor {
 public:
  static SamplingTensor build(std::size_t n, std::size_t alpha, SamplingMode mode, bool symmetric,
                              std::uint64_t seed, std::size_t n_blocks = 1);

  std::size_t dimension() const noexcept { return n_; }
  std::size_t alpha() const noexcept { return alpha_; }
  SamplingMode mode() const noexcept { return mode_; }
  bool symmetric() const noexcept { return symmetric_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n_blocks() const noexcept { return n_blocks_; }

  std::span<const SamplingPair> pairs(std::size_t l) const {
    return {pairs_.data() + offsets_[l], offsets_[l + 1] - offsets_[l]};
  }
  std::size_t fan_in(std::size_t l) const { return offsets_[l + 1] - offsets_[l]; }
  std::size_t entries() const noexcept { return pairs_.size(); }
  /// Outputs l with (i, j) in W^l.
  std::span<const std::uint32_t> outputs(std::uint32_t i, std::uint32_t j) const;
  bool contains(std::size_t l, std::uint32_t i, std::uint32_t j) const;

 private:
  SamplingTensor() = default;
  void finalize(std::vector<std::vector<SamplingPair>>& lists);

  std::size_t n_ = 0;
  std::size_t alpha_ = 0;
  SamplingMode mode_ = SamplingMode::random;
  bool symmetric_ = false;
  std::uint64_t seed_ = 0;
  std::size_t n_blocks_ = 1;
  std::vector<std::size_t> offsets_;
  std::vector<SamplingPair> pairs_;
  // Reverse index sorted by key = i * N + j.
  std::vector<std::uint64_t> rev_keys_;
  std::vector<std::size_t> rev_offsets_;
  std::vector<std::uint32_t> rev_outputs_;
};

/// z_l = sum_{(i,j) in W^l} a_i b_j, dense length N.
std::vector<cplx> sptp_project(const SamplingTensor& w, const SparseVector& a, const SparseVector& b);
/// z_i = sum_{(j,l) in W^i} conj(b_j) c_l, dense length N.
std::vector<cplx> sptp_unproject(const SamplingTensor& w, std::span<const cplx> c, const SparseVector& b);

/// Binary SPTP: output_l = 1 iff the coincidence count is >= theta.
SparseVector sptp_bind(const SparseVector& a, const SparseVector& b, const SamplingTensor& w,
                       unsigned theta = 1);
/// Phasor SPTP: output_l = z_l / |z_l| if |z_l| >= big_theta, else 0.
SparseVector sptp_bind_phasor(const SparseVector& a, const SparseVector& b, const SamplingTensor& w,
                              double big_theta = 1.0);
SparseVector sptp_unbind(const SparseVector& c, const SparseVector& b, const SamplingTensor& w,
                         unsigned theta = 1);
/// `c` may be any complex vector, e.g. a superposition of bound pairs.
SparseVector sptp_unbind_phasor(std::span<const cplx> c, const SparseVector& b,
                                const SamplingTensor& w, double big_theta = 1.0);

struct FanIn {
  double exact;
  std::size_t integer;
};

/// Smallest alpha with P(Binomial(alpha, K^2/N^2) < theta) <= 1 - K/N, so an
/// output is active with probability K/N. theta = 1 has the closed form
/// ln(1 - K/N) / ln(1 - K^2/N^2).
FanIn min_fanin(std::size_t n, std::size_t k, unsigned theta = 1);

// --- protected sums ----------------------------------------------------------

/// Length-N permutation; apply(x, p) applies the p-th power.
class Permutation {
 public:
  explicit Permutation(std::vector<std::uint32_t> mapping, std::size_t cached_powers = 8);
  static Permutation random(std::size_t n, std::uint64_t seed, std::size_t cached_powers = 8);
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return mapping_.size(); }
  std::span<const std::uint32_t> mapping() const noexcept { return mapping_; }
  /// out[power-th image of i] = x[i].
  std::vector<cplx> apply(std::span<const cplx> x, std::size_t power = 1) const;
  DenseVector apply(const DenseVector& x, std::size_t power = 1) const;

 private:
  std::vector<std::uint32_t> power_map(std::size_t power) const;
  std::vector<std::uint32_t> mapping_;
  std::vector<std::vector<std::uint32_t>> powers_;
};

/// sum_j keys_j ⊙ x_j.
Accumulator protected_sum(std::span<const DenseVector> vectors, std::span<const DenseVector> keys);
/// sum_j P^j x_j for j = 0..L-1.
Accumulator permute_protect(std::span<const DenseVector> vectors, const Permutation& p);

/// Component-wise clamp to [-kappa, kappa]. Integer accumulators clamp their
/// values, complex ones clamp the magnitude and keep the phase.
Accumulator clip(const Accumulator& acc, std::int64_t kappa);

}  // namespace vsa
