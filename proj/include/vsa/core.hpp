#pragma once

// Vector types shared by every other module: dense bipolar/phasor codes,
// K-sparse codes, block-codes, codebooks, exact accumulators, similarity and
// nearest-neighbour cleanup.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "vsa/rng.hpp"

namespace vsa {

using cplx = std::complex<double>;

enum class DenseKind { bipolar, phasor };
enum class SparseKind { binary, phasor, real };
enum class BlockKind { binary, phasor };

/// Whether a similarity is divided by the vector norms.
enum class Norm { unit, raw };

inline constexpr double kPhasorTolerance = 1e-9;

/// Length-N code with every component either +-1 or a unit phasor.
class DenseVector {
 public:
  DenseVector(DenseKind kind, std::vector<cplx> values);

  static DenseVector from_signs(std::span<const int> signs);

  DenseKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const DenseVector&) const = default;

 private:
  DenseKind kind_;
  std::vector<cplx> values_;
};

struct SparseEntry {
  std::uint32_t index;
  cplx value;
  bool operator==(const SparseEntry&) const = default;
};

/// Support-list representation of a vector with few nonzeros. Entries are
/// kept sorted by index.
class SparseVector {
 public:
  SparseVector(std::size_t dimension, SparseKind kind, std::vector<SparseEntry> entries);

  /// Keeps every component with |v| > tol. Binary kind stores 1 for each.
  static SparseVector from_dense(std::span<const cplx> values, SparseKind kind,
                                 double tol = 0.0);

  std::size_t dimension() const noexcept { return dimension_; }
  SparseKind kind() const noexcept { return kind_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }
  std::vector<cplx> to_dense() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dimension_;
  SparseKind kind_;
  std::vector<SparseEntry> entries_;
};

/// N-dimensional code split into K blocks of N/K components with exactly one
/// active component per block. Binary codes store no phases.
class BlockCode {
 public:
  BlockCode(std::size_t n_blocks, std::size_t block_size, std::vector<std::uint32_t> hot);
  BlockCode(std::size_t n_blocks, std::size_t block_size, std::vector<std::uint32_t> hot,
            std::vector<cplx> phases);

  /// Inverse of to_dense(); throws unless `values` is a valid block-code.
  static BlockCode from_dense(std::span<const cplx> values, std::size_t n_blocks,
                              BlockKind kind);

  /// Code whose hot components all sit at offset 0 with phase 1 (the LCC
  /// identity element).
  static BlockCode identity(std::size_t n_blocks, std::size_t block_size,
                            BlockKind kind = BlockKind::binary);

  BlockKind kind() const noexcept { return kind_; }
  std::size_t n_blocks() const noexcept { return hot_.size(); }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t dimension() const noexcept { return hot_.size() * block_size_; }
  std::span<const std::uint32_t> hot() const noexcept { return hot_; }
  std::span<const cplx> phases() const noexcept { return phases_; }
  cplx phase(std::size_t block) const { return phases_.empty() ? cplx{1.0, 0.0} : phases_[block]; }
  /// Absolute index of the active component of `block`.
  std::size_t position(std::size_t block) const { return block * block_size_ + hot_[block]; }

  std::vector<cplx> to_dense() const;
  SparseVector to_sparse() const;

  bool operator==(const BlockCode&) const = default;

 private:
  BlockKind kind_;
  std::size_t block_size_;
  std::vector<std::uint32_t> hot_;
  std::vector<cplx> phases_;
};

/// Exact running sum of code vectors. Integer domain for binary/bipolar
/// inputs, complex double otherwise. Nothing is normalised until one of the
/// normalize_* functions is called explicitly.
class Accumulator {
 public:
  enum class Domain { integer, complex };

  Accumulator(std::size_t n, Domain domain);
  explicit Accumulator(std::vector<std::int64_t> values);
  explicit Accumulator(std::vector<cplx> values);

  Domain domain() const noexcept { return std::holds_alternative<Ints>(data_) ? Domain::integer : Domain::complex; }
  std::size_t size() const noexcept;
  std::span<const std::int64_t> integers() const;
  std::span<const cplx> complexes() const;
  cplx at(std::size_t i) const;
  std::vector<cplx> to_complex() const;

  Accumulator& add(const DenseVector& v);
  Accumulator& add(const SparseVector& v);
  Accumulator& add(const BlockCode& v);
  Accumulator& add(const Accumulator& other);

  bool operator==(const Accumulator&) const = default;

 private:
  using Ints = std::vector<std::int64_t>;
  using Cplx = std::vector<cplx>;
  void promote();
  std::variant<Ints, Cplx> data_;
};

/// N x M matrix of dense atomic codes, regenerable from (seed, N, M, kind).
class Codebook {
 public:
  static Codebook generate(std::size_t n, std::size_t m, DenseKind kind, std::uint64_t seed);
  explicit Codebook(std::vector<DenseVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  DenseKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool generated() const noexcept { return generated_; }
  const DenseVector& column(std::size_t i) const { return columns_.at(i); }
  std::span<const DenseVector> columns() const noexcept { return columns_; }

 private:
  Codebook() = default;
  std::size_t rows_ = 0;
  DenseKind kind_ = DenseKind::bipolar;
  std::uint64_t seed_ = 0;
  bool generated_ = false;
  std::vector<DenseVector> columns_;
};

/// Codebook of block-codes sharing (N, K).
class BlockCodebook {
 public:
  static BlockCodebook generate(std::size_t n, std::size_t k, std::size_t m, BlockKind kind,
                                std::uint64_t seed);
  explicit BlockCodebook(std::vector<BlockCode> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t n_blocks() const noexcept { return n_blocks_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  BlockKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool generated() const noexcept { return generated_; }
  const BlockCode& column(std::size_t i) const { return columns_.at(i); }
  std::span<const BlockCode> columns() const noexcept { return columns_; }

 private:
  BlockCodebook() = default;
  std::size_t rows_ = 0;
  std::size_t n_blocks_ = 0;
  BlockKind kind_ = BlockKind::binary;
  std::uint64_t seed_ = 0;
  bool generated_ = false;
  std::vector<BlockCode> columns_;
};

// --- generators ------------------------------------------------------------

DenseVector gen_dense(std::size_t n, DenseKind kind, std::uint64_t seed);
DenseVector gen_dense(std::size_t n, DenseKind kind, Rng& rng);

/// Exactly K nonzeros, support uniform over K-subsets of [0, M).
SparseVector gen_sparse(std::size_t m, std::size_t k, SparseKind kind, std::uint64_t seed);
SparseVector gen_sparse(std::size_t m, std::size_t k, SparseKind kind, Rng& rng);

BlockCode gen_block_code(std::size_t n, std::size_t k, BlockKind kind, std::uint64_t seed);
BlockCode gen_block_code(std::size_t n, std::size_t k, BlockKind kind, Rng& rng);

// --- similarity ------------------------------------------------------------

/// Re<u, v> with v conjugated; divided by |u||v| for Norm::unit (0 if either
/// vector is zero).
double similarity(std::span<const cplx> u, std::span<const cplx> v, Norm norm = Norm::unit);
double similarity(const DenseVector& u, const DenseVector& v, Norm norm = Norm::unit);
double similarity(const SparseVector& u, const SparseVector& v, Norm norm = Norm::unit);
double similarity(const BlockCode& u, const BlockCode& v, Norm norm = Norm::unit);

/// Raw overlap; equals the number of shared active components for binary codes.
inline double overlap(const BlockCode& u, const BlockCode& v) { return similarity(u, v, Norm::raw); }

// --- superposition and normalisation --------------------------------------

Accumulator superpose(std::span<const DenseVector> vectors);
Accumulator superpose(std::span<const SparseVector> vectors);
Accumulator superpose(std::span<const BlockCode> vectors);

/// Keeps the K largest-magnitude components (ties: lowest index). Integer
/// accumulators yield binary codes, complex ones phase-normalised phasors.
SparseVector normalize_topk(const Accumulator& acc, std::size_t k);

/// Per-block argmax of magnitude (ties: lowest index).
BlockCode normalize_blockwise(const Accumulator& acc, std::size_t n_blocks);

/// Component-wise sign of the real part, ties mapped to +1.
DenseVector sign(const Accumulator& acc);

// --- cleanup ----------------------------------------------------------------

struct CleanupResult {
  std::size_t index;
  double score;
};

/// Nearest codebook column by unit-normalised similarity, lowest index on ties.
CleanupResult cleanup(std::span<const cplx> query, const Codebook& codebook);
CleanupResult cleanup(std::span<const cplx> query, const BlockCodebook& codebook);
CleanupResult cleanup(const Accumulator& query, const BlockCodebook& codebook);

/// Raw scores of `query` against every block-code column (overlap for binary).
std::vector<double> block_scores(std::span<const cplx> query, const BlockCodebook& codebook);

// --- entropy bookkeeping ---------------------------------------------------

/// K * log2(N / K): bits carried by a K-block code of dimension N.
double block_code_entropy_bits(std::size_t n, std::size_t k);
/// log2 C(N, K): bits carried by an unconstrained K-sparse binary code.
double sparse_code_entropy_bits(std::size_t n, std::size_t k);

}  // namespace vsa
