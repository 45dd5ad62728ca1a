#pragma once

// Compressed sensing over VSA codebooks: compression, readout, lasso
// recovery, box-dot dictionaries, empirical RIP and spark checks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vsa/core.hpp"

namespace vsa {

/// Column-addressable N x M matrix. Columns may be materialised or computed
/// on demand.
class Dictionary {
 public:
  virtual ~Dictionary() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual bool is_real() const = 0;
  /// Writes column j into `out` (length rows()).
  virtual void column(std::size_t j, std::span<cplx> out) const = 0;

  std::vector<cplx> column(std::size_t j) const;
  /// sum_j a_j D_j over the support of `a` only.
  std::vector<cplx> compress(const SparseVector& a) const;
  /// Dense rows() x cols() copy.
  Eigen::MatrixXcd materialize() const;
};

enum class MatrixKind { bipolar, phasor, real };

/// Materialised sampling matrix Xi. Real kinds are stored as real doubles.
class SamplingMatrix final : public Dictionary {
 public:
  /// Column j is gen_dense(N, kind, child_seed(seed, j)), i.e. the same as
  /// Codebook::generate. `scaled` divides every entry by sqrt(N).
  static SamplingMatrix generate(std::size_t n, std::size_t m, DenseKind kind, std::uint64_t seed,
                                 bool scaled = false);
  static SamplingMatrix from_codebook(const Codebook& cb, bool scaled = false);
  explicit SamplingMatrix(Eigen::MatrixXd values, MatrixKind kind = MatrixKind::real);
  explicit SamplingMatrix(Eigen::MatrixXcd values);

  std::size_t rows() const override { return static_cast<std::size_t>(is_real() ? real_.rows() : complex_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(is_real() ? real_.cols() : complex_.cols()); }
  bool is_real() const override { return kind_ != MatrixKind::phasor; }
  void column(std::size_t j, std::span<cplx> out) const override;
  using Dictionary::column;

  MatrixKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool scaled() const noexcept { return scaled_; }
  /// Throws unless is_real().
  const Eigen::MatrixXd& real_matrix() const;
  Eigen::MatrixXcd complex_matrix() const;

 private:
  MatrixKind kind_ = MatrixKind::real;
  std::uint64_t seed_ = 0;
  bool scaled_ = false;
  Eigen::MatrixXd real_;
  Eigen::MatrixXcd complex_;
};

/// Lazy box-dot dictionary of pairwise Hadamard products.
///
/// tensor:        column l * M_psi + k  = Phi_l ⊙ Psi_k      (N x M_phi M_psi)
/// concatenation: column j * M_phi + i  = Phi_i ⊙ key_j      (N x M_phi L)
class BoxDot final : public Dictionary {
 public:
  enum class Layout { tensor, concatenation };

  BoxDot(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> psi,
         Layout layout = Layout::tensor);

  std::size_t rows() const override { return phi_->rows(); }
  std::size_t cols() const override { return phi_->cols() * psi_->cols(); }
  bool is_real() const override { return phi_->is_real() && psi_->is_real(); }
  void column(std::size_t j, std::span<cplx> out) const override;
  using Dictionary::column;

  Layout layout() const noexcept { return layout_; }
  const Dictionary& phi() const noexcept { return *phi_; }
  const Dictionary& psi() const noexcept { return *psi_; }
  /// Column index of the pair (phi column, psi column).
  std::size_t index(std::size_t phi_col, std::size_t psi_col) const;

 private:
  std::shared_ptr<const Dictionary> phi_, psi_;
  Layout layout_;
};

BoxDot boxdot(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> psi);
BoxDot boxdot_concat(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> keys);

// --- compression and readout -------------------------------------------------

std::vector<cplx> compress(const Dictionary& xi, const SparseVector& a);
/// a_hat_i = Phi_i^H x / N.
std::vector<cplx> vsa_readout(const Dictionary& phi, std::span<const cplx> x);

// --- lasso -----------------------------------------------------------------------

struct LassoConfig {
  double lambda = 0.0;
  std::size_t max_iterations = 5000;
  double tolerance = 1e-8;  ///< on relative objective decrease
  bool nonnegative = false;
  bool refit = false;       ///< least-squares refit on the recovered support
  bool record_objective = false;
};

struct LassoResult {
  Eigen::VectorXd coefficients;
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double lipschitz = 0.0;
  std::vector<double> objective_trace;  ///< filled when record_objective
};

/// argmin_a 0.5 ||x - Xi a||^2 + lambda ||a||_1 by monotone FISTA with step
/// 1/L, L = ||Xi||_2^2 from 50 power iterations. Real dictionaries only.
/// Non-convergence is reported in the result, not thrown.
LassoResult lasso_solve(const Eigen::MatrixXd& xi, const Eigen::VectorXd& x, const LassoConfig& config);
LassoResult lasso_solve(const SamplingMatrix& xi, std::span<const cplx> x, const LassoConfig& config);

/// Largest squared singular value by power iteration.
double power_iteration_norm2(const Eigen::MatrixXd& a, std::size_t iterations = 50);

/// The 13-point log grid 1e-4 ... 1 used for relative lambda selection.
std::vector<double> lambda_grid();

// --- RIP ---------------------------------------------------------------------

/// Shape of the sparse test vectors pushed through a dictionary.
enum class RipDistribution {
  iid_support,       ///< s uniformly placed nonzeros over all columns
  outer_product,     ///< vec(a b^T), a and b K-sparse; needs a tensor BoxDot
  outer_difference,  ///< vec(a b^T - c d^T)
  concatenation,     ///< L stacked K-sparse blocks; needs a concatenation BoxDot
};

enum class RipValues { gaussian, ones };

struct RipProbe {
  RipDistribution distribution = RipDistribution::iid_support;
  std::size_t k = 5;        ///< per-factor sparsity
  std::size_t s = 0;        ///< total sparsity for iid_support (0 = k)
  RipValues values = RipValues::gaussian;
};

struct RipEstimate {
  double delta = 0.0;       ///< max |‖D v‖² / ‖v‖² - 1| with unit-norm columns
  std::size_t s = 0;        ///< largest support size probed
  std::size_t trials = 0;
};

/// Draws one test vector for `d` under `probe`.
SparseVector draw_rip_vector(const Dictionary& d, const RipProbe& probe, Rng& rng);

/// Columns are rescaled to unit norm (1/sqrt(N) for +-1 and phasor entries)
/// before the ratio is taken. Trial t uses child_seed(seed, t), so a longer
/// run extends a shorter one and delta never decreases with trials.
RipEstimate estimate_rip(const Dictionary& d, const RipProbe& probe, std::size_t trials, std::uint64_t seed);

/// Max of estimate_rip over `ensemble` dictionaries make(child_seed(seed, e)).
RipEstimate estimate_rip_ensemble(const std::function<std::shared_ptr<const Dictionary>(std::uint64_t)>& make,
                                  const RipProbe& probe, std::size_t trials, std::size_t ensemble,
                                  std::uint64_t seed);

// --- spark witness -----------------------------------------------------------

struct SparkReport {
  std::size_t support_size = 0;          ///< 2K + 1
  double min_sigma_phi = 0.0;            ///< smallest sigma found over Phi column subsets
  std::vector<std::size_t> best_support; ///< the Phi columns achieving it
  double min_sigma_boxdot = 0.0;         ///< same subset bound to a cardinal key, recomputed
  std::size_t max_column_l0 = 0;         ///< largest per-column L0 of outer-product differences
  std::size_t searched = 0;
};

/// Searches for near-null (2K+1)-column subsets of Phi by random supports and
/// by OMP from every starting column, rebuilds the best subset inside Phi ⊡ Psi
/// with a single key column, and checks the per-column support bound on
/// differences of K-sparse outer products.
SparkReport spark_witness(const SamplingMatrix& phi, const SamplingMatrix& psi, std::size_t k,
                          std::size_t trials, std::uint64_t seed);

}  // namespace vsa
