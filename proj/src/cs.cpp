#include "vsa/cs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "vsa/error.hpp"

namespace vsa {

using detail::require;

// --- Dictionary ----------------------------------------------------------------

std::vector<cplx> Dictionary::column(std::size_t j) const {
  std::vector<cplx> out(rows());
  column(j, out);
  return out;
}

std::vector<cplx> Dictionary::compress(const SparseVector& a) const {
  require<DimensionError>(a.dimension() == cols(), "compress: dictionary has " + std::to_string(cols()) +
                                                       " columns, vector has dimension " +
                                                       std::to_string(a.dimension()));
  std::vector<cplx> out(rows()), col(rows());
  for (const auto& e : a.entries()) {
    column(e.index, col);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += e.value * col[r];
  }
  return out;
}

Eigen::MatrixXcd Dictionary::materialize() const {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  std::vector<cplx> col(rows());
  for (std::size_t j = 0; j < cols(); ++j) {
    column(j, col);
    for (std::size_t r = 0; r < col.size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = col[r];
  }
  return m;
}

// --- SamplingMatrix --------------------------------------------------------------

SamplingMatrix SamplingMatrix::generate(std::size_t n, std::size_t m, DenseKind kind, std::uint64_t seed,
                                        bool scaled) {
  auto s = from_codebook(Codebook::generate(n, m, kind, seed), scaled);
  s.seed_ = seed;
  return s;
}

SamplingMatrix SamplingMatrix::from_codebook(const Codebook& cb, bool scaled) {
  const auto n = static_cast<Eigen::Index>(cb.rows()), m = static_cast<Eigen::Index>(cb.cols());
  const double f = scaled ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  SamplingMatrix out = [&] {
    if (cb.kind() == DenseKind::bipolar) {
      Eigen::MatrixXd v(n, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) v(i, j) = cb.column(static_cast<std::size_t>(j))[static_cast<std::size_t>(i)].real() * f;
      return SamplingMatrix(std::move(v), MatrixKind::bipolar);
    }
    Eigen::MatrixXcd v(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) v(i, j) = cb.column(static_cast<std::size_t>(j))[static_cast<std::size_t>(i)] * f;
    return SamplingMatrix(std::move(v));
  }();
  out.seed_ = cb.seed();
  out.scaled_ = scaled;
  return out;
}

SamplingMatrix::SamplingMatrix(Eigen::MatrixXd values, MatrixKind kind) : kind_(kind), real_(std::move(values)) {
  require(kind != MatrixKind::phasor, "SamplingMatrix: real storage cannot hold phasor kind");
  require(real_.size() > 0, "SamplingMatrix: empty matrix");
}

SamplingMatrix::SamplingMatrix(Eigen::MatrixXcd values) : kind_(MatrixKind::phasor), complex_(std::move(values)) {
  require(complex_.size() > 0, "SamplingMatrix: empty matrix");
}

void SamplingMatrix::column(std::size_t j, std::span<cplx> out) const {
  require<DimensionError>(j < cols() && out.size() == rows(), "SamplingMatrix::column: bad index or buffer");
  const auto jj = static_cast<Eigen::Index>(j);
  if (is_real())
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = real_(static_cast<Eigen::Index>(r), jj);
  else
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = complex_(static_cast<Eigen::Index>(r), jj);
}

const Eigen::MatrixXd& SamplingMatrix::real_matrix() const {
  require(is_real(), "SamplingMatrix: matrix is complex");
  return real_;
}

Eigen::MatrixXcd SamplingMatrix::complex_matrix() const {
  if (is_real()) return real_.cast<cplx>();
  return complex_;
}

// --- BoxDot ------------------------------------------------------------------------

BoxDot::BoxDot(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> psi, Layout layout)
    : phi_(std::move(phi)), psi_(std::move(psi)), layout_(layout) {
  require(phi_ && psi_, "boxdot: null operand");
  require<DimensionError>(phi_->rows() == psi_->rows(), "boxdot: row counts differ");
}

std::size_t BoxDot::index(std::size_t phi_col, std::size_t psi_col) const {
  return layout_ == Layout::tensor ? phi_col * psi_->cols() + psi_col : psi_col * phi_->cols() + phi_col;
}

void BoxDot::column(std::size_t j, std::span<cplx> out) const {
  require<DimensionError>(j < cols() && out.size() == rows(), "BoxDot::column: bad index or buffer");
  std::size_t l, k;
  if (layout_ == Layout::tensor) {
    l = j / psi_->cols();
    k = j % psi_->cols();
  } else {
    k = j / phi_->cols();
    l = j % phi_->cols();
  }
  std::vector<cplx> b(rows());
  phi_->column(l, out);
  psi_->column(k, b);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] *= b[r];
}

BoxDot boxdot(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> psi) {
  return BoxDot(std::move(phi), std::move(psi), BoxDot::Layout::tensor);
}

BoxDot boxdot_concat(std::shared_ptr<const Dictionary> phi, std::shared_ptr<const Dictionary> keys) {
  return BoxDot(std::move(phi), std::move(keys), BoxDot::Layout::concatenation);
}

// --- compression and readout -------------------------------------------------

std::vector<cplx> compress(const Dictionary& xi, const SparseVector& a) { return xi.compress(a); }

std::vector<cplx> vsa_readout(const Dictionary& phi, std::span<const cplx> x) {
  require<DimensionError>(x.size() == phi.rows(), "vsa_readout: length mismatch");
  const double n = static_cast<double>(phi.rows());
  std::vector<cplx> out(phi.cols()), col(phi.rows());
  for (std::size_t j = 0; j < phi.cols(); ++j) {
    phi.column(j, col);
    cplx s = 0.0;
    for (std::size_t r = 0; r < col.size(); ++r) s += std::conj(col[r]) * x[r];
    out[j] = s / n;
  }
  return out;
}

// --- lasso -----------------------------------------------------------------------

double power_iteration_norm2(const Eigen::MatrixXd& a, std::size_t iterations) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  double est = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    est = w.norm();
    if (est == 0.0) return 0.0;
    v = w / est;
  }
  return est;
}

std::vector<double> lambda_grid() {
  std::vector<double> g(13);
  for (int i = 0; i < 13; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -4.0 + i / 3.0);
  return g;
}

namespace {

double lasso_objective(const Eigen::MatrixXd& xi, const Eigen::VectorXd& x, const Eigen::VectorXd& a, double lambda) {
  return 0.5 * (x - xi * a).squaredNorm() + lambda * a.lpNorm<1>();
}

}  // namespace

LassoResult lasso_solve(const Eigen::MatrixXd& xi, const Eigen::VectorXd& x, const LassoConfig& cfg) {
  require<DimensionError>(xi.rows() == x.size(), "lasso_solve: rows(Xi) != length(x)");
  require(cfg.lambda >= 0.0 && std::isfinite(cfg.lambda), "lasso_solve: lambda must be >= 0");
  require(cfg.tolerance > 0.0, "lasso_solve: tolerance must be > 0");
  require(cfg.max_iterations >= 1, "lasso_solve: max_iterations must be >= 1");

  LassoResult res;
  // Power iteration approaches L from below; a 1% margin keeps 1/L a valid step.
  const double lip = 1.01 * power_iteration_norm2(xi, 50);
  res.lipschitz = lip;
  const Eigen::Index m = xi.cols();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  if (lip == 0.0) {
    res.coefficients = a;
    res.converged = true;
    res.objective = 0.5 * x.squaredNorm();
    return res;
  }
  const Eigen::VectorXd xtx = xi.transpose() * x;
  const double thr = cfg.lambda / lip;
  auto prox = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double s = cfg.nonnegative ? std::max(0.0, v(i) - thr)
                                       : std::copysign(std::max(0.0, std::abs(v(i)) - thr), v(i));
      out(i) = s;
    }
    return out;
  };

  Eigen::VectorXd y = a, prev = a;
  double t = 1.0;
  double f = lasso_objective(xi, x, a, cfg.lambda);
  if (cfg.record_objective) res.objective_trace.push_back(f);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    // Gradient of the smooth part: Xi^T (Xi y - x).
    const Eigen::VectorXd grad = xi.transpose() * (xi * y) - xtx;
    const Eigen::VectorXd z = prox(y - grad / lip);
    const double fz = lasso_objective(xi, x, z, cfg.lambda);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    prev = a;
    const double f_prev = f;
    const bool accept = fz <= f;
    if (accept) {
      a = z;
      f = fz;
    }
    y = a + (t / t_next) * (z - a) + ((t - 1.0) / t_next) * (a - prev);
    t = t_next;
    res.iterations = it;
    if (cfg.record_objective) res.objective_trace.push_back(f);
    if (!std::isfinite(f)) break;
    if (accept && (f_prev - f) <= cfg.tolerance * std::max(f_prev, 1e-300)) {
      res.converged = true;
      break;
    }
  }

  if (cfg.refit) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < m; ++i)
      if (a(i) != 0.0) support.push_back(i);
    if (!support.empty() && support.size() <= static_cast<std::size_t>(xi.rows())) {
      Eigen::MatrixXd sub(xi.rows(), static_cast<Eigen::Index>(support.size()));
      for (std::size_t c = 0; c < support.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = xi.col(support[c]);
      const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(x);
      for (std::size_t c = 0; c < support.size(); ++c) a(support[c]) = coef(static_cast<Eigen::Index>(c));
      f = lasso_objective(xi, x, a, cfg.lambda);
    }
  }
  res.coefficients = a;
  res.objective = f;
  return res;
}

LassoResult lasso_solve(const SamplingMatrix& xi, std::span<const cplx> x, const LassoConfig& config) {
  require(xi.is_real(), "lasso_solve: complex dictionaries are not supported");
  Eigen::VectorXd xv(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i].imag() == 0.0, "lasso_solve: measurement must be real");
    xv(static_cast<Eigen::Index>(i)) = x[i].real();
  }
  return lasso_solve(xi.real_matrix(), xv, config);
}

// --- RIP ---------------------------------------------------------------------

namespace {

double draw_value(RipValues values, Rng& rng) { return values == RipValues::ones ? 1.0 : rng.normal(); }

std::vector<std::pair<std::uint32_t, double>> draw_factor(std::size_t m, std::size_t k, RipValues values, Rng& rng) {
  const auto s = gen_sparse(m, k, SparseKind::binary, rng);
  std::vector<std::pair<std::uint32_t, double>> out;
  for (const auto& e : s.entries()) out.emplace_back(e.index, draw_value(values, rng));
  return out;
}

const BoxDot& need_boxdot(const Dictionary& d, BoxDot::Layout layout, const char* what) {
  const auto* b = dynamic_cast<const BoxDot*>(&d);
  require(b != nullptr && b->layout() == layout,
          std::string("RIP: ") + what + " test vectors need a matching box-dot dictionary");
  return *b;
}

}  // namespace

SparseVector draw_rip_vector(const Dictionary& d, const RipProbe& probe, Rng& rng) {
  std::map<std::uint32_t, double> coef;
  switch (probe.distribution) {
    case RipDistribution::iid_support: {
      const std::size_t s = probe.s ? probe.s : probe.k;
      require(s <= d.cols(), "estimate_rip: sparsity exceeds number of columns");
      for (auto& [i, v] : draw_factor(d.cols(), s, probe.values, rng)) coef[i] = v;
      break;
    }
    case RipDistribution::outer_product:
    case RipDistribution::outer_difference: {
      const auto& b = need_boxdot(d, BoxDot::Layout::tensor, "outer-product");
      const int terms = probe.distribution == RipDistribution::outer_product ? 1 : 2;
      for (int t = 0; t < terms; ++t) {
        const double sgn = t == 0 ? 1.0 : -1.0;
        const auto fa = draw_factor(b.phi().cols(), probe.k, probe.values, rng);
        const auto fb = draw_factor(b.psi().cols(), probe.k, probe.values, rng);
        for (const auto& [i, u] : fa)
          for (const auto& [j, w] : fb) coef[static_cast<std::uint32_t>(b.index(i, j))] += sgn * u * w;
      }
      break;
    }
    case RipDistribution::concatenation: {
      const auto& b = need_boxdot(d, BoxDot::Layout::concatenation, "concatenation");
      for (std::size_t j = 0; j < b.psi().cols(); ++j)
        for (const auto& [i, u] : draw_factor(b.phi().cols(), probe.k, probe.values, rng))
          coef[static_cast<std::uint32_t>(b.index(i, j))] = u;
      break;
    }
  }
  std::vector<SparseEntry> e;
  for (const auto& [i, v] : coef)
    if (v != 0.0) e.push_back({i, v});
  return SparseVector(d.cols(), SparseKind::real, std::move(e));
}

RipEstimate estimate_rip(const Dictionary& d, const RipProbe& probe, std::size_t trials, std::uint64_t seed) {
  require(d.cols() >= 1, "estimate_rip: empty dictionary");
  if (probe.distribution == RipDistribution::iid_support)
    require((probe.s ? probe.s : probe.k) <= d.cols(), "estimate_rip: sparsity exceeds number of columns");
  const auto c0 = d.column(0);
  double scale = 0.0;
  for (const auto& v : c0) scale += std::norm(v);
  require<NumericalError>(scale > 0.0, "estimate_rip: zero column");

  RipEstimate est;
  est.trials = trials;
  const Rng root(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng r = root.child(t);
    const auto v = draw_rip_vector(d, probe, r);
    if (v.nnz() == 0) continue;
    double vn = 0.0;
    for (const auto& e : v.entries()) vn += std::norm(e.value);
    const auto y = d.compress(v);
    double yn = 0.0;
    for (const auto& c : y) yn += std::norm(c);
    est.delta = std::max(est.delta, std::abs(yn / (scale * vn) - 1.0));
    est.s = std::max(est.s, v.nnz());
  }
  return est;
}

RipEstimate estimate_rip_ensemble(const std::function<std::shared_ptr<const Dictionary>(std::uint64_t)>& make,
                                  const RipProbe& probe, std::size_t trials, std::size_t ensemble,
                                  std::uint64_t seed) {
  require(ensemble >= 1, "estimate_rip_ensemble: ensemble must be >= 1");
  RipEstimate out;
  for (std::size_t e = 0; e < ensemble; ++e) {
    const auto d = make(child_seed(seed, e));
    const auto r = estimate_rip(*d, probe, trials, child_seed(seed ^ 0x5bd1e995ULL, e));
    out.delta = std::max(out.delta, r.delta);
    out.s = std::max(out.s, r.s);
    out.trials += r.trials;
  }
  return out;
}

// --- spark witness -----------------------------------------------------------

namespace {

double min_sigma(const Eigen::MatrixXcd& cols) {
  if (cols.cols() > cols.rows()) return 0.0;
  Eigen::MatrixXcd m = cols;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double nrm = m.col(j).norm();
    if (nrm > 0.0) m.col(j) /= nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

Eigen::MatrixXcd gather(const Eigen::MatrixXcd& a, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXcd out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = a.col(static_cast<Eigen::Index>(idx[c]));
  return out;
}

// OMP approximation of column `start` by `steps` other columns.
std::vector<std::size_t> omp_support(const Eigen::MatrixXcd& a, std::size_t start, std::size_t steps) {
  const Eigen::VectorXcd y = a.col(static_cast<Eigen::Index>(start));
  Eigen::VectorXcd r = y;
  std::vector<std::size_t> chosen;
  std::vector<double> norms(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) norms[static_cast<std::size_t>(j)] = a.col(j).norm();
  for (std::size_t s = 0; s < steps; ++s) {
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < norms.size(); ++j) {
      if (j == start || norms[j] == 0.0 || std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      const double c = std::abs(a.col(static_cast<Eigen::Index>(j)).dot(r)) / norms[j];
      if (c > best) {
        best = c;
        pick = j;
      }
    }
    if (best < 0.0) break;
    chosen.push_back(pick);
    const Eigen::MatrixXcd sub = gather(a, chosen);
    const Eigen::VectorXcd coef = sub.colPivHouseholderQr().solve(y);
    r = y - sub * coef;
  }
  chosen.push_back(start);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

SparkReport spark_witness(const SamplingMatrix& phi, const SamplingMatrix& psi, std::size_t k, std::size_t trials,
                          std::uint64_t seed) {
  require(k >= 1, "spark_witness: K must be >= 1");
  require<DimensionError>(phi.rows() == psi.rows(), "spark_witness: row counts differ");
  const std::size_t s = 2 * k + 1;
  require(s <= phi.cols(), "spark_witness: 2K+1 exceeds number of columns");

  SparkReport rep;
  rep.support_size = s;
  rep.min_sigma_phi = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd a = phi.complex_matrix();
  auto consider = [&](std::vector<std::size_t> support) {
    const double sig = min_sigma(gather(a, support));
    ++rep.searched;
    if (sig < rep.min_sigma_phi) {
      rep.min_sigma_phi = sig;
      rep.best_support = std::move(support);
    }
  };

  const Rng root(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng r = root.child(t);
    const auto sv = gen_sparse(phi.cols(), s, SparseKind::binary, r);
    std::vector<std::size_t> support;
    for (const auto& e : sv.entries()) support.push_back(e.index);
    consider(std::move(support));
  }
  for (std::size_t j = 0; j < phi.cols(); ++j) consider(omp_support(a, j, s - 1));

  // Bind the best subset to a single (cardinal) key column: diag(psi_0) is
  // unitary for +-1 / phasor keys, so the singular values must carry over.
  const Eigen::MatrixXcd key = psi.complex_matrix().col(0);
  Eigen::MatrixXcd bound = gather(a, rep.best_support);
  for (Eigen::Index c = 0; c < bound.cols(); ++c) bound.col(c) = bound.col(c).cwiseProduct(key);
  rep.min_sigma_boxdot = min_sigma(bound);

  // Differences of two K-sparse outer products touch at most 2K rows per column.
  for (std::size_t t = 0; t < trials; ++t) {
    Rng r = root.child(trials + t);
    std::map<std::pair<std::size_t, std::size_t>, double> m;
    for (int term = 0; term < 2; ++term) {
      const auto u = gen_sparse(phi.cols(), k, SparseKind::real, r);
      const auto v = gen_sparse(psi.cols(), k, SparseKind::real, r);
      for (const auto& eu : u.entries())
        for (const auto& ev : v.entries())
          m[{ev.index, eu.index}] += (term == 0 ? 1.0 : -1.0) * eu.value.real() * ev.value.real();
    }
    std::map<std::size_t, std::size_t> per_col;
    for (const auto& [key2, val] : m)
      if (val != 0.0) ++per_col[key2.first];
    for (const auto& [c, n] : per_col) rep.max_column_l0 = std::max(rep.max_column_l0, n);
  }
  return rep;
}

}  // namespace vsa
