#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include <boost/math/distributions/binomial.hpp>

#include "experiments_internal.hpp"
#include "vsa/binding.hpp"
#include "vsa/classify.hpp"
#include "vsa/cs.hpp"
#include "vsa/error.hpp"
#include "vsa/parallel.hpp"
#include "vsa/reasoning.hpp"

namespace vsa {

namespace {

using detail::require;

void check(bool cond, const std::string& msg) { require<ConfigError>(cond, msg); }

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (ddof 1); 0 for fewer than two values.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct Emitter {
  Table& table;
  std::string experiment;
  std::uint64_t seed;
  void operator()(std::optional<std::size_t> n, std::optional<std::size_t> m, std::optional<std::size_t> k,
                  const std::string& mode, std::size_t trials, const std::string& metric, double value) const {
    table.add(Row{experiment, n, m, k, mode, trials, metric, value, seed});
  }
};

constexpr std::optional<std::size_t> none = std::nullopt;

// --- readout ---------------------------------------------------------------------

struct ReadoutParams {
  std::vector<std::size_t> n_values;
  std::size_t m, k, trials, calibration, max_iterations;
  SparseKind values;
  bool nonnegative;
  double support_tol, tolerance;
};

ReadoutParams parse_readout(const Config& c) {
  ReadoutParams p;
  p.n_values = c.sizes("n_values");
  p.m = c.size("m");
  p.k = c.size("k");
  p.trials = c.size("trials");
  p.calibration = c.size("calibration");
  p.max_iterations = c.size("max_iterations");
  const auto v = c.str("values");
  check(v == "binary" || v == "gaussian", "values must be binary or gaussian");
  p.values = v == "binary" ? SparseKind::binary : SparseKind::real;
  p.nonnegative = c.flag("nonnegative");
  p.support_tol = c.real("support_tol");
  p.tolerance = c.real("tolerance");
  check(p.k >= 1 && p.k <= p.m, "readout: need 1 <= k <= m");
  check(p.trials >= 1 && p.calibration >= 1, "readout: trials and calibration must be >= 1");
  check(std::all_of(p.n_values.begin(), p.n_values.end(), [](auto n) { return n >= 1; }), "readout: N must be >= 1");
  check(p.support_tol >= 0 && p.tolerance > 0 && p.max_iterations >= 1, "readout: invalid solver settings");
  return p;
}

struct CsInstance {
  SamplingMatrix phi;
  SparseVector a;
  std::vector<cplx> x;
};

CsInstance make_cs_instance(std::size_t n, const ReadoutParams& p, std::uint64_t seed) {
  auto phi = SamplingMatrix::generate(n, p.m, DenseKind::bipolar, child_seed(seed, 0));
  auto a = gen_sparse(p.m, p.k, p.values, child_seed(seed, 1));
  auto x = compress(phi, a);
  return {std::move(phi), std::move(a), std::move(x)};
}

struct LassoScore {
  bool exact;
  double f1, rmse;
  std::size_t iterations;
};

LassoScore run_lasso(const CsInstance& inst, const ReadoutParams& p, double rel) {
  const Eigen::MatrixXd& phi = inst.phi.real_matrix();
  Eigen::VectorXd x(static_cast<Eigen::Index>(inst.x.size()));
  for (std::size_t i = 0; i < inst.x.size(); ++i) x(static_cast<Eigen::Index>(i)) = inst.x[i].real();
  LassoConfig cfg;
  cfg.lambda = rel * (phi.transpose() * x).cwiseAbs().maxCoeff();
  cfg.max_iterations = p.max_iterations;
  cfg.tolerance = p.tolerance;
  cfg.nonnegative = p.nonnegative;
  const auto res = lasso_solve(phi, x, cfg);

  Eigen::VectorXd truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.m));
  std::set<std::size_t> true_support;
  for (const auto& e : inst.a.entries()) {
    truth(e.index) = e.value.real();
    true_support.insert(e.index);
  }
  std::size_t tp = 0, fp = 0;
  for (Eigen::Index i = 0; i < res.coefficients.size(); ++i) {
    if (std::abs(res.coefficients(i)) <= p.support_tol) continue;
    (true_support.count(static_cast<std::size_t>(i)) ? tp : fp) += 1;
  }
  const std::size_t fn = true_support.size() - tp;
  const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  const double rmse = std::sqrt((res.coefficients - truth).squaredNorm() / static_cast<double>(p.m));
  return {fp == 0 && fn == 0, f1, rmse, res.iterations};
}

ExperimentOutput run_readout(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_readout(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "readout", seed};
  const auto grid = lambda_grid();
  Series s_lasso{"lasso RMSE", {}}, s_read{"readout RMSE", {}}, s_exact{"lasso exact-support rate", {}},
      s_pred{"sqrt(K/N)", {}};

  for (std::size_t ni = 0; ni < p.n_values.size(); ++ni) {
    const std::size_t n = p.n_values[ni];
    const std::uint64_t calib_seed = child_seed(child_seed(seed, 1), ni);
    const std::uint64_t eval_seed = child_seed(child_seed(seed, 2), ni);

    // Relative lambda by mean F1 on held-out calibration instances.
    std::vector<CsInstance> calib;
    for (std::size_t i = 0; i < p.calibration; ++i) calib.push_back(make_cs_instance(n, p, child_seed(calib_seed, i)));
    std::vector<LassoScore> cs(grid.size() * p.calibration);
    parallel_for(cs.size(), threads, [&](std::size_t t) {
      cs[t] = run_lasso(calib[t % p.calibration], p, grid[t / p.calibration]);
    });
    std::size_t best = 0;
    double best_f1 = -1.0, best_rmse = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double f1 = 0.0, rmse = 0.0;
      for (std::size_t i = 0; i < p.calibration; ++i) {
        f1 += cs[g * p.calibration + i].f1;
        rmse += cs[g * p.calibration + i].rmse;
      }
      f1 /= static_cast<double>(p.calibration);
      rmse /= static_cast<double>(p.calibration);
      if (f1 > best_f1 || (f1 == best_f1 && rmse < best_rmse)) {
        best = g;
        best_f1 = f1;
        best_rmse = rmse;
      }
    }
    const double rel = grid[best];

    struct TrialOut {
      LassoScore lasso;
      double read_sq = 0.0, off_sum = 0.0, off_sq = 0.0;
      std::size_t off_count = 0;
      bool topk_exact = false;
    };
    std::vector<TrialOut> trials(p.trials);
    parallel_for(p.trials, threads, [&](std::size_t t) {
      const auto inst = make_cs_instance(n, p, child_seed(eval_seed, t));
      auto& o = trials[t];
      o.lasso = run_lasso(inst, p, rel);
      const auto est = vsa_readout(inst.phi, inst.x);
      std::vector<double> truth(p.m, 0.0);
      for (const auto& e : inst.a.entries()) truth[e.index] = e.value.real();
      for (std::size_t i = 0; i < p.m; ++i) {
        const double err = est[i].real() - truth[i];
        o.read_sq += err * err;
        if (truth[i] == 0.0) {
          o.off_sum += err;
          o.off_sq += err * err;
          ++o.off_count;
        }
      }
      std::vector<std::size_t> order(p.m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return std::abs(est[a].real()) > std::abs(est[b].real()); });
      std::set<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p.k));
      o.topk_exact = std::all_of(inst.a.entries().begin(), inst.a.entries().end(),
                                 [&](const SparseEntry& e) { return top.count(e.index) != 0; });
    });

    std::vector<double> exact, f1, rmse, iters, read_rmse, topk;
    double off_sum = 0.0, off_sq = 0.0;
    std::size_t off_count = 0;
    for (const auto& o : trials) {
      exact.push_back(o.lasso.exact ? 1.0 : 0.0);
      f1.push_back(o.lasso.f1);
      rmse.push_back(o.lasso.rmse);
      iters.push_back(static_cast<double>(o.lasso.iterations));
      read_rmse.push_back(std::sqrt(o.read_sq / static_cast<double>(p.m)));
      topk.push_back(o.topk_exact ? 1.0 : 0.0);
      off_sum += o.off_sum;
      off_sq += o.off_sq;
      off_count += o.off_count;
    }
    const double off_mean = off_sum / static_cast<double>(off_count);
    const double crosstalk = std::sqrt(std::max(0.0, off_sq / static_cast<double>(off_count) - off_mean * off_mean));
    const double predicted = std::sqrt(static_cast<double>(p.k) / static_cast<double>(n));

    emit(n, p.m, p.k, "lasso", p.trials, "support_exact_rate", mean_of(exact));
    emit(n, p.m, p.k, "lasso", p.trials, "f1_mean", mean_of(f1));
    emit(n, p.m, p.k, "lasso", p.trials, "rmse_mean", mean_of(rmse));
    emit(n, p.m, p.k, "lasso", p.trials, "rmse_max", *std::max_element(rmse.begin(), rmse.end()));
    emit(n, p.m, p.k, "lasso", p.trials, "iterations_mean", mean_of(iters));
    emit(n, p.m, p.k, "lasso", p.calibration, "lambda_rel", rel);
    emit(n, p.m, p.k, "readout", p.trials, "crosstalk_std", crosstalk);
    emit(n, p.m, p.k, "readout", p.trials, "crosstalk_predicted", predicted);
    emit(n, p.m, p.k, "readout", p.trials, "rmse_mean", mean_of(read_rmse));
    emit(n, p.m, p.k, "readout", p.trials, "topk_support_rate", mean_of(topk));

    const double dn = static_cast<double>(n);
    s_lasso.points.emplace_back(dn, mean_of(rmse));
    s_read.points.emplace_back(dn, mean_of(read_rmse));
    s_exact.points.emplace_back(dn, mean_of(exact));
    s_pred.points.emplace_back(dn, predicted);
  }
  out.plot = {"Sparse coefficient readout vs lasso recovery", "N", "error / rate", true, false,
              {s_lasso, s_read, s_pred, s_exact}};
  return out;
}

// --- rip -------------------------------------------------------------------------

struct RipParams {
  std::vector<std::size_t> n_values;
  std::size_t m, k, blocks, trials, ensemble;
  RipValues values;
  std::vector<std::string> modes;
};

const std::vector<std::string> kRipModes{"atomic", "tensor", "protected", "random"};

RipParams parse_rip(const Config& c) {
  RipParams p;
  p.n_values = c.sizes("n_values");
  p.m = c.size("m");
  p.k = c.size("k");
  p.blocks = c.size("blocks");
  p.trials = c.size("trials");
  p.ensemble = c.size("ensemble");
  const auto v = c.str("values");
  check(v == "gaussian" || v == "ones", "values must be gaussian or ones");
  p.values = v == "gaussian" ? RipValues::gaussian : RipValues::ones;
  p.modes = c.strings("modes");
  for (const auto& m : p.modes)
    check(std::find(kRipModes.begin(), kRipModes.end(), m) != kRipModes.end(), "rip: unknown mode '" + m + "'");
  check(p.k >= 1 && p.k <= p.m, "rip: need 1 <= k <= m");
  check(p.blocks >= 1 && p.blocks <= p.m, "rip: need 1 <= blocks <= m");
  check(p.k * p.blocks <= p.m, "rip: k * blocks must not exceed m");
  check(p.trials >= 1 && p.ensemble >= 1, "rip: trials and ensemble must be >= 1");
  check(std::all_of(p.n_values.begin(), p.n_values.end(), [](auto n) { return n >= 1; }), "rip: N must be >= 1");
  return p;
}

ExperimentOutput run_rip(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_rip(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "rip", seed};
  const std::size_t n_modes = p.modes.size();
  const std::size_t s = p.k * p.blocks;
  std::vector<double> delta(p.n_values.size() * p.ensemble * n_modes, 0.0);

  parallel_for(delta.size(), threads, [&](std::size_t task) {
    const std::size_t mi = task % n_modes;
    const std::size_t e = (task / n_modes) % p.ensemble;
    const std::size_t ni = task / (n_modes * p.ensemble);
    const std::size_t n = p.n_values[ni];
    // Every mode at (N, e) shares Phi, Psi and the trial stream.
    const std::uint64_t es = child_seed(child_seed(seed, ni), e);
    const std::string& mode = p.modes[mi];
    std::shared_ptr<const Dictionary> dict;
    RipProbe probe;
    probe.values = p.values;
    if (mode == "atomic") {
      dict = std::make_shared<SamplingMatrix>(SamplingMatrix::generate(n, p.m, DenseKind::bipolar, child_seed(es, 0)));
      probe.distribution = RipDistribution::iid_support;
      probe.s = s;
    } else if (mode == "tensor") {
      auto phi = std::make_shared<SamplingMatrix>(SamplingMatrix::generate(n, p.m, DenseKind::bipolar, child_seed(es, 0)));
      auto psi = std::make_shared<SamplingMatrix>(SamplingMatrix::generate(n, p.m, DenseKind::bipolar, child_seed(es, 1)));
      dict = std::make_shared<BoxDot>(boxdot(phi, psi));
      probe.distribution = RipDistribution::outer_product;
      probe.k = p.k;
    } else if (mode == "protected") {
      auto phi = std::make_shared<SamplingMatrix>(SamplingMatrix::generate(n, p.m, DenseKind::bipolar, child_seed(es, 0)));
      auto keys =
          std::make_shared<SamplingMatrix>(SamplingMatrix::generate(n, p.blocks, DenseKind::bipolar, child_seed(es, 1)));
      dict = std::make_shared<BoxDot>(boxdot_concat(phi, keys));
      probe.distribution = RipDistribution::concatenation;
      probe.k = p.k;
    } else {
      dict = std::make_shared<SamplingMatrix>(
          SamplingMatrix::generate(n, p.m * p.m, DenseKind::bipolar, child_seed(es, 2)));
      probe.distribution = RipDistribution::iid_support;
      probe.s = p.k * p.k;
    }
    delta[task] = estimate_rip(*dict, probe, p.trials, child_seed(es, 3)).delta;
  });

  std::vector<Series> series;
  for (std::size_t mi = 0; mi < n_modes; ++mi) {
    Series sr{p.modes[mi], {}};
    for (std::size_t ni = 0; ni < p.n_values.size(); ++ni) {
      std::vector<double> per;
      for (std::size_t e = 0; e < p.ensemble; ++e) per.push_back(delta[(ni * p.ensemble + e) * n_modes + mi]);
      const double worst = *std::max_element(per.begin(), per.end());
      const std::size_t n = p.n_values[ni];
      const std::size_t sparsity = p.modes[mi] == "tensor" || p.modes[mi] == "random" ? p.k * p.k : s;
      // delta: per-dictionary worst case averaged over the ensemble; delta_max: pooled worst case.
      emit(n, p.m, sparsity, p.modes[mi], p.trials * p.ensemble, "delta", mean_of(per));
      emit(n, p.m, sparsity, p.modes[mi], p.trials * p.ensemble, "delta_max", worst);
      sr.points.emplace_back(static_cast<double>(n), mean_of(per));
    }
    series.push_back(std::move(sr));
  }
  out.plot = {"Worst-case RIP constant, averaged over the dictionary ensemble", "N", "delta", true, false, std::move(series)};
  return out;
}

// --- bindbench -------------------------------------------------------------------

struct BindParams {
  std::size_t n, trials, sym_n, sym_k, sym_trials;
  std::vector<std::size_t> ratios, superpositions;
  double big_theta;
  bool symmetric;
};

BindParams parse_bind(const Config& c) {
  BindParams p;
  p.n = c.size("n");
  p.ratios = c.sizes("ratios");
  p.superpositions = c.sizes("superpositions");
  p.trials = c.size("trials");
  p.big_theta = c.real("big_theta");
  p.symmetric = c.flag("symmetric");
  p.sym_n = c.size("sym_n");
  p.sym_k = c.size("sym_k");
  p.sym_trials = c.size("sym_trials");
  check(p.n >= 2 && p.trials >= 1, "bindbench: need n >= 2 and trials >= 1");
  for (const auto r : p.ratios) check(r >= 1 && p.n % r == 0, "bindbench: every ratio must divide n");
  check(std::is_sorted(p.superpositions.begin(), p.superpositions.end()) &&
            std::adjacent_find(p.superpositions.begin(), p.superpositions.end()) == p.superpositions.end(),
        "bindbench: superpositions must be strictly increasing");
  check(p.big_theta > 0, "bindbench: big_theta must be positive");
  check(p.sym_k >= 1 && p.sym_k < p.sym_n, "bindbench: need 1 <= sym_k < sym_n");
  return p;
}

/// Phase-coupled draw: one set of phases and one random ranking give both a
/// K-sparse phasor vector (the K lowest ranks) and a K-block code (the lowest
/// rank within each block), so every operator sees comparable inputs.
struct Pair {
  SparseVector sparse;
  BlockCode block;
};

Pair draw_pair(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<cplx> phase(n);
  for (auto& ph : phase) ph = rng.phasor();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<std::uint32_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<std::uint32_t>(r);

  std::vector<std::uint32_t> support(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(support.begin(), support.end());
  std::vector<SparseEntry> entries;
  for (const auto i : support) entries.push_back({i, phase[i]});

  const std::size_t lb = n / k;
  std::vector<std::uint32_t> hot(k);
  std::vector<cplx> phases(k);
  for (std::size_t b = 0; b < k; ++b) {
    std::size_t best = b * lb;
    for (std::size_t i = b * lb; i < (b + 1) * lb; ++i)
      if (rank[i] < rank[best]) best = i;
    hot[b] = static_cast<std::uint32_t>(best - b * lb);
    phases[b] = phase[best];
  }
  return {SparseVector(n, SparseKind::phasor, std::move(entries)), BlockCode(k, lb, std::move(hot), std::move(phases))};
}

void add_to(std::vector<cplx>& acc, std::span<const cplx> v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

const std::vector<std::string> kOps{"hadamard", "convolution", "lcc", "sptp"};

ExperimentOutput run_bindbench(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_bind(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "bindbench", seed};
  const std::size_t n = p.n, n_s = p.superpositions.size();
  const std::size_t max_s = p.superpositions.empty() ? 0 : p.superpositions.back();
  std::map<std::string, Series> series;
  const std::size_t plot_s = p.superpositions.empty() ? 0 : p.superpositions[n_s / 2];

  for (std::size_t ri = 0; ri < p.ratios.size(); ++ri) {
    const std::size_t k = n / p.ratios[ri];
    const bool with_sptp = k < n;
    std::optional<SamplingTensor> w;
    std::size_t alpha = 0;
    if (with_sptp) {
      alpha = min_fanin(n, k, 1).integer;
      w = SamplingTensor::build(n, alpha, SamplingMode::random, p.symmetric, child_seed(seed, 1000 + ri));
    }
    // corr[(t * ops + op) * n_s + si]
    std::vector<double> corr(p.trials * kOps.size() * n_s, 0.0);
    parallel_for(p.trials, threads, [&](std::size_t t) {
      Rng rng(child_seed(child_seed(seed, ri), t));
      const auto a = draw_pair(n, k, rng);
      const auto b = draw_pair(n, k, rng);
      std::vector<std::pair<Pair, Pair>> dist;
      for (std::size_t d = 0; d < max_s; ++d) {
        auto x = draw_pair(n, k, rng);
        auto y = draw_pair(n, k, rng);
        dist.emplace_back(std::move(x), std::move(y));
      }
      const auto bound = [&](std::size_t op, const Pair& x, const Pair& y) -> std::vector<cplx> {
        switch (op) {
          case 0: {
            const auto xd = x.sparse.to_dense(), yd = y.sparse.to_dense();
            return hadamard(xd, yd);
          }
          case 1: {
            const auto xd = x.sparse.to_dense(), yd = y.sparse.to_dense();
            return circular_convolve(xd, yd);
          }
          case 2: return lcc_bind(x.block, y.block).to_dense();
          default: return sptp_bind_phasor(x.sparse, y.sparse, *w, p.big_theta).to_dense();
        }
      };
      const auto a_dense = a.sparse.to_dense();
      const auto a_block = a.block.to_dense();
      const auto b_dense = b.sparse.to_dense();
      std::vector<cplx> b_conj(n);
      for (std::size_t i = 0; i < n; ++i) b_conj[i] = std::conj(b_dense[i]);
      for (std::size_t op = 0; op < kOps.size(); ++op) {
        if (op == 3 && !with_sptp) continue;
        auto c_acc = bound(op, a, b);
        std::size_t added = 0;
        for (std::size_t si = 0; si < n_s; ++si) {
          for (; added < p.superpositions[si]; ++added) {
            const auto v = bound(op, dist[added].first, dist[added].second);
            add_to(c_acc, v);
          }
          double r = 0.0;
          switch (op) {
            case 0: r = similarity(a_dense, hadamard(c_acc, b_conj)); break;
            case 1: r = similarity(a_dense, circular_correlate(b_dense, c_acc)); break;
            case 2: {
              const auto est = lcc_unbind(Accumulator(c_acc), b.block).to_complex();
              r = similarity(a_block, est);
              break;
            }
            default: {
              const auto est = sptp_unbind_phasor(c_acc, b.sparse, *w, p.big_theta).to_dense();
              r = similarity(a_dense, est);
            }
          }
          corr[(t * kOps.size() + op) * n_s + si] = r;
        }
      }
    });

    for (std::size_t op = 0; op < kOps.size(); ++op) {
      if (op == 3 && !with_sptp) continue;
      for (std::size_t si = 0; si < n_s; ++si) {
        std::vector<double> v(p.trials);
        for (std::size_t t = 0; t < p.trials; ++t) v[t] = corr[(t * kOps.size() + op) * n_s + si];
        const double m = mean_of(v);
        emit(n, p.superpositions[si], k, kOps[op], p.trials, "mean_corr", m);
        emit(n, p.superpositions[si], k, kOps[op], p.trials, "sem_corr",
             std_of(v) / std::sqrt(static_cast<double>(p.trials)));
        if (p.superpositions[si] == plot_s) {
          auto& sr = series[kOps[op]];
          sr.name = kOps[op] + " (s=" + std::to_string(plot_s) + ")";
          sr.points.emplace_back(static_cast<double>(k) / static_cast<double>(n), m);
        }
      }
    }
    if (with_sptp) emit(n, none, k, "sptp", p.trials, "alpha", static_cast<double>(alpha));
  }

  // Symmetric against asymmetric sampling at matched fan-in, paired trials.
  {
    const std::size_t sn = p.sym_n, sk = p.sym_k;
    const std::size_t alpha = min_fanin(sn, sk, 1).integer;
    const std::uint64_t ws = child_seed(seed, 2000);
    const auto w_sym = SamplingTensor::build(sn, alpha, SamplingMode::random, true, ws);
    const auto w_asym = SamplingTensor::build(sn, alpha, SamplingMode::random, false, ws);
    std::vector<double> cs(p.sym_trials), ca(p.sym_trials), diff(p.sym_trials);
    parallel_for(p.sym_trials, threads, [&](std::size_t t) {
      Rng rng(child_seed(child_seed(seed, 2001), t));
      const auto a = gen_sparse(sn, sk, SparseKind::phasor, rng);
      const auto b = gen_sparse(sn, sk, SparseKind::phasor, rng);
      const auto a_dense = a.to_dense();
      const auto roundtrip = [&](const SamplingTensor& w) {
        const auto c_dense = sptp_bind_phasor(a, b, w, p.big_theta).to_dense();
        const auto est = sptp_unbind_phasor(c_dense, b, w, p.big_theta).to_dense();
        return similarity(a_dense, est);
      };
      cs[t] = roundtrip(w_sym);
      ca[t] = roundtrip(w_asym);
      diff[t] = cs[t] - ca[t];
    });
    const double se = std_of(diff) / std::sqrt(static_cast<double>(p.sym_trials));
    emit(sn, 0, sk, "sptp_symmetric", p.sym_trials, "mean_corr", mean_of(cs));
    emit(sn, 0, sk, "sptp_asymmetric", p.sym_trials, "mean_corr", mean_of(ca));
    emit(sn, 0, sk, "sptp_symmetry_gain", p.sym_trials, "mean_diff", mean_of(diff));
    emit(sn, 0, sk, "sptp_symmetry_gain", p.sym_trials, "se_diff", se);
    emit(sn, 0, sk, "sptp_symmetry_gain", p.sym_trials, "z", se > 0 ? mean_of(diff) / se : 0.0);
    emit(sn, none, sk, "sptp_symmetry_gain", p.sym_trials, "alpha", static_cast<double>(alpha));
  }

  std::vector<Series> sv;
  for (const auto& op : kOps)
    if (series.count(op)) sv.push_back(series[op]);
  out.plot = {"Unbinding correlation by operator", "K/N", "mean correlation", true, false, std::move(sv)};
  return out;
}

// --- sparsity ------------------------------------------------------------------------

struct SparsityParams {
  std::vector<std::size_t> k_values;
  std::size_t ratio, trials;
  unsigned theta;
  bool symmetric;
};

SparsityParams parse_sparsity(const Config& c) {
  SparsityParams p;
  p.k_values = c.sizes("k_values");
  p.ratio = c.size("ratio");
  p.trials = c.size("trials");
  const auto th = c.size("theta");
  p.symmetric = c.flag("symmetric");
  check(p.ratio >= 2, "sparsity: ratio (N/K) must be >= 2");
  check(th >= 1 && th <= 16, "sparsity: theta must be in [1, 16]");
  p.theta = static_cast<unsigned>(th);
  check(p.trials >= 2, "sparsity: trials must be >= 2");
  check(std::all_of(p.k_values.begin(), p.k_values.end(), [](auto k) { return k >= 1; }), "sparsity: K must be >= 1");
  return p;
}

ExperimentOutput run_sparsity(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_sparsity(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "sparsity", seed};
  Series s_sptp{"SPTP mean L0 / K", {}}, s_lcc{"LCC mean L0 / K", {}}, s_cv{"SPTP CV of L0", {}};

  for (std::size_t ki = 0; ki < p.k_values.size(); ++ki) {
    const std::size_t k = p.k_values[ki], n = k * p.ratio;
    const std::size_t alpha = min_fanin(n, k, p.theta).integer;
    const auto w = SamplingTensor::build(n, alpha, SamplingMode::random, p.symmetric, child_seed(seed, 100 + ki));
    std::vector<double> l_sptp(p.trials), l_lcc(p.trials), l_had(p.trials), l_conv(p.trials);
    parallel_for(p.trials, threads, [&](std::size_t t) {
      Rng rng(child_seed(child_seed(seed, ki), t));
      const auto a = gen_sparse(n, k, SparseKind::binary, rng);
      const auto b = gen_sparse(n, k, SparseKind::binary, rng);
      l_sptp[t] = static_cast<double>(sptp_bind(a, b, w, p.theta).nnz());
      std::set<std::uint32_t> sums;
      std::size_t common = 0;
      for (const auto& ea : a.entries())
        for (const auto& eb : b.entries()) {
          sums.insert(static_cast<std::uint32_t>((ea.index + eb.index) % n));
          common += ea.index == eb.index;
        }
      l_had[t] = static_cast<double>(common);
      l_conv[t] = static_cast<double>(sums.size());
      const auto x = gen_block_code(n, k, BlockKind::binary, rng);
      const auto y = gen_block_code(n, k, BlockKind::binary, rng);
      l_lcc[t] = static_cast<double>(lcc_bind(x, y).to_sparse().nnz());
    });
    const auto stats = [&](const std::string& mode, const std::vector<double>& v) {
      const double m = mean_of(v), sd = std_of(v);
      emit(n, none, k, mode, p.trials, "mean_l0", m);
      emit(n, none, k, mode, p.trials, "std_l0", sd);
      emit(n, none, k, mode, p.trials, "cv_l0", m > 0 ? sd / m : 0.0);
    };
    stats("sptp", l_sptp);
    stats("lcc", l_lcc);
    stats("hadamard", l_had);
    stats("convolution", l_conv);
    emit(n, none, k, "sptp", p.trials, "alpha", static_cast<double>(alpha));
    const double dk = static_cast<double>(k);
    s_sptp.points.emplace_back(dk, mean_of(l_sptp) / dk);
    s_lcc.points.emplace_back(dk, mean_of(l_lcc) / dk);
    s_cv.points.emplace_back(dk, std_of(l_sptp) / std::max(1e-300, mean_of(l_sptp)));
  }
  out.plot = {"Output sparsity of binding at fixed K/N", "K", "L0 / K and CV", true, false, {s_sptp, s_lcc, s_cv}};
  return out;
}

// --- fanin -------------------------------------------------------------------------

struct FaninParams {
  std::size_t n, curve_alpha_max, mc_trials;
  std::vector<double> sparsity, mc_sparsity;
  std::vector<std::size_t> thetas;
  double curve_sparsity;
};

FaninParams parse_fanin(const Config& c) {
  FaninParams p;
  p.n = c.size("n");
  p.sparsity = c.reals("sparsity");
  p.thetas = c.sizes("thetas");
  p.curve_sparsity = c.real("curve_sparsity");
  p.curve_alpha_max = c.size("curve_alpha_max");
  p.mc_sparsity = c.reals("mc_sparsity");
  p.mc_trials = c.size("mc_trials");
  check(p.n >= 2, "fanin: n must be >= 2");
  for (const auto th : p.thetas) check(th >= 1 && th <= 16, "fanin: thetas must be in [1, 16]");
  const auto valid_q = [&](double q) {
    const auto k = static_cast<std::size_t>(std::llround(q * static_cast<double>(p.n)));
    return q > 0 && q < 1 && k >= 1 && k < p.n;
  };
  for (const double q : p.sparsity) check(valid_q(q), "fanin: sparsity values must give 1 <= K < N");
  for (const double q : p.mc_sparsity) check(valid_q(q), "fanin: mc_sparsity values must give 1 <= K < N");
  check(valid_q(p.curve_sparsity), "fanin: curve_sparsity must give 1 <= K < N");
  check(p.curve_alpha_max >= 1 && p.mc_trials >= 1, "fanin: curve_alpha_max and mc_trials must be >= 1");
  return p;
}

ExperimentOutput run_fanin(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_fanin(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "fanin", seed};
  const auto k_of = [&](double q) { return static_cast<std::size_t>(std::llround(q * static_cast<double>(p.n))); };
  std::vector<Series> series;

  for (const auto th : p.thetas) {
    const std::string mode = "theta" + std::to_string(th);
    Series sr{"theta=" + std::to_string(th), {}};
    for (const double q : p.sparsity) {
      const std::size_t k = k_of(q);
      const auto f = min_fanin(p.n, k, static_cast<unsigned>(th));
      emit(p.n, none, k, mode, 0, "alpha_exact", f.exact);
      emit(p.n, none, k, mode, 0, "alpha_min", static_cast<double>(f.integer));
      sr.points.emplace_back(static_cast<double>(k) / static_cast<double>(p.n), f.exact);
    }
    series.push_back(std::move(sr));
  }

  // P(d >= theta) against fan-in at one sparsity, d ~ Binomial(alpha, (K/N)^2).
  {
    const std::size_t k = k_of(p.curve_sparsity);
    const double q = static_cast<double>(k) / static_cast<double>(p.n);
    for (const auto th : p.thetas)
      for (std::size_t a = 1; a <= p.curve_alpha_max; ++a) {
        const boost::math::binomial_distribution<double> d(static_cast<double>(a), q * q);
        const double prob = th > a ? 0.0 : boost::math::cdf(boost::math::complement(d, static_cast<double>(th - 1)));
        emit(p.n, a, k, "curve_theta" + std::to_string(th), 0, "p_active", prob);
      }
  }

  // Monte Carlo: fraction of outputs with coincidence count >= theta.
  struct McTask {
    double q;
    std::size_t th;
  };
  std::vector<McTask> tasks;
  for (const double q : p.mc_sparsity)
    for (const auto th : p.thetas) tasks.push_back({q, th});
  std::vector<std::vector<double>> frac(tasks.size());
  std::vector<std::size_t> alphas(tasks.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const std::size_t k = k_of(tasks[ti].q);
    const auto th = static_cast<unsigned>(tasks[ti].th);
    alphas[ti] = min_fanin(p.n, k, th).integer;
    const auto w = SamplingTensor::build(p.n, alphas[ti], SamplingMode::random, false, child_seed(seed, 3000 + ti));
    frac[ti].assign(p.mc_trials, 0.0);
    parallel_for(p.mc_trials, threads, [&](std::size_t t) {
      Rng rng(child_seed(child_seed(seed, 4000 + ti), t));
      const auto a = gen_sparse(p.n, k, SparseKind::binary, rng);
      const auto b = gen_sparse(p.n, k, SparseKind::binary, rng);
      frac[ti][t] = static_cast<double>(sptp_bind(a, b, w, th).nnz()) / static_cast<double>(p.n);
    });
  }
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const std::size_t k = k_of(tasks[ti].q);
    const std::string mode = "mc_theta" + std::to_string(tasks[ti].th);
    const double m = mean_of(frac[ti]);
    emit(p.n, alphas[ti], k, mode, p.mc_trials, "p_active", m);
    emit(p.n, alphas[ti], k, mode, p.mc_trials, "p_active_sem", std_of(frac[ti]) / std::sqrt(double(p.mc_trials)));
    emit(p.n, alphas[ti], k, mode, p.mc_trials, "abs_error",
         std::abs(m - static_cast<double>(k) / static_cast<double>(p.n)));
  }
  out.plot = {"Minimal fan-in for output density K/N", "K/N", "alpha", true, false, std::move(series)};
  return out;
}

// --- reason ----------------------------------------------------------------------------

struct ReasonParams {
  CapacityConfig capacity;
  bool countries;
  std::string knowledge, probe, from, to;
  std::size_t countries_n, countries_k, countries_seeds;
};

ReasonParams parse_reason(const Config& c) {
  ReasonParams p;
  p.capacity.n_values = c.sizes("n_values");
  p.capacity.r_values = c.sizes("r_values");
  p.capacity.fillers = c.size("fillers");
  p.capacity.block_size = c.size("block_size");
  p.capacity.trials = c.size("trials");
  const auto kind = c.str("kind");
  check(kind == "binary" || kind == "phasor", "kind must be binary or phasor");
  p.capacity.kind = kind == "binary" ? BlockKind::binary : BlockKind::phasor;
  p.countries = c.flag("countries");
  p.knowledge = c.str("knowledge");
  p.countries_n = c.size("countries_n");
  p.countries_k = c.size("countries_k");
  p.countries_seeds = c.size("countries_seeds");
  p.probe = c.str("probe");
  p.from = c.str("from");
  p.to = c.str("to");
  check(p.capacity.block_size >= 1 && p.capacity.trials >= 1 && p.capacity.fillers >= 1,
        "reason: block_size, trials and fillers must be >= 1");
  for (const auto n : p.capacity.n_values)
    check(n >= p.capacity.block_size && n % p.capacity.block_size == 0, "reason: block_size must divide every N");
  for (const auto r : p.capacity.r_values) check(r >= 1, "reason: R must be >= 1");
  check(p.countries_k >= 1 && p.countries_n % p.countries_k == 0, "reason: countries_k must divide countries_n");
  check(p.countries_seeds >= 1, "reason: countries_seeds must be >= 1");
  return p;
}

ExperimentOutput run_reason(const Config& c, std::uint64_t seed, std::size_t threads) {
  auto p = parse_reason(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "reason", seed};
  p.capacity.seed = child_seed(seed, 0);
  p.capacity.threads = threads;
  const auto cells = run_capacity_experiment(p.capacity);
  std::map<std::size_t, Series> emp, pred;
  for (const auto& cell : cells) {
    const std::string mode = "R" + std::to_string(cell.r);
    const std::size_t k = cell.n / p.capacity.block_size;
    emit(cell.n, cell.m, k, mode, cell.trials, "empirical", cell.empirical);
    emit(cell.n, cell.m, k, mode, cell.trials, "predicted", cell.predicted);
    emp[cell.r].name = "R=" + std::to_string(cell.r) + " simulated";
    emp[cell.r].points.emplace_back(static_cast<double>(cell.n), cell.empirical);
    pred[cell.r].name = "R=" + std::to_string(cell.r) + " model";
    pred[cell.r].points.emplace_back(static_cast<double>(cell.n), cell.predicted);
  }

  if (p.countries) {
    const auto spec = load_knowledge(p.knowledge);
    std::vector<char> ok(p.countries_seeds, 0);
    std::string role;
    std::size_t candidates = 0;
    {
      const KnowledgeBase kb(spec, p.countries_n, p.countries_k, BlockKind::binary, child_seed(seed, 1));
      role = kb.analogy(p.probe, p.from, p.to).role;
      candidates = spec.fillers[kb.schema().role_index(role)].size();
    }
    parallel_for(p.countries_seeds, threads, [&](std::size_t s) {
      const KnowledgeBase kb(spec, p.countries_n, p.countries_k, BlockKind::binary,
                             child_seed(child_seed(seed, 1), s));
      const auto a = kb.analogy(p.probe, p.from, p.to);
      const auto& expected = spec.records[kb.resolve_record(p.to)].at(a.role);
      ok[s] = a.ranked.front().first == expected ? 1 : 0;
    });
    const double rate = static_cast<double>(std::accumulate(ok.begin(), ok.end(), std::size_t{0})) /
                        static_cast<double>(p.countries_seeds);
    emit(p.countries_n, candidates, p.countries_k, "countries", p.countries_seeds, "success_rate", rate);
  }

  std::vector<Series> series;
  for (auto& [r, s] : emp) {
    series.push_back(s);
    series.push_back(pred[r]);
  }
  out.plot = {"Analogical query accuracy", "N", "top-1 accuracy", true, false, std::move(series)};
  return out;
}

// --- classify --------------------------------------------------------------------------

struct ClassifyParams {
  std::vector<std::string> datasets;
  std::string data_dir, label;
  std::size_t folds, dense_n_min, dense_n_max, dense_n_step;
  std::vector<std::size_t> sparse_k, sparse_ratio;
  std::vector<std::int64_t> kappas;
  std::int64_t lambda_log2_min, lambda_log2_max;
};

ClassifyParams parse_classify(const Config& c) {
  ClassifyParams p;
  p.datasets = c.strings("datasets");
  p.data_dir = c.str("data_dir");
  p.label = c.str("label");
  p.folds = c.size("folds");
  p.dense_n_min = c.size("dense_n_min");
  p.dense_n_max = c.size("dense_n_max");
  p.dense_n_step = c.size("dense_n_step");
  p.sparse_k = c.sizes("sparse_k");
  p.sparse_ratio = c.sizes("sparse_ratio");
  p.kappas = c.integers("kappas");
  p.lambda_log2_min = c.integer("lambda_log2_min");
  p.lambda_log2_max = c.integer("lambda_log2_max");
  check(p.folds >= 2, "classify: folds must be >= 2");
  check(p.dense_n_min >= 1 && p.dense_n_step >= 1 && p.dense_n_min <= p.dense_n_max,
        "classify: invalid dense N range");
  for (const auto k : p.sparse_k) check(k >= 1, "classify: sparse_k must be >= 1");
  for (const auto r : p.sparse_ratio) check(r >= 1, "classify: sparse_ratio must be >= 1");
  for (const auto kappa : p.kappas) check(kappa >= 0, "classify: kappas must be >= 0");
  check(p.lambda_log2_min <= p.lambda_log2_max && p.lambda_log2_min >= -60 && p.lambda_log2_max <= 60,
        "classify: invalid lambda range");
  return p;
}

std::string dataset_path(const ClassifyParams& p, const std::string& name) {
  if (name.find('/') != std::string::npos || name.ends_with(".csv")) return name;
  return (std::filesystem::path(p.data_dir) / "datasets" / (name + ".csv")).string();
}

ExperimentOutput run_classify(const Config& c, std::uint64_t seed, std::size_t threads) {
  const auto p = parse_classify(c);
  ExperimentOutput out;
  const Emitter emit{out.table, "classify", seed};
  std::vector<double> lambdas;
  for (auto e = p.lambda_log2_min; e <= p.lambda_log2_max; ++e) lambdas.push_back(std::ldexp(1.0, static_cast<int>(e)));
  GridSpec dense;
  dense.scheme = EncodingScheme::thermometric;
  for (std::size_t n = p.dense_n_min; n <= p.dense_n_max; n += p.dense_n_step) dense.shapes.emplace_back(n, 1);
  dense.kappas = p.kappas;
  dense.lambdas = lambdas;
  GridSpec sparse;
  sparse.scheme = EncodingScheme::block_shift;
  for (const auto k : p.sparse_k)
    for (const auto r : p.sparse_ratio) sparse.shapes.emplace_back(k * r, k);
  sparse.kappas = p.kappas;
  sparse.lambdas = lambdas;

  Series pts{"datasets", {}};
  for (const auto& name : p.datasets) {
    auto data = ingest_dataset(dataset_path(p, name), p.label);
    const std::string stem = std::filesystem::path(name).stem().string();
    double acc[2] = {0.0, 0.0};
    for (int which = 0; which < 2; ++which) {
      const auto& grid = which == 0 ? dense : sparse;
      const auto res = grid_search(data, grid, p.folds, seed, threads);
      const auto& b = res.best;
      const std::string mode = std::string(which == 0 ? "dense:" : "sparse:") + stem;
      const std::size_t k = which == 0 ? 0 : b.config.k;
      emit(b.config.n, data.samples(), k, mode, p.folds, "cv_mean", b.report.mean);
      emit(b.config.n, data.samples(), k, mode, p.folds, "cv_std", b.report.std);
      emit(b.config.n, data.samples(), k, mode, p.folds, "kappa", static_cast<double>(b.config.kappa));
      emit(b.config.n, data.samples(), k, mode, p.folds, "lambda", b.config.lambda);
      emit(none, data.samples(), none, mode, p.folds, "grid_size", static_cast<double>(res.entries.size()));
      acc[which] = b.report.mean;
    }
    emit(none, data.samples(), none, "parity:" + stem, p.folds, "abs_gap", std::abs(acc[0] - acc[1]));
    pts.points.emplace_back(acc[0], acc[1]);
  }
  out.plot = {"Cross-validated accuracy: sparse block codes vs dense", "dense accuracy", "sparse accuracy", false,
              true, {pts}};
  return out;
}

}  // namespace

// --- catalog ----------------------------------------------------------------------------

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog{
      {"readout",
       "Readout of sparse coefficients from a dense superposition against lasso recovery, swept over N",
       {{"n_values", "256,192,128,96,80,64,56,48,40,32,24,16"},
        {"m", "1000"},
        {"k", "6"},
        {"trials", "20"},
        {"calibration", "4"},
        {"values", "binary"},
        {"nonnegative", "true"},
        {"support_tol", "1e-3"},
        {"max_iterations", "5000"},
        {"tolerance", "1e-8"}}},
      {"rip",
       "Worst-case RIP constants of atomic, tensor-product, protected-sum and random dictionaries",
       {{"n_values", "16,24,32,48,64,96,128,160,192,256,320"},
        {"m", "100"},
        {"k", "5"},
        {"blocks", "5"},
        {"trials", "2000"},
        {"ensemble", "5"},
        {"values", "gaussian"},
        {"modes", "atomic,tensor,protected,random"}}},
      {"bindbench",
       "Unbinding correlation of Hadamard, convolution, LCC and SPTP over sparsity and superposition",
       {{"n", "4096"},
        {"ratios", "128,64,32,16,8,4,2,1"},
        {"superpositions", "0,1,2,4,8,16"},
        {"trials", "200"},
        {"big_theta", "1"},
        {"symmetric", "true"},
        {"sym_n", "1000"},
        {"sym_k", "50"},
        {"sym_trials", "500"}}},
      {"sparsity",
       "Output L0 of SPTP and LCC binding at fixed K/N",
       {{"k_values", "20,50,100,200"}, {"ratio", "20"}, {"trials", "500"}, {"theta", "1"}, {"symmetric", "false"}}},
      {"fanin",
       "Minimal SPTP fan-in against sparsity for several thresholds, with a Monte Carlo check",
       {{"n", "1000"},
        {"sparsity", "0.001,0.002,0.005,0.01,0.02,0.05,0.1,0.2,0.3,0.4,0.5"},
        {"thetas", "1,2,3"},
        {"curve_sparsity", "0.1"},
        {"curve_alpha_max", "60"},
        {"mc_sparsity", "0.02,0.05,0.1"},
        {"mc_trials", "200"}}},
      {"reason",
       "Analogical query capacity grid and the countries knowledge-base demo",
       {{"n_values", "256,512,1024,2048"},
        {"r_values", "2,4,8"},
        {"fillers", "16"},
        {"block_size", "16"},
        {"trials", "2000"},
        {"kind", "binary"},
        {"countries", "true"},
        {"knowledge", ""},
        {"countries_n", "2048"},
        {"countries_k", "128"},
        {"countries_seeds", "100"},
        {"probe", "Dollar"},
        {"from", "USA"},
        {"to", "Mexico"}}},
      {"classify",
       "Grid-searched CV accuracy of sparse block-code and dense thermometric pipelines",
       {{"datasets", "iris,wine,breast_cancer,glass,pima"},
        {"data_dir", ""},
        {"label", "label"},
        {"folds", "4"},
        {"dense_n_min", "50"},
        {"dense_n_max", "1500"},
        {"dense_n_step", "50"},
        {"sparse_k", "16,32,64,128"},
        {"sparse_ratio", "4,8,16,32"},
        {"kappas", "1,3,7,15"},
        {"lambda_log2_min", "-10"},
        {"lambda_log2_max", "5"}}},
  };
  return catalog;
}

namespace detail {

void finalize_config(const std::string& id, Config& cfg) {
  if (id == "classify" && cfg.str("data_dir").empty()) cfg.set("data_dir", default_data_dir());
  if (id == "reason" && cfg.str("knowledge").empty())
    cfg.set("knowledge", (std::filesystem::path(default_data_dir()) / "countries.json").string());
}

void validate_config(const std::string& id, const Config& cfg) {
  if (id == "readout") parse_readout(cfg);
  else if (id == "rip") parse_rip(cfg);
  else if (id == "bindbench") parse_bind(cfg);
  else if (id == "sparsity") parse_sparsity(cfg);
  else if (id == "fanin") parse_fanin(cfg);
  else if (id == "reason") parse_reason(cfg);
  else if (id == "classify") parse_classify(cfg);
  else throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace detail

ExperimentOutput run_experiment(const std::string& id, const Config& resolved, std::uint64_t seed,
                                std::size_t threads) {
  if (id == "readout") return run_readout(resolved, seed, threads);
  if (id == "rip") return run_rip(resolved, seed, threads);
  if (id == "bindbench") return run_bindbench(resolved, seed, threads);
  if (id == "sparsity") return run_sparsity(resolved, seed, threads);
  if (id == "fanin") return run_fanin(resolved, seed, threads);
  if (id == "reason") return run_reason(resolved, seed, threads);
  if (id == "classify") return run_classify(resolved, seed, threads);
  throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace vsa
