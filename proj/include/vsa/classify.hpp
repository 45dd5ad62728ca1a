#pragma once

// Classification with similarity-preserving scalar codes: level encoders,
// key-value sample encoding with clipping, ridge readout, stratified
// cross-validation and grid search.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsa/core.hpp"

namespace vsa {

enum class EncodingScheme { block_shift, thermometric };

/// Maps an integer level to a code whose overlap falls linearly with level distance.
///
/// block_shift: K-block code of dimension N, N-K+1 levels. Level 0 has every
/// hot index at 0; each increment advances one block, block 0 first, then
/// block 1, and so on cyclically.
/// thermometric: bipolar code of dimension N, N+1 levels; level v is +1 on
/// the first v components and -1 elsewhere.
class LevelEncoder {
 public:
  LevelEncoder(std::size_t n, std::size_t k, EncodingScheme scheme);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  EncodingScheme scheme() const noexcept { return scheme_; }
  std::size_t levels() const noexcept;

  /// Throws unless scheme is block_shift.
  BlockCode block_code(std::size_t level) const;
  /// Throws unless scheme is thermometric.
  DenseVector thermometric(std::size_t level) const;

 private:
  void check_level(std::size_t level) const;
  std::size_t n_, k_;
  EncodingScheme scheme_;
};

// --- datasets ----------------------------------------------------------------

struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;          ///< samples x features
  std::vector<std::size_t> labels;   ///< class index per sample
  std::vector<std::string> class_names;

  std::size_t samples() const noexcept { return labels.size(); }
  std::size_t classes() const noexcept { return class_names.size(); }
};

/// CSV with a header row; every column except `label_column` must be numeric.
/// Class names keep their first-appearance order.
Dataset ingest_dataset(const std::string& path, const std::string& label_column = "label");
Dataset parse_dataset(const std::string& csv_text, const std::string& label_column = "label",
                      const std::string& name = "dataset");

/// Per-feature min-max statistics.
struct Normalizer {
  Eigen::VectorXd lo, hi;

  static Normalizer fit(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows);
  static Normalizer fit(const Eigen::MatrixXd& x);
  /// Rounds the normalised value to one of `levels` uniform levels, clamped to
  /// [0, levels-1]; constant features map to level 0.
  std::vector<std::uint32_t> quantize(const Eigen::Ref<const Eigen::VectorXd>& sample, std::size_t levels) const;
  /// Centre value of a level in the original units.
  double dequantize(std::size_t feature, std::uint32_t level, std::size_t levels) const;
};

// --- encoding ----------------------------------------------------------------

struct PipelineConfig {
  std::size_t n = 512;
  std::size_t k = 32;                 ///< block count; unused by thermometric
  std::int64_t kappa = 7;             ///< clipping threshold; 0 disables clipping
  double lambda = 1.0;                ///< ridge regulariser
  EncodingScheme scheme = EncodingScheme::block_shift;
  std::size_t folds = 4;
  std::uint64_t seed = 1;
};

/// Holds the per-feature keys: block codes for block_shift, bipolar vectors
/// for thermometric. Keys are column f of a codebook generated from `seed`.
class SampleEncoder {
 public:
  SampleEncoder(const PipelineConfig& cfg, std::size_t features);

  const LevelEncoder& levels() const noexcept { return levels_; }
  std::size_t features() const noexcept { return features_; }

  /// sum_f key_f (bound) value(level_f), before clipping. LCC binding for
  /// block_shift, Hadamard for thermometric. Always integer-valued.
  Accumulator accumulate(std::span<const std::uint32_t> feature_levels) const;
  /// clip(accumulate(levels), kappa) as a real vector.
  Eigen::VectorXd encode(std::span<const std::uint32_t> feature_levels, std::int64_t kappa) const;

 private:
  LevelEncoder levels_;
  std::size_t features_;
  std::vector<std::uint32_t> key_hot_;  ///< features x K hot indices (block_shift)
  std::vector<std::int8_t> key_sign_;   ///< features x N signs (thermometric)
};

/// Clipped real vector of an integer accumulator (kappa = 0 disables clipping).
Eigen::VectorXd clip_to_real(const Accumulator& acc, std::int64_t kappa);

// --- ridge readout -------------------------------------------------------------

struct RidgeModel {
  Eigen::MatrixXd w;  ///< classes x N
  double lambda = 0.0;
};

/// W = Y^T H (H^T H + lambda I)^{-1}, solved in primal or dual form, whichever
/// system is smaller. Throws NumericalError on a singular system.
RidgeModel ridge_train(const Eigen::MatrixXd& h, const std::vector<std::size_t>& labels, std::size_t classes,
                       double lambda);
/// Argmax of W h, lowest class index on ties.
std::size_t ridge_predict(const RidgeModel& model, const Eigen::VectorXd& h);
std::vector<std::size_t> ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& h);

// --- evaluation ------------------------------------------------------------------

/// Stratified split: each class is shuffled and dealt round-robin into folds.
/// Throws if a class has fewer samples than folds.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::size_t>& labels, std::size_t classes,
                                                       std::size_t folds, std::uint64_t seed);

struct CvReport {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> fold_accuracy;
};

CvReport cross_validate(const Dataset& data, const PipelineConfig& cfg, std::size_t threads = 1);

struct GridSpec {
  EncodingScheme scheme = EncodingScheme::block_shift;
  std::vector<std::pair<std::size_t, std::size_t>> shapes;  ///< (N, K)
  std::vector<std::int64_t> kappas{1, 3, 7, 15};
  std::vector<double> lambdas;

  /// N in 50..1500 step 50, lambda in 2^[-10, 5].
  static GridSpec dense_default();
  /// K in {16, 32, 64, 128}, K/N in 2^[-5, -2], lambda in 2^[-10, 5].
  static GridSpec sparse_default();
};

struct GridEntry {
  PipelineConfig config;
  CvReport report;
};

struct GridResult {
  GridEntry best;
  std::vector<GridEntry> entries;
};

/// Exhaustive search by mean CV accuracy; ties go to smaller N, then smaller
/// lambda, then smaller kappa, then smaller K. Hidden matrices are built once
/// per (shape, fold) and every lambda reuses one eigendecomposition.
GridResult grid_search(const Dataset& data, const GridSpec& grid, std::size_t folds, std::uint64_t seed,
                       std::size_t threads = 1);

// --- trained pipeline ---------------------------------------------------------

struct TrainedClassifier {
  PipelineConfig config;
  Normalizer normalizer;
  RidgeModel model;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
};

TrainedClassifier train_classifier(const Dataset& data, const PipelineConfig& cfg);
std::vector<std::size_t> classify(const TrainedClassifier& clf, const Eigen::MatrixXd& features);
/// Labels of `data` are matched to the classifier's class names.
double evaluate(const TrainedClassifier& clf, const Dataset& data);

std::string save_classifier(const TrainedClassifier& clf);
TrainedClassifier load_classifier(const std::string& json_text);

}  // namespace vsa
