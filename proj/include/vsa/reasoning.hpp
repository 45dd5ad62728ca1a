#pragma once

// Key-value records over block-codes, transformation vectors between records
// and analogical queries, plus the capacity model for query accuracy.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsa/core.hpp"

namespace vsa {

/// R roles, each with its own filler codebook; every code shares (N, K).
class RoleSchema {
 public:
  /// Role r key is column r of a codebook seeded with child_seed(seed, 0);
  /// role r fillers come from child_seed(seed, r + 1).
  static RoleSchema generate(std::size_t n, std::size_t k, std::vector<std::string> role_names,
                             std::vector<std::vector<std::string>> filler_names, BlockKind kind,
                             std::uint64_t seed);
  /// Anonymous schema with R roles of M fillers each.
  static RoleSchema generate(std::size_t n, std::size_t k, std::size_t roles, std::size_t fillers_per_role,
                             BlockKind kind, std::uint64_t seed);

  std::size_t dimension() const noexcept { return keys_.rows(); }
  std::size_t n_blocks() const noexcept { return keys_.n_blocks(); }
  std::size_t roles() const noexcept { return role_names_.size(); }
  const BlockCodebook& keys() const noexcept { return keys_; }
  const BlockCodebook& fillers(std::size_t role) const { return fillers_.at(role); }
  const std::string& role_name(std::size_t r) const { return role_names_.at(r); }
  const std::string& filler_name(std::size_t r, std::size_t f) const { return filler_names_.at(r).at(f); }
  std::size_t role_index(const std::string& name) const;
  std::size_t filler_index(std::size_t role, const std::string& name) const;
  /// Roles whose codebook contains a filler called `name`.
  std::vector<std::size_t> roles_with_filler(const std::string& name) const;

 private:
  RoleSchema(BlockCodebook keys, std::vector<BlockCodebook> fillers, std::vector<std::string> role_names,
             std::vector<std::vector<std::string>> filler_names);
  BlockCodebook keys_;
  std::vector<BlockCodebook> fillers_;
  std::vector<std::string> role_names_;
  std::vector<std::vector<std::string>> filler_names_;
};

struct RecordVector {
  Accumulator acc;
  std::vector<std::size_t> assignment;  ///< filler index per role
};

struct TransformVector {
  Accumulator acc;
  std::optional<std::string> from, to;
};

/// sum_r key_r (*) filler_r with LCC binding; kept as an unnormalised accumulator.
RecordVector encode_record(const RoleSchema& schema, const std::vector<std::size_t>& assignment);
RecordVector encode_record(const RoleSchema& schema, const std::map<std::string, std::string>& assignment);

/// rec_j (*) rec_i^{-1}, evaluated as a per-block spectral convolution.
TransformVector make_transform(const RoleSchema& schema, const RecordVector& rec_i, const RecordVector& rec_j);

struct RankedAnswer {
  std::size_t index;
  double score;
};

/// Binds the probe to the transform and scores every codebook column; sorted
/// by descending score, lowest index first among ties.
std::vector<RankedAnswer> query(const TransformVector& transform, const BlockCode& probe,
                                const BlockCodebook& codebook);

/// P(correct top-1) = ∫ φ(u) Φ(u + s)^{M-1} du with s^2 = N / R^2.
double predict_accuracy(std::size_t n, std::size_t r, std::size_t m);

struct CapacityCell {
  std::size_t n, r, m, trials;
  double empirical;
  double predicted;
};

struct CapacityConfig {
  std::vector<std::size_t> n_values{256, 512, 1024, 2048};
  std::vector<std::size_t> r_values{2, 4, 8};
  std::size_t fillers = 16;
  std::size_t block_size = 16;  ///< K = N / block_size
  std::size_t trials = 2000;
  BlockKind kind = BlockKind::binary;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// One trial: two records over fresh codebooks whose fillers differ in every
/// role; the probe is a random role's filler in record i and the answer is
/// the same role's filler in record j.
bool capacity_trial(std::size_t n, std::size_t k, std::size_t r, std::size_t m, BlockKind kind, Rng& rng);

std::vector<CapacityCell> run_capacity_experiment(const CapacityConfig& cfg);

// --- knowledge files -------------------------------------------------------------

struct KnowledgeSpec {
  std::vector<std::string> roles;
  std::vector<std::vector<std::string>> fillers;
  std::vector<std::string> record_names;
  std::vector<std::map<std::string, std::string>> records;
};

/// JSON: {"roles": {role: [filler, ...]}, "records": {name: {role: filler}}}.
KnowledgeSpec parse_knowledge(const std::string& json_text);
KnowledgeSpec load_knowledge(const std::string& path);

struct Analogy {
  std::string role;
  std::vector<std::pair<std::string, double>> ranked;
};

class KnowledgeBase {
 public:
  KnowledgeBase(KnowledgeSpec spec, std::size_t n, std::size_t k, BlockKind kind, std::uint64_t seed);

  const RoleSchema& schema() const noexcept { return schema_; }
  const KnowledgeSpec& spec() const noexcept { return spec_; }
  /// Accepts a record name or a filler value unique to one record.
  std::size_t resolve_record(const std::string& name) const;
  /// "probe is to `from` as ? is to `to`".
  Analogy analogy(const std::string& probe, const std::string& from, const std::string& to) const;

 private:
  KnowledgeSpec spec_;
  RoleSchema schema_;
  std::vector<RecordVector> records_;
};

}  // namespace vsa
