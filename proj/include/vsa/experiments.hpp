#pragma once

// Experiment runners behind the CLI: flat key-value configs, result tables in
// a fixed CSV schema, minimal SVG plots and reproducible run manifests.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vsa {

/// Flat `key = value` configuration. Lines starting with '#' are comments.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "config");
  /// Throws ConfigError if the file cannot be read.
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Entries of `over` replace entries of *this.
  void merge(const Config& over);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }
  std::string to_text() const;

  // Typed access; a missing key or malformed value throws ConfigError.
  std::string str(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::size_t> sizes(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// One CSV line: experiment,N,M,K,mode,trial_count,metric,value,seed.
/// N, M and K are left empty where they do not apply.
struct Row {
  std::string experiment;
  std::optional<std::size_t> n, m, k;
  std::string mode;
  std::size_t trial_count = 0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

class Table {
 public:
  void add(Row row) { rows_.push_back(std::move(row)); }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::string to_csv() const;
  /// Rows matching every given field.
  std::vector<const Row*> select(const std::string& mode, const std::string& metric,
                                 std::optional<std::size_t> n = std::nullopt,
                                 std::optional<std::size_t> m = std::nullopt,
                                 std::optional<std::size_t> k = std::nullopt) const;
  /// The single matching value; throws if there is not exactly one.
  double value(const std::string& mode, const std::string& metric, std::optional<std::size_t> n = std::nullopt,
               std::optional<std::size_t> m = std::nullopt, std::optional<std::size_t> k = std::nullopt) const;

 private:
  std::vector<Row> rows_;
};

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct Plot {
  std::string title, x_label, y_label;
  bool log_x = false;
  bool scatter = false;
  std::vector<Series> series;
};

std::string render_svg(const Plot& plot, const std::string& provenance);

struct ExperimentOutput {
  Table table;
  Plot plot;
};

struct ExperimentInfo {
  std::string id;
  std::string description;
  std::vector<std::pair<std::string, std::string>> defaults;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& experiment_info(const std::string& id);

/// Defaults overlaid with `user`; unknown keys and malformed values throw ConfigError.
Config resolve_config(const std::string& id, const Config& user);

/// Runs on a resolved config. Results never depend on `threads`.
ExperimentOutput run_experiment(const std::string& id, const Config& resolved, std::uint64_t seed,
                                std::size_t threads = 1);

/// Directory holding the bundled fixtures: $VSA_DATA_DIR if set, else the
/// build-time default.
std::string default_data_dir();
/// $VSA_OUT_DIR if set, else "vsa_out".
std::string default_output_dir();

struct RunResult {
  std::string manifest_path;
  std::vector<std::string> outputs;
};

/// Resolves, runs and only then writes <out>/<id>.csv, <id>.svg and
/// <id>.manifest.json. Nothing is written if resolution or the run fails.
RunResult execute_run(const std::string& id, const Config& user, std::uint64_t seed, std::size_t threads,
                      const std::string& out_dir);

struct RerunReport {
  bool identical = true;
  std::vector<std::string> mismatched;
  RunResult run;
};

/// Repeats the run recorded in a manifest into `out_dir` and compares every
/// output against the recorded hash.
RerunReport rerun_manifest(const std::string& manifest_path, const std::string& out_dir, std::size_t threads);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace vsa
