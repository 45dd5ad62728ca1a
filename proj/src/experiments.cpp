#include "vsa/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "experiments_internal.hpp"
#include "json.hpp"
#include "vsa/error.hpp"

#ifndef VSA_VERSION
#define VSA_VERSION "0.0.0"
#endif
#ifndef VSA_DEFAULT_DATA_DIR
#define VSA_DEFAULT_DATA_DIR "data"
#endif

namespace vsa {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_integral(const std::string& key, const std::string& text) {
  T v{};
  const auto* b = text.data();
  const auto* e = text.data() + text.size();
  const auto r = std::from_chars(b, e, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != e)
    throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* b = text.data();
  const auto* e = text.data() + text.size();
  const auto r = std::from_chars(b, e, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': expected a finite number, got '" + text + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

// --- Config ---------------------------------------------------------------------

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path);
  }
  return parse(text, path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid config key '" + key + "'");
  values_[key] = trim(value);
}

void Config::merge(const Config& over) {
  for (const auto& [k, v] : over.values_) values_[k] = v;
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string Config::str(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("missing config key '" + key + "'");
  return *v;
}

std::size_t Config::size(const std::string& key) const { return parse_integral<std::size_t>(key, str(key)); }
std::int64_t Config::integer(const std::string& key) const { return parse_integral<std::int64_t>(key, str(key)); }
std::uint64_t Config::u64(const std::string& key) const { return parse_integral<std::uint64_t>(key, str(key)); }
double Config::real(const std::string& key) const { return parse_real(key, str(key)); }

bool Config::flag(const std::string& key) const {
  const auto v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::size_t> Config::sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : strings(key)) out.push_back(parse_integral<std::size_t>(key, item));
  return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : strings(key)) out.push_back(parse_integral<std::int64_t>(key, item));
  return out;
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : strings(key)) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::string> Config::strings(const std::string& key) const {
  auto items = split_list(str(key));
  if (items.empty() || std::any_of(items.begin(), items.end(), [](const auto& s) { return s.empty(); }))
    throw ConfigError("config key '" + key + "': expected a non-empty comma-separated list");
  return items;
}

// --- Table ----------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string Table::to_csv() const {
  std::string out = "experiment,N,M,K,mode,trial_count,metric,value,seed\n";
  const auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : rows_) {
    out += csv_field(r.experiment) + ',' + opt(r.n) + ',' + opt(r.m) + ',' + opt(r.k) + ',' + csv_field(r.mode) +
           ',' + std::to_string(r.trial_count) + ',' + csv_field(r.metric) + ',' + format_number(r.value) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::vector<const Row*> Table::select(const std::string& mode, const std::string& metric,
                                      std::optional<std::size_t> n, std::optional<std::size_t> m,
                                      std::optional<std::size_t> k) const {
  std::vector<const Row*> out;
  for (const auto& r : rows_) {
    if (r.mode != mode || r.metric != metric) continue;
    if (n && r.n != n) continue;
    if (m && r.m != m) continue;
    if (k && r.k != k) continue;
    out.push_back(&r);
  }
  return out;
}

double Table::value(const std::string& mode, const std::string& metric, std::optional<std::size_t> n,
                    std::optional<std::size_t> m, std::optional<std::size_t> k) const {
  const auto rows = select(mode, metric, n, m, k);
  if (rows.size() != 1)
    throw InvalidArgument("table lookup " + mode + "/" + metric + " matched " + std::to_string(rows.size()) +
                          " rows");
  return rows.front()->value;
}

// --- SVG --------------------------------------------------------------------------

std::string render_svg(const Plot& plot, const std::string& provenance) {
  constexpr double width = 720, height = 440, left = 70, right = 200, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  const auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) {
      if (plot.log_x && x <= 0) continue;
      if (!std::isfinite(y)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;
  const auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::string safe = provenance;
  for (std::size_t p; (p = safe.find("--")) != std::string::npos;) safe.replace(p, 2, "- -");

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" + fixed(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<!-- " + safe + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(left) + "\" y=\"24\" font-size=\"14\">" + xml_escape(plot.title) + "</text>\n";
  out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) + "\" height=\"" +
         fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double gx = left + pw * i / 4.0;
    const double label = plot.log_x ? std::pow(10.0, fx) : fx;
    out += "<text x=\"" + fixed(gx) + "\" y=\"" + fixed(top + ph + 16) + "\" text-anchor=\"middle\">" +
           tick_label(label) + "</text>\n";
    const double fy = y0 + (y1 - y0) * i / 4.0;
    out += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(fy) + 4) + "\" text-anchor=\"end\">" +
           tick_label(fy) + "</text>\n";
  }
  out += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 10) + "\" text-anchor=\"middle\">" +
         xml_escape(plot.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fixed(top + ph / 2) + ")\">" + xml_escape(plot.y_label) + "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const std::string color = palette[si % std::size(palette)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if ((plot.log_x && x <= 0) || !std::isfinite(y)) continue;
      if (plot.scatter)
        out += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      else
        pts += (pts.empty() ? "" : " ") + fixed(px(x)) + "," + fixed(py(y));
    }
    if (!plot.scatter && !pts.empty())
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 12 + 16.0 * static_cast<double>(si);
    out += "<rect x=\"" + fixed(left + pw + 12) + "\" y=\"" + fixed(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + fixed(left + pw + 28) + "\" y=\"" + fixed(ly + 1) + "\">" + xml_escape(s.name) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// --- catalog and config resolution -------------------------------------------------

const ExperimentInfo& experiment_info(const std::string& id) {
  for (const auto& e : experiment_catalog())
    if (e.id == id) return e;
  throw ConfigError("unknown experiment '" + id + "'");
}

Config resolve_config(const std::string& id, const Config& user) {
  const auto& info = experiment_info(id);
  Config cfg;
  for (const auto& [k, v] : info.defaults) cfg.set(k, v);
  for (const auto& [k, v] : user.entries()) {
    if (!cfg.has(k)) throw ConfigError("unknown config key '" + k + "' for experiment '" + id + "'");
    cfg.set(k, v);
  }
  detail::finalize_config(id, cfg);
  detail::validate_config(id, cfg);
  return cfg;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("VSA_DATA_DIR"); env && *env) return env;
  return VSA_DEFAULT_DATA_DIR;
}

std::string default_output_dir() {
  if (const char* env = std::getenv("VSA_OUT_DIR"); env && *env) return env;
  return "vsa_out";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- runs and manifests --------------------------------------------------------------

RunResult execute_run(const std::string& id, const Config& user, std::uint64_t seed, std::size_t threads,
                      const std::string& out_dir) {
  const Config cfg = resolve_config(id, user);
  const std::string started = utc_now();
  const ExperimentOutput result = run_experiment(id, cfg, seed, threads);
  const std::string finished = utc_now();

  const std::string csv = result.table.to_csv();
  const std::string config_hash = fnv1a_hex(cfg.to_text() + "seed=" + std::to_string(seed));
  const std::string provenance = "experiment=" + id + "; data=" + id + ".csv; seed=" + std::to_string(seed) +
                                 "; config=" + config_hash + "; csv=" + fnv1a_hex(csv) + "; version=" + VSA_VERSION;
  const std::string svg = render_svg(result.plot, provenance);

  nlohmann::ordered_json manifest;
  manifest["id"] = id + "-" + config_hash;
  manifest["experiment"] = id;
  manifest["version"] = VSA_VERSION;
  manifest["seed"] = seed;
  manifest["threads"] = threads;
  manifest["started_at"] = started;
  manifest["finished_at"] = finished;
  nlohmann::ordered_json jc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries()) jc[k] = v;
  manifest["config"] = jc;
  const std::vector<std::pair<std::string, const std::string*>> files{{id + ".csv", &csv}, {id + ".svg", &svg}};
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& [name, bytes] : files)
    outputs.push_back({{"file", name}, {"bytes", bytes->size()}, {"fnv1a64", fnv1a_hex(*bytes)}});
  manifest["outputs"] = outputs;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  RunResult run;
  for (const auto& [name, bytes] : files) {
    const fs::path p = fs::path(out_dir) / name;
    write_file_atomic(p, *bytes);
    run.outputs.push_back(p.string());
  }
  const fs::path mp = fs::path(out_dir) / (id + ".manifest.json");
  write_file_atomic(mp, manifest.dump(2) + "\n");
  run.manifest_path = mp.string();
  return run;
}

RerunReport rerun_manifest(const std::string& manifest_path, const std::string& out_dir, std::size_t threads) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const IoError&) {
    throw ConfigError("cannot read manifest " + manifest_path);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + manifest_path + ": " + e.what());
  }
  std::string id;
  std::uint64_t seed = 0;
  Config cfg;
  std::map<std::string, std::string> expected;
  try {
    id = m.at("experiment").get<std::string>();
    seed = m.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : m.at("config").items()) cfg.set(k, v.get<std::string>());
    for (const auto& o : m.at("outputs")) expected[o.at("file").get<std::string>()] = o.at("fnv1a64").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + manifest_path + ": " + e.what());
  }

  RerunReport report;
  report.run = execute_run(id, cfg, seed, threads, out_dir);
  for (const auto& [name, hash] : expected) {
    const auto bytes = read_file((fs::path(out_dir) / name).string());
    if (fnv1a_hex(bytes) != hash) {
      report.identical = false;
      report.mismatched.push_back(name);
    }
  }
  return report;
}

}  // namespace vsa
