#include "vsa/reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include "vsa/binding.hpp"
#include "vsa/error.hpp"
#include "vsa/parallel.hpp"

namespace vsa {

using detail::require;

// --- schema ------------------------------------------------------------------

RoleSchema::RoleSchema(BlockCodebook keys, std::vector<BlockCodebook> fillers, std::vector<std::string> role_names,
                       std::vector<std::vector<std::string>> filler_names)
    : keys_(std::move(keys)),
      fillers_(std::move(fillers)),
      role_names_(std::move(role_names)),
      filler_names_(std::move(filler_names)) {}

RoleSchema RoleSchema::generate(std::size_t n, std::size_t k, std::vector<std::string> role_names,
                                std::vector<std::vector<std::string>> filler_names, BlockKind kind,
                                std::uint64_t seed) {
  require(!role_names.empty(), "RoleSchema: at least one role is required");
  require<DimensionError>(filler_names.size() == role_names.size(), "RoleSchema: one filler list per role");
  for (std::size_t r = 0; r < role_names.size(); ++r) {
    require(!filler_names[r].empty(), "RoleSchema: role '" + role_names[r] + "' has no fillers");
    for (std::size_t q = 0; q < r; ++q)
      require(role_names[q] != role_names[r], "RoleSchema: duplicate role '" + role_names[r] + "'");
    auto sorted = filler_names[r];
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "RoleSchema: duplicate filler in role '" + role_names[r] + "'");
  }
  auto keys = BlockCodebook::generate(n, k, role_names.size(), kind, child_seed(seed, 0));
  std::vector<BlockCodebook> fillers;
  fillers.reserve(role_names.size());
  for (std::size_t r = 0; r < role_names.size(); ++r)
    fillers.push_back(BlockCodebook::generate(n, k, filler_names[r].size(), kind, child_seed(seed, r + 1)));
  return RoleSchema(std::move(keys), std::move(fillers), std::move(role_names), std::move(filler_names));
}

RoleSchema RoleSchema::generate(std::size_t n, std::size_t k, std::size_t roles, std::size_t fillers_per_role,
                                BlockKind kind, std::uint64_t seed) {
  std::vector<std::string> role_names(roles);
  std::vector<std::vector<std::string>> filler_names(roles, std::vector<std::string>(fillers_per_role));
  for (std::size_t r = 0; r < roles; ++r) {
    role_names[r] = "r" + std::to_string(r);
    for (std::size_t f = 0; f < fillers_per_role; ++f)
      filler_names[r][f] = role_names[r] + "_f" + std::to_string(f);
  }
  return generate(n, k, std::move(role_names), std::move(filler_names), kind, seed);
}

std::size_t RoleSchema::role_index(const std::string& name) const {
  const auto it = std::find(role_names_.begin(), role_names_.end(), name);
  require(it != role_names_.end(), "unknown role '" + name + "'");
  return static_cast<std::size_t>(it - role_names_.begin());
}

std::size_t RoleSchema::filler_index(std::size_t role, const std::string& name) const {
  const auto& names = filler_names_.at(role);
  const auto it = std::find(names.begin(), names.end(), name);
  require(it != names.end(), "unknown filler '" + name + "' for role '" + role_names_[role] + "'");
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<std::size_t> RoleSchema::roles_with_filler(const std::string& name) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < filler_names_.size(); ++r)
    if (std::find(filler_names_[r].begin(), filler_names_[r].end(), name) != filler_names_[r].end())
      out.push_back(r);
  return out;
}

// --- records, transforms, queries -------------------------------------------

RecordVector encode_record(const RoleSchema& schema, const std::vector<std::size_t>& assignment) {
  require<DimensionError>(assignment.size() == schema.roles(), "encode_record: one filler per role required");
  const auto domain =
      schema.keys().kind() == BlockKind::binary ? Accumulator::Domain::integer : Accumulator::Domain::complex;
  Accumulator acc(schema.dimension(), domain);
  for (std::size_t r = 0; r < schema.roles(); ++r) {
    require(assignment[r] < schema.fillers(r).cols(), "encode_record: filler index out of range");
    acc.add(lcc_bind(schema.keys().column(r), schema.fillers(r).column(assignment[r])));
  }
  return {std::move(acc), assignment};
}

RecordVector encode_record(const RoleSchema& schema, const std::map<std::string, std::string>& assignment) {
  require<DimensionError>(assignment.size() == schema.roles(), "encode_record: one filler per role required");
  std::vector<std::size_t> idx(schema.roles());
  for (std::size_t r = 0; r < schema.roles(); ++r) {
    const auto it = assignment.find(schema.role_name(r));
    require(it != assignment.end(), "encode_record: missing role '" + schema.role_name(r) + "'");
    idx[r] = schema.filler_index(r, it->second);
  }
  return encode_record(schema, idx);
}

TransformVector make_transform(const RoleSchema& schema, const RecordVector& rec_i, const RecordVector& rec_j) {
  const std::size_t k = schema.n_blocks();
  return {lcc_bind(rec_j.acc, lcc_inverse(rec_i.acc, k), k), std::nullopt, std::nullopt};
}

std::vector<RankedAnswer> query(const TransformVector& transform, const BlockCode& probe,
                                const BlockCodebook& codebook) {
  require<DimensionError>(probe.dimension() == transform.acc.size() && codebook.rows() == transform.acc.size(),
                          "query: dimension mismatch");
  const auto bound = lcc_bind(transform.acc, probe).to_complex();
  const auto raw = block_scores(bound, codebook);
  double qn = 0.0;
  for (const auto& q : bound) qn += std::norm(q);
  const double scale = qn > 0.0 ? 1.0 / std::sqrt(qn * static_cast<double>(codebook.n_blocks())) : 0.0;
  std::vector<RankedAnswer> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = {i, raw[i] * scale};
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedAnswer& a, const RankedAnswer& b) { return a.score > b.score; });
  return out;
}

// --- capacity ----------------------------------------------------------------

double predict_accuracy(std::size_t n, std::size_t r, std::size_t m) {
  require(n >= 1 && r >= 1 && m >= 1, "predict_accuracy: N, R and M must be >= 1");
  const double s = std::sqrt(static_cast<double>(n)) / static_cast<double>(r);
  const double em1 = static_cast<double>(m - 1);
  auto f = [&](double u) {
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-(u + s) / std::sqrt(2.0));
    return pdf * std::pow(cdf, em1);
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double p = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-12);
  return std::clamp(p, 0.0, 1.0);
}

bool capacity_trial(std::size_t n, std::size_t k, std::size_t r, std::size_t m, BlockKind kind, Rng& rng) {
  require(r >= 1 && m >= 1, "capacity_trial: R and M must be >= 1");
  require(k >= 1 && n % k == 0, "capacity_trial: K must divide N");
  std::vector<BlockCode> keys;
  std::vector<std::vector<BlockCode>> fillers(r);
  keys.reserve(r);
  for (std::size_t i = 0; i < r; ++i) keys.push_back(gen_block_code(n, k, kind, rng));
  for (std::size_t i = 0; i < r; ++i) {
    fillers[i].reserve(m);
    for (std::size_t f = 0; f < m; ++f) fillers[i].push_back(gen_block_code(n, k, kind, rng));
  }
  std::vector<std::size_t> fi(r), fj(r);
  for (std::size_t i = 0; i < r; ++i) {
    fi[i] = rng.below(m);
    fj[i] = m > 1 ? (fi[i] + 1 + rng.below(m - 1)) % m : fi[i];
  }
  const std::size_t r0 = rng.below(r);

  const auto domain = kind == BlockKind::binary ? Accumulator::Domain::integer : Accumulator::Domain::complex;
  Accumulator rec_i(n, domain), rec_j(n, domain);
  for (std::size_t i = 0; i < r; ++i) {
    rec_i.add(lcc_bind(keys[i], fillers[i][fi[i]]));
    rec_j.add(lcc_bind(keys[i], fillers[i][fj[i]]));
  }
  const TransformVector t{lcc_bind(rec_j, lcc_inverse(rec_i, k), k), std::nullopt, std::nullopt};
  const BlockCodebook cb(fillers[r0]);
  const auto ranked = query(t, fillers[r0][fi[r0]], cb);
  return ranked.front().index == fj[r0];
}

std::vector<CapacityCell> run_capacity_experiment(const CapacityConfig& cfg) {
  require(cfg.block_size >= 1 && cfg.trials >= 1, "capacity: block size and trials must be >= 1");
  std::vector<CapacityCell> cells;
  for (const auto n : cfg.n_values)
    for (const auto r : cfg.r_values) {
      require(n % cfg.block_size == 0, "capacity: block size must divide N");
      cells.push_back({n, r, cfg.fillers, cfg.trials, 0.0, predict_accuracy(n, r, cfg.fillers)});
    }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cell = cells[c];
    const std::uint64_t cell_seed = child_seed(cfg.seed, c);
    const std::size_t k = cell.n / cfg.block_size;
    std::vector<char> hit(cfg.trials, 0);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      Rng rng(child_seed(cell_seed, t));
      hit[t] = capacity_trial(cell.n, k, cell.r, cell.m, cfg.kind, rng) ? 1 : 0;
    });
    const auto hits = std::accumulate(hit.begin(), hit.end(), std::size_t{0});
    cell.empirical = static_cast<double>(hits) / static_cast<double>(cfg.trials);
  }
  return cells;
}

// --- knowledge files ------------------------------------------------------------

KnowledgeSpec parse_knowledge(const std::string& json_text) {
  using json = nlohmann::ordered_json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("knowledge: invalid JSON: ") + e.what());
  }
  auto fail = [](const std::string& msg) { throw ConfigError("knowledge: " + msg); };
  if (!doc.is_object() || !doc.contains("roles") || !doc.contains("records"))
    fail("expected an object with 'roles' and 'records'");
  if (!doc["roles"].is_object() || doc["roles"].empty()) fail("'roles' must be a non-empty object");
  if (!doc["records"].is_object() || doc["records"].empty()) fail("'records' must be a non-empty object");

  KnowledgeSpec spec;
  for (const auto& [role, fillers] : doc["roles"].items()) {
    if (!fillers.is_array() || fillers.empty()) fail("role '" + role + "' needs a non-empty filler list");
    spec.roles.push_back(role);
    auto& names = spec.fillers.emplace_back();
    for (const auto& f : fillers) {
      if (!f.is_string()) fail("fillers of role '" + role + "' must be strings");
      names.push_back(f.get<std::string>());
    }
  }
  for (const auto& [name, rec] : doc["records"].items()) {
    if (!rec.is_object()) fail("record '" + name + "' must be an object");
    std::map<std::string, std::string> assignment;
    for (const auto& [role, filler] : rec.items()) {
      if (!filler.is_string()) fail("record '" + name + "' role '" + role + "' must be a string");
      const auto it = std::find(spec.roles.begin(), spec.roles.end(), role);
      if (it == spec.roles.end()) fail("record '" + name + "' uses unknown role '" + role + "'");
      const auto& names = spec.fillers[static_cast<std::size_t>(it - spec.roles.begin())];
      const auto value = filler.get<std::string>();
      if (std::find(names.begin(), names.end(), value) == names.end())
        fail("record '" + name + "' uses unknown filler '" + value + "' for role '" + role + "'");
      assignment[role] = value;
    }
    if (assignment.size() != spec.roles.size()) fail("record '" + name + "' must assign every role");
    spec.record_names.push_back(name);
    spec.records.push_back(std::move(assignment));
  }
  return spec;
}

KnowledgeSpec load_knowledge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("knowledge: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_knowledge(ss.str());
}

KnowledgeBase::KnowledgeBase(KnowledgeSpec spec, std::size_t n, std::size_t k, BlockKind kind, std::uint64_t seed)
    : spec_(std::move(spec)), schema_(RoleSchema::generate(n, k, spec_.roles, spec_.fillers, kind, seed)) {
  records_.reserve(spec_.records.size());
  for (const auto& rec : spec_.records) records_.push_back(encode_record(schema_, rec));
}

std::size_t KnowledgeBase::resolve_record(const std::string& name) const {
  const auto& names = spec_.record_names;
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < spec_.records.size(); ++i)
    for (const auto& [role, filler] : spec_.records[i])
      if (filler == name) {
        hits.push_back(i);
        break;
      }
  require(!hits.empty(), "no record matches '" + name + "'");
  require(hits.size() == 1, "'" + name + "' matches more than one record");
  return hits.front();
}

Analogy KnowledgeBase::analogy(const std::string& probe, const std::string& from, const std::string& to) const {
  const std::size_t i = resolve_record(from);
  const std::size_t j = resolve_record(to);
  const auto candidates = schema_.roles_with_filler(probe);
  require(!candidates.empty(), "unknown filler '" + probe + "'");
  std::vector<std::size_t> in_record;
  for (const auto r : candidates)
    if (schema_.filler_name(r, records_[i].assignment[r]) == probe) in_record.push_back(r);
  const auto& roles = in_record.empty() ? candidates : in_record;
  require(roles.size() == 1, "filler '" + probe + "' is ambiguous across roles");
  const std::size_t role = roles.front();

  TransformVector t = make_transform(schema_, records_[i], records_[j]);
  t.from = spec_.record_names[i];
  t.to = spec_.record_names[j];
  const auto& cb = schema_.fillers(role);
  const auto ranked = query(t, cb.column(schema_.filler_index(role, probe)), cb);
  Analogy out{schema_.role_name(role), {}};
  out.ranked.reserve(ranked.size());
  for (const auto& a : ranked) out.ranked.emplace_back(schema_.filler_name(role, a.index), a.score);
  return out;
}

}  // namespace vsa
