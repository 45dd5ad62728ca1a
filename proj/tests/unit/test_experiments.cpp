#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "vsa/error.hpp"
#include "vsa/experiments.hpp"

using namespace vsa;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vsa_unit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config small(const std::vector<std::pair<std::string, std::string>>& kv) {
  Config c;
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

Config small_fanin() {
  return small({{"sparsity", "0.05,0.1"}, {"mc_sparsity", "0.1"}, {"mc_trials", "10"}, {"curve_alpha_max", "5"}});
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("config parsing") {
    const auto c = Config::parse("# comment\n\n  a = 1 \nlist=1, 2,3\nname = x y\n");
    CHECK(c.size("a") == 1);
    CHECK(c.sizes("list") == std::vector<std::size_t>{1, 2, 3});
    CHECK(c.str("name") == "x y");
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("Bad Key = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/vsa.cfg"), ConfigError);

    const auto t = Config::parse("n = -3\nr = 1e-3\nf = yes\nl = 1,,2\nx = 12abc\n");
    CHECK_THROWS_AS(t.size("n"), ConfigError);
    CHECK(t.integer("n") == -3);
    CHECK(t.real("r") == 1e-3);
    CHECK(t.flag("f"));
    CHECK_THROWS_AS(t.sizes("l"), ConfigError);
    CHECK_THROWS_AS(t.size("x"), ConfigError);
    CHECK_THROWS_AS(t.str("missing"), ConfigError);

    Config base = Config::parse("a = 1\nb = 2\n");
    base.merge(Config::parse("b = 3\nc = 4\n"));
    CHECK(base.to_text() == "a = 1\nb = 3\nc = 4\n");
    CHECK(Config::parse(base.to_text()).entries() == base.entries());
  }

  TEST_CASE("config resolution against the catalog") {
    for (const auto& info : experiment_catalog()) {
      const auto cfg = resolve_config(info.id, Config{});
      CHECK(cfg.entries().size() == info.defaults.size());
    }
    CHECK_THROWS_AS(resolve_config("nosuch", Config{}), ConfigError);
    CHECK_THROWS_AS(resolve_config("fanin", small({{"unknown_key", "1"}})), ConfigError);
    CHECK_THROWS_AS(resolve_config("fanin", small({{"n", "abc"}})), ConfigError);
    CHECK_THROWS_AS(resolve_config("fanin", small({{"thetas", "0"}})), ConfigError);
    CHECK_THROWS_AS(resolve_config("bindbench", small({{"ratios", "3"}})), ConfigError);
    CHECK_THROWS_AS(resolve_config("rip", small({{"modes", "atomic,bogus"}})), ConfigError);
    CHECK_THROWS_AS(resolve_config("readout", small({{"values", "ternary"}})), ConfigError);
    const auto cfg = resolve_config("reason", Config{});
    CHECK(cfg.str("knowledge").ends_with("countries.json"));
    CHECK(resolve_config("fanin", small({{"n", "500"}})).size("n") == 500);
  }

  TEST_CASE("number formatting round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5, 0.0}) {
      const auto s = format_number(v);
      double back = 0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
  }

  TEST_CASE("table CSV layout") {
    Table t;
    t.add({"exp", 64, std::nullopt, 4, "a,b", 10, "m", 0.5, 7});
    CHECK(t.to_csv() == "experiment,N,M,K,mode,trial_count,metric,value,seed\nexp,64,,4,\"a,b\",10,m,0.5,7\n");
    CHECK(t.value("a,b", "m") == 0.5);
    CHECK_THROWS(t.value("a,b", "other"));
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  }

  TEST_CASE("SVG carries provenance and escapes text") {
    Plot p{"a < b", "x", "y", true, false, {{"s&t", {{1.0, 2.0}, {10.0, 3.0}}}}};
    const auto svg = render_svg(p, "seed=1 -- note");
    CHECK(svg.find("<!-- seed=1 - - note -->") != std::string::npos);
    CHECK(svg.find("a &lt; b") != std::string::npos);
    CHECK(svg.find("s&amp;t") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    p.scatter = true;
    CHECK(render_svg(p, "x").find("<circle") != std::string::npos);
  }

  TEST_CASE("run writes CSV, SVG and manifest; rerun is byte-identical") {
    const auto dir = fresh_dir("run");
    const auto run = execute_run("fanin", small_fanin(), 42, 2, dir.string());
    REQUIRE(fs::exists(dir / "fanin.csv"));
    REQUIRE(fs::exists(dir / "fanin.svg"));
    REQUIRE(fs::exists(run.manifest_path));
    const auto m = nlohmann::json::parse(slurp(run.manifest_path));
    CHECK(m["experiment"] == "fanin");
    CHECK(m["seed"] == 42);
    CHECK(m["config"]["mc_trials"] == "10");
    CHECK(m["config"].size() == experiment_info("fanin").defaults.size());
    CHECK(m.contains("started_at"));
    CHECK(m.contains("finished_at"));
    CHECK(m.contains("version"));
    CHECK(m["outputs"].size() == 2);
    const auto csv = slurp(dir / "fanin.csv");
    CHECK(csv.rfind("experiment,N,M,K,mode,trial_count,metric,value,seed\n", 0) == 0);
    CHECK(slurp(dir / "fanin.svg").find("<!-- experiment=fanin") != std::string::npos);

    const auto dir2 = fresh_dir("rerun");
    const auto rep = rerun_manifest(run.manifest_path, dir2.string(), 1);
    CHECK(rep.identical);
    CHECK(rep.mismatched.empty());
    CHECK(slurp(dir2 / "fanin.csv") == csv);

    auto tampered = m;
    tampered["outputs"][0]["fnv1a64"] = "0000000000000000";
    std::ofstream(dir / "tampered.json") << tampered.dump();
    const auto bad = rerun_manifest((dir / "tampered.json").string(), fresh_dir("rerun2").string(), 1);
    CHECK_FALSE(bad.identical);
    CHECK(bad.mismatched == std::vector<std::string>{"fanin.csv"});

    CHECK_THROWS_AS(rerun_manifest((dir / "missing.json").string(), dir2.string(), 1), ConfigError);
    std::ofstream(dir / "broken.json") << "{\"experiment\": 1}";
    CHECK_THROWS_AS(rerun_manifest((dir / "broken.json").string(), dir2.string(), 1), ConfigError);
    fs::remove_all(dir);
    fs::remove_all(dir2);
  }

  TEST_CASE("invalid config writes nothing") {
    const auto dir = fresh_dir("invalid");
    CHECK_THROWS_AS(execute_run("fanin", small({{"bogus", "1"}}), 1, 1, dir.string()), ConfigError);
    CHECK_FALSE(fs::exists(dir));
  }

  TEST_CASE("results do not depend on the thread count") {
    const auto cfg = resolve_config("sparsity", small({{"k_values", "10,20"}, {"trials", "40"}}));
    CHECK(run_experiment("sparsity", cfg, 5, 1).table.to_csv() == run_experiment("sparsity", cfg, 5, 3).table.to_csv());
    const auto rc = resolve_config(
        "readout", small({{"n_values", "48,24"}, {"m", "120"}, {"k", "3"}, {"trials", "3"}, {"calibration", "1"}}));
    CHECK(run_experiment("readout", rc, 5, 1).table.to_csv() == run_experiment("readout", rc, 5, 4).table.to_csv());
    CHECK(run_experiment("readout", rc, 5, 1).table.to_csv() != run_experiment("readout", rc, 6, 1).table.to_csv());
  }

  TEST_CASE("readout: small sweep") {
    const auto cfg = resolve_config(
        "readout", small({{"n_values", "128,16"}, {"m", "200"}, {"k", "4"}, {"trials", "4"}, {"calibration", "2"}}));
    const auto t = run_experiment("readout", cfg, 3).table;
    CHECK(t.value("lasso", "support_exact_rate", 128) == 1.0);
    CHECK(t.value("lasso", "rmse_mean", 128) < 1e-3);
    CHECK(t.value("readout", "crosstalk_predicted", 16) == doctest::Approx(0.5));
    CHECK(t.value("readout", "rmse_mean", 16) > t.value("readout", "rmse_mean", 128));
  }

  TEST_CASE("rip: small ensemble") {
    const auto cfg = resolve_config("rip", small({{"n_values", "16,256"}, {"m", "20"}, {"k", "2"}, {"blocks", "2"},
                                                  {"trials", "200"}, {"ensemble", "2"}}));
    const auto t = run_experiment("rip", cfg, 3).table;
    for (const auto* mode : {"atomic", "tensor", "protected", "random"}) {
      CHECK(t.value(mode, "delta", 256) < t.value(mode, "delta", 16));
      CHECK(t.value(mode, "delta_max", 16) >= t.value(mode, "delta", 16));
    }
  }

  TEST_CASE("bindbench: exact limits and symmetry rows") {
    const auto cfg = resolve_config("bindbench", small({{"n", "256"}, {"ratios", "16,1"}, {"superpositions", "0,2"},
                                                        {"trials", "4"}, {"sym_n", "200"}, {"sym_k", "10"},
                                                        {"sym_trials", "6"}}));
    const auto t = run_experiment("bindbench", cfg, 3).table;
    CHECK(t.value("lcc", "mean_corr", 256, 0, 16) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.value("hadamard", "mean_corr", 256, 0, 256) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.value("lcc", "mean_corr", 256, 2, 256) == doctest::Approx(t.value("hadamard", "mean_corr", 256, 2, 256)));
    CHECK(t.select("sptp", "mean_corr", 256, std::nullopt, 256).empty());
    CHECK(t.value("sptp", "alpha", 256, std::nullopt, 16) == 17.0);
    CHECK(t.select("sptp_symmetry_gain", "z").size() == 1);
  }

  TEST_CASE("sparsity: LCC keeps exactly K") {
    const auto cfg = resolve_config("sparsity", small({{"k_values", "8,16"}, {"trials", "20"}}));
    const auto t = run_experiment("sparsity", cfg, 3).table;
    CHECK(t.value("lcc", "mean_l0", 160) == 8.0);
    CHECK(t.value("lcc", "std_l0", 320) == 0.0);
    CHECK(t.value("hadamard", "mean_l0", 320) < 16.0);
    CHECK(t.value("convolution", "mean_l0", 320) > 16.0);
  }

  TEST_CASE("fanin: curve rows and Monte Carlo") {
    const auto t = run_experiment("fanin", resolve_config("fanin", small_fanin()), 3).table;
    CHECK(t.value("theta1", "alpha_exact", 1000, std::nullopt, 100) == doctest::Approx(std::log(0.9) / std::log(0.99)));
    CHECK(t.value("curve_theta1", "p_active", 1000, 1, 100) == doctest::Approx(0.01));
    CHECK(t.value("curve_theta3", "p_active", 1000, 2, 100) == 0.0);
    CHECK(t.select("mc_theta1", "p_active").size() == 1);
  }

  TEST_CASE("reason and classify: small runs") {
    const auto rc = resolve_config("reason", small({{"n_values", "256"}, {"r_values", "2"}, {"trials", "50"},
                                                    {"countries_seeds", "3"}}));
    const auto rt = run_experiment("reason", rc, 3).table;
    CHECK(rt.value("R2", "empirical", 256) == 1.0);
    CHECK(rt.value("countries", "success_rate") == 1.0);
    CHECK_THROWS_AS(run_experiment("reason", resolve_config("reason", small({{"knowledge", "/nonexistent.json"},
                                                                             {"n_values", "256"},
                                                                             {"r_values", "2"},
                                                                             {"trials", "1"}})),
                                   3),
                    IoError);

    const auto cc = resolve_config("classify", small({{"datasets", "iris"}, {"dense_n_max", "100"}, {"sparse_k", "16"},
                                                      {"sparse_ratio", "4"}, {"kappas", "3"},
                                                      {"lambda_log2_min", "-1"}, {"lambda_log2_max", "0"}}));
    const auto ct = run_experiment("classify", cc, 3).table;
    CHECK(ct.value("dense:iris", "cv_mean") > 0.8);
    CHECK(ct.value("sparse:iris", "cv_mean") > 0.8);
    CHECK(ct.value("dense:iris", "grid_size") == 4.0);
    CHECK(ct.value("parity:iris", "abs_gap") ==
          doctest::Approx(std::abs(ct.value("dense:iris", "cv_mean") - ct.value("sparse:iris", "cv_mean"))));
  }
}
