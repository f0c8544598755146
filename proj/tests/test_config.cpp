#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "focklab/cli.hpp"

using namespace focklab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("focklab_test_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "focklab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("defaults are materialized") {
    const ExperimentConfig c = parse_config(R"({"command": "fekete"})");
    CHECK(c.command == "fekete");
    CHECK(c.weight["family"] == "gaussian");
    CHECK(c.weight["alpha"].get<double>() == kPi);
    CHECK(c.params["sweeps"] == 200);
    CHECK(c.params["degrees"].size() == 4);
    CHECK(c.format == OutputFormat::csv);
    CHECK(c.seed == 1);
    CHECK_FALSE(c.output_path.has_value());
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "params": {"sweep": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "params": {"sweeps": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "params": {"sweeps": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "density"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "output": {"format": "xml"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "output": {"where": "x"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "weight": {"family": "gaussian", "alpha": -1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "weight": {"family": "gaussian", "beta": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"command": "fekete", "weight": {"family": "cubic"}})"), ConfigError);
}

TEST_CASE("weights from json") {
    Json canon;
    const Weight w = weight_from_json(Json::parse(R"({"family": "gaussian", "alpha": "2pi"})"), &canon);
    CHECK(w.gaussian_alpha().value() == doctest::Approx(2 * kPi));
    CHECK(canon["alpha"].get<double>() == doctest::Approx(2 * kPi));
    const Weight s = weight_from_json(
        Json::parse(R"({"family": "scaled", "a": 1.2, "inner": {"family": "perturbed_gaussian", "alpha": "pi", "t": 0.3}})"));
    CHECK(s.lower_curvature() == doctest::Approx(1.2 * (kPi - 0.3) / 2));
    CHECK(weight_from_json(Json::parse(R"({"family": "gaussian", "alpha": "0.5*pi"})")).gaussian_alpha().value() ==
          doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(weight_from_json(Json::parse(R"({"family": "gaussian", "alpha": "tau"})")), ConfigError);
}

TEST_CASE("point sets from json") {
    CHECK(pointset_from_json(Json::parse(R"({"kind": "lattice", "a": 1, "R": 1})")).size() == 5);
    const PointSet p = pointset_from_json(Json::parse(R"({"kind": "points", "points": [[0, 0], [1, 2]]})"));
    CHECK(p.size() == 2);
    CHECK(p.points[1] == Point(1, 2));
    CHECK_THROWS_AS(pointset_from_json(Json::parse(R"({"kind": "points", "points": [[0]]})")), ConfigError);
    CHECK_THROWS_AS(pointset_from_json(Json::parse(R"({"kind": "csv", "path": "/nonexistent/x.csv"})")),
                    ConfigError);
    TempDir dir;
    const auto csv = dir.write("pts.csv", "# x,y\n0.5,0.25\n-1,3\n");
    const PointSet c = pointset_from_json({{"kind", "csv"}, {"path", csv.string()}, {"clip_radius", 4.0}});
    CHECK(c.size() == 2);
    CHECK(c.clip_radius == 4.0);
}

TEST_CASE("hashing") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    ExperimentConfig a = parse_config(R"({"command": "sharp", "output": {"path": "x.csv"}})");
    ExperimentConfig b = parse_config(R"({"command": "sharp", "output": {"path": "y.csv"}})");
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("density experiment reports ratio near one") {
    ExperimentConfig c = parse_config(
        R"({"command": "density", "params": {"set": {"kind": "lattice", "a": 1}, "radii": [20]}, "output": {"format": "json"}})");
    const Table t = run_experiment(c);
    CHECK(c.params["set"]["R"].get<double>() == 20.0);
    CHECK(std::abs(t.summary["lower"].get<double>() - 1.0) <= 0.05);
    const Json doc = Json::parse(render(c, t));
    CHECK(doc["tool"] == "focklab");
    CHECK(doc["version"] == kToolVersion);
    CHECK(doc["config_hash"] == config_hash(c));
    CHECK(doc["config"]["params"]["set"]["R"] == 20.0);
}

TEST_CASE("kernel table diagonal column") {
    ExperimentConfig c = parse_config(
        R"({"command": "kernel-table", "params": {"N": 60, "grid": {"type": "points", "points": [[0,0],[0.5,0],[0,-1],[1,1],[-0.7,0.2]]}}})");
    const Table t = run_experiment(c);
    REQUIRE(t.rows.size() == 25);
    for (const auto& r : t.rows) CHECK(std::abs(r[7].get<double>() - 1.0) <= 1e-8);
    const std::string csv = render(c, t);
    CHECK(csv.rfind("# tool: focklab ", 0) == 0);
    CHECK(csv.find("# config_hash: " + config_hash(c)) != std::string::npos);
    CHECK(csv.find("re_z,im_z,re_w,im_w,re_K,im_K,weighted_abs_K,weighted_diagonal_z\n") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    TempDir dir;
    const auto out = dir.path / "out.csv";
    const auto bad = dir.write("bad.json", "{\"command\": ");
    CHECK(cli({"--config", bad.string(), "--out", out.string()}) == kExitConfig);
    CHECK_FALSE(fs::exists(out));
    CHECK(cli({"--config", (dir.path / "missing.json").string()}) == kExitConfig);
    CHECK(cli({"--bogus"}) == kExitConfig);

    const auto pert = dir.write("pert.json",
                                R"({"command": "translate-check", "weight": {"family": "perturbed_gaussian", "t": 0.2}})");
    std::string err;
    CHECK(cli({"--config", pert.string(), "--out", out.string()}, nullptr, &err) == kExitPrecondition);
    CHECK(err.find("precondition") != std::string::npos);
    CHECK_FALSE(fs::exists(out));

    const auto huge = dir.write("huge.json", R"({"command": "kernel-table", "params": {"N": 1, "grid": {"type": "points", "points": [[40, 0]]}}})");
    CHECK(cli({"--config", huge.string()}) == kExitNumeric);

    std::string version;
    CHECK(cli({"--version"}, &version) == kExitOk);
    CHECK(version.find(kToolVersion) != std::string::npos);
}

TEST_CASE("cli output is deterministic and honours overrides") {
    TempDir dir;
    const auto cfg = dir.write("t.json", R"({"command": "translate-check", "params": {"degree": 6}})");
    const auto a = dir.path / "a.csv", b = dir.path / "b.csv";
    CHECK(cli({"--config", cfg.string(), "--out", a.string()}) == kExitOk);
    CHECK(cli({"--config", cfg.string(), "--out", b.string(), "--threads", "2"}) == kExitOk);
    CHECK(slurp(a) == slurp(b));
    CHECK(cli({"--config", cfg.string(), "--out", b.string(), "--seed", "9"}) == kExitOk);
    CHECK(slurp(a) != slurp(b));
    std::string json;
    CHECK(cli({"--config", cfg.string(), "--format", "json"}, &json) == kExitOk);
    const Json doc = Json::parse(json);
    CHECK(doc["config"]["output"]["format"] == "json");
    CHECK(doc["config"]["params"]["coeffs"].size() == 6);
    CHECK(doc["rows"][0][0].get<double>() <= 1e-10);
}
