#include "focklab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace focklab {

namespace {

/// Per-command parameters with their defaults. A null default marks a parameter that is
/// either required (see kRequired) or computed from the others when absent.
const std::map<std::string, Json>& command_defaults() {
    static const std::map<std::string, Json> table = {
        {"kernel-table",
         {{"N", 60}, {"mode", "truncated"}, {"grid", {{"type", "disk"}, {"radius", 1.5}, {"per_axis", 9}}}}},
        {"density",
         {{"set", nullptr},
          {"radii", {20.0}},
          {"centers", {{0.0, 0.0}}},
          {"measure", "bergman"},
          {"N", 60}}},
        {"fekete", {{"degrees", {5, 10, 20, 40}}, {"sweeps", 200}, {"include_points", true}}},
        {"frame-bounds", {{"set", nullptr}, {"degrees", {20, 40, 60, 80}}, {"margin", 2.0}}},
        {"interp-bounds", {{"set", nullptr}, {"N", 60}}},
        {"localized-frame",
         {{"N", 40}, {"deltas", {0.2, 0.1}}, {"functions", 20}, {"cover_radius", nullptr}}},
        {"wiener",
         {{"set", nullptr},
          {"N", 40},
          {"margin", 2.0},
          {"norms", {"1", "2", "inf"}},
          {"restarts", 64},
          {"projection_rank", nullptr}}},
        {"deform", {{"set", nullptr}, {"N", 60}, {"schedule", {1.0, 1.05, 1.1}}}},
        {"sharp", {{"epsilon", 0.2}, {"N", 30}, {"sweeps", 200}}},
        {"translate-check",
         {{"zeta", {0.7, 0.3}},
          {"degree", 10},
          {"coeffs", nullptr},
          {"grid", {{"type", "disk"}, {"radius", 3.0}, {"per_axis", 31}}},
          {"lambdas", {{0.0, 0.0}, {0.5, 0.25}, {-1.0, 1.0}}}}},
    };
    return table;
}

bool requires_set(const std::string& command) {
    return command == "density" || command == "frame-bounds" || command == "interp-bounds" || command == "wiener" ||
           command == "deform";
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail("unknown field '" + key + "' in " + where);
    }
}

bool same_kind(const Json& def, const Json& val) {
    if (def.is_null()) return true;
    if (def.is_number_integer()) return val.is_number_integer() || val.is_number_unsigned();
    if (def.is_number()) return val.is_number();
    if (def.is_boolean()) return val.is_boolean();
    if (def.is_string()) return val.is_string();
    if (def.is_array()) return val.is_array();
    if (def.is_object()) return val.is_object();
    return false;
}

/// Number, or a string "pi" / "<k>pi" / "<k>*pi".
double number_or_pi(const Json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
            s.resize(s.size() - 2);
            if (!s.empty() && s.back() == '*') s.pop_back();
            if (s.empty()) return kPi;
            std::size_t used = 0;
            try {
                const double k = std::stod(s, &used);
                if (used == s.size()) return k * kPi;
            } catch (const std::logic_error&) {
            }
        }
    }
    fail(where + " must be a number or a multiple of pi");
}

double positive(const Json& v, const std::string& where) {
    const double x = number_or_pi(v, where);
    if (!(x > 0.0) || !std::isfinite(x)) fail(where + " must be positive");
    return x;
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names = {"kernel-table", "density", "fekete", "frame-bounds",
                                                   "interp-bounds", "localized-frame", "wiener", "deform",
                                                   "sharp", "translate-check"};
    return names;
}

OutputFormat parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    fail("output format must be csv or json");
}

Weight weight_from_json(const Json& spec, Json* canonical) {
    if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string()) {
        fail("weight needs a string 'family'");
    }
    const std::string family = spec["family"].get<std::string>();
    try {
        if (family == "gaussian") {
            check_keys(spec, {"family", "alpha"}, "weight");
            const double alpha = spec.contains("alpha") ? positive(spec["alpha"], "weight.alpha") : kPi;
            if (canonical) *canonical = {{"family", family}, {"alpha", alpha}};
            return Weight::gaussian(alpha);
        }
        if (family == "perturbed_gaussian") {
            check_keys(spec, {"family", "alpha", "t"}, "weight");
            const double alpha = spec.contains("alpha") ? positive(spec["alpha"], "weight.alpha") : kPi;
            if (!spec.contains("t")) fail("perturbed_gaussian needs 't'");
            const double t = number_or_pi(spec["t"], "weight.t");
            if (canonical) *canonical = {{"family", family}, {"alpha", alpha}, {"t", t}};
            return Weight::perturbed_gaussian(alpha, t);
        }
        if (family == "scaled") {
            check_keys(spec, {"family", "a", "inner"}, "weight");
            if (!spec.contains("a") || !spec.contains("inner")) fail("scaled weight needs 'a' and 'inner'");
            const double a = positive(spec["a"], "weight.a");
            Json inner;
            const Weight w = weight_from_json(spec["inner"], &inner);
            if (canonical) *canonical = {{"family", family}, {"a", a}, {"inner", inner}};
            return Weight::scaled(a, w);
        }
    } catch (const PreconditionError& e) {
        fail(std::string("invalid weight: ") + e.what());
    }
    fail("unknown weight family '" + family + "'");
}

PointSet pointset_from_json(const Json& spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        fail("point set needs a string 'kind'");
    }
    const std::string kind = spec["kind"].get<std::string>();
    if (kind == "lattice") {
        check_keys(spec, {"kind", "a", "b", "R"}, "set");
        if (!spec.contains("a") || !spec.contains("R")) fail("lattice needs 'a' and 'R'");
        const double a = positive(spec["a"], "set.a");
        const double b = spec.contains("b") ? positive(spec["b"], "set.b") : a;
        return lattice(a, b, positive(spec["R"], "set.R"));
    }
    if (kind == "points") {
        check_keys(spec, {"kind", "points", "clip_radius"}, "set");
        if (!spec.contains("points") || !spec["points"].is_array()) fail("points set needs an array 'points'");
        PointSet S;
        S.generator = "points";
        for (const auto& p : spec["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                fail("each point must be [x, y]");
            }
            S.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        if (spec.contains("clip_radius")) S.clip_radius = positive(spec["clip_radius"], "set.clip_radius");
        return S;
    }
    if (kind == "csv") {
        check_keys(spec, {"kind", "path", "clip_radius"}, "set");
        if (!spec.contains("path") || !spec["path"].is_string()) fail("csv set needs a string 'path'");
        std::ifstream in(spec["path"].get<std::string>());
        if (!in) fail("cannot open point file " + spec["path"].get<std::string>());
        PointSet S = read_points_csv(in);
        if (spec.contains("clip_radius")) S.clip_radius = positive(spec["clip_radius"], "set.clip_radius");
        return S;
    }
    fail("unknown point set kind '" + kind + "'");
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

Json ExperimentConfig::resolved() const {
    return {{"command", command},
            {"weight", weight},
            {"params", params},
            {"output", {{"format", format == OutputFormat::csv ? "csv" : "json"}}},
            {"seed", seed}};
}

std::string config_hash(const ExperimentConfig& cfg) { return fnv1a_hex(cfg.resolved().dump()); }

ExperimentConfig parse_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    check_keys(doc, {"command", "weight", "params", "output", "seed"}, "config");

    ExperimentConfig cfg;
    if (!doc.contains("command") || !doc["command"].is_string()) fail("config needs a string 'command'");
    cfg.command = doc["command"].get<std::string>();
    const auto& table = command_defaults();
    const auto it = table.find(cfg.command);
    if (it == table.end()) fail("unknown command '" + cfg.command + "'");

    weight_from_json(doc.contains("weight") ? doc["weight"] : Json{{"family", "gaussian"}}, &cfg.weight);

    cfg.params = it->second;
    if (doc.contains("params")) {
        const Json& p = doc["params"];
        if (!p.is_object()) fail("params must be an object");
        for (const auto& [key, value] : p.items()) {
            if (!cfg.params.contains(key)) fail("unknown field '" + key + "' in params of " + cfg.command);
            if (!same_kind(cfg.params[key], value)) fail("params." + key + " has the wrong type");
            cfg.params[key] = value;
        }
    }
    if (requires_set(cfg.command) && cfg.params["set"].is_null()) fail(cfg.command + " needs params.set");

    if (doc.contains("output")) {
        const Json& o = doc["output"];
        check_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string()) fail("output.path must be a string");
            cfg.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) fail("output.format must be a string");
            cfg.format = parse_format(o["format"].get<std::string>());
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
            fail("seed must be a non-negative integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    return cfg;
}

}  // namespace focklab
