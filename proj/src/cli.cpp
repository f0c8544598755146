#include "focklab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "focklab/fekete.hpp"
#include "focklab/fockspace.hpp"
#include "focklab/frames.hpp"
#include "focklab/parallel.hpp"
#include "focklab/pointsets.hpp"

namespace focklab {

namespace {

Json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Point point_from_json(const Json& p, const std::string& where) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError(where + " must be [x, y]");
    }
    return {p[0].get<double>(), p[1].get<double>()};
}

std::vector<Point> points_from_json(const Json& arr, const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + " must be an array of [x, y]");
    std::vector<Point> out;
    for (const auto& p : arr) out.push_back(point_from_json(p, where));
    return out;
}

std::vector<double> doubles_from_json(const Json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) throw ConfigError(where + " must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ConfigError(where + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> ints_from_json(const Json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) throw ConfigError(where + " must be a nonempty array of integers");
    std::vector<int> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer()) throw ConfigError(where + " must contain integers");
        out.push_back(v.get<int>());
    }
    return out;
}

int positive_int(const Json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(where + " must be a positive integer");
    return v.get<int>();
}

Json point_json(Point p) { return Json::array({num(p.real()), num(p.imag())}); }

Json points_json(const PointSet& S) {
    Json arr = Json::array();
    for (const Point p : S.points) arr.push_back(point_json(p));
    return arr;
}

std::vector<Point> grid_from_json(const Json& g) {
    if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) throw ConfigError("grid needs a 'type'");
    const std::string type = g["type"].get<std::string>();
    if (type == "disk") {
        for (const auto& [k, v] : g.items()) {
            if (k != "type" && k != "radius" && k != "per_axis") throw ConfigError("unknown field '" + k + "' in grid");
        }
        if (!g.contains("radius") || !g["radius"].is_number() || !(g["radius"].get<double>() >= 0.0)) {
            throw ConfigError("grid.radius must be a non-negative number");
        }
        if (!g.contains("per_axis")) throw ConfigError("grid needs 'per_axis'");
        return disk_grid(g["radius"].get<double>(), positive_int(g["per_axis"], "grid.per_axis"));
    }
    if (type == "points") {
        for (const auto& [k, v] : g.items()) {
            if (k != "type" && k != "points") throw ConfigError("unknown field '" + k + "' in grid");
        }
        if (!g.contains("points")) throw ConfigError("grid needs 'points'");
        return points_from_json(g["points"], "grid.points");
    }
    throw ConfigError("unknown grid type '" + type + "'");
}

/// Fills in the radius of a lattice set when omitted.
PointSet materialize_set(Json& params, double default_radius) {
    Json& s = params["set"];
    if (s.is_object() && s.value("kind", "") == "lattice" && !s.contains("R")) s["R"] = default_radius;
    return pointset_from_json(s);
}

KernelEvaluator kernel_for(const Weight& w, int N) {
    if (w.gaussian_alpha()) return KernelEvaluator::gaussian_closed_form(w);
    return KernelEvaluator::truncated(OrthoBasis::build(w, N));
}

VectorXc random_coefficients(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = g(rng);
        v(i) = Complex(re, g(rng)) / std::sqrt(2.0);
    }
    return v;
}

Table kernel_table(ExperimentConfig& cfg, const Weight& w) {
    const Json& p = cfg.params;
    const int N = positive_int(p["N"], "params.N");
    const std::string mode = p["mode"].get<std::string>();
    const auto grid = grid_from_json(p["grid"]);
    if (grid.empty()) throw PreconditionError("kernel table grid is empty");
    std::shared_ptr<const OrthoBasis> basis;
    const KernelEvaluator k = [&] {
        if (mode == "truncated") {
            basis = OrthoBasis::build(w, N);
            return KernelEvaluator::truncated(basis);
        }
        if (mode == "closed_form") return KernelEvaluator::gaussian_closed_form(w);
        throw ConfigError("params.mode must be truncated or closed_form");
    }();
    Table t;
    t.columns = {"re_z", "im_z", "re_w", "im_w", "re_K", "im_K", "weighted_abs_K", "weighted_diagonal_z"};
    for (const Point z : grid) {
        const double diag = k.weighted_diagonal(z);
        for (const Point v : grid) {
            const Complex K = k.kernel(z, v);
            t.rows.push_back({num(z.real()), num(z.imag()), num(v.real()), num(v.imag()), num(K.real()),
                              num(K.imag()), num(std::abs(k.weighted_kernel(z, v))), num(diag)});
        }
    }
    const DiagBounds b = diag_bounds_scan(k, grid);
    t.summary = {{"c_min", num(b.c_min)}, {"C_max", num(b.C_max)}, {"bulk_radius", num(bulk_radius(w, N))}};
    return t;
}

Table density(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const auto radii = doubles_from_json(p["radii"], "params.radii");
    const auto centers = points_from_json(p["centers"], "params.centers");
    if (centers.empty()) throw ConfigError("params.centers must not be empty");
    double reach = 0.0;
    for (const Point c : centers) reach = std::max(reach, std::abs(c));
    reach += *std::max_element(radii.begin(), radii.end());
    const PointSet S = materialize_set(p, reach);
    const std::string measure = p["measure"].get<std::string>();
    DensityEstimate est;
    if (measure == "bergman") {
        est = beurling_density(S, kernel_for(w, positive_int(p["N"], "params.N")), radii, centers);
    } else if (measure == "curvature") {
        est = curvature_density(S, w, radii, centers);
    } else {
        throw ConfigError("params.measure must be bergman or curvature");
    }
    Table t;
    t.columns = {"r", "cx", "cy", "count", "mass", "ratio"};
    for (const auto& r : est.records) {
        t.rows.push_back({num(r.r), num(r.center.real()), num(r.center.imag()), r.count, num(r.mass), num(r.ratio)});
    }
    t.summary = {{"lower", num(est.lower)}, {"upper", num(est.upper)}, {"set_size", S.size()}};
    return t;
}

Table fekete(ExperimentConfig& cfg, const Weight& w) {
    const Json& p = cfg.params;
    const auto degrees = ints_from_json(p["degrees"], "params.degrees");
    const int sweeps = positive_int(p["sweeps"], "params.sweeps");
    Table t;
    t.columns = {"N", "separation", "sup_norm", "log_abs_det", "bulk_radius", "accepted_moves"};
    Json pts = Json::object();
    int prev = 0;
    for (const int N : degrees) {
        if (N <= prev) throw PreconditionError("params.degrees must be increasing and positive");
        prev = N;
        auto basis = OrthoBasis::build(w, N);
        const FeketeResult f = refine(approx_fekete(basis, default_candidate_grid(*basis)), sweeps);
        const LagrangeSystem lag(f);
        const double sep = N >= 2 ? separation(f.points) : std::numeric_limits<double>::infinity();
        t.rows.push_back({N, num(sep), num(lag.sup_norm(verification_grid(f))), num(f.log_abs_det),
                          num(basis->bulk_radius()), f.accepted_moves});
        if (p["include_points"].get<bool>()) pts[std::to_string(N)] = points_json(f.points);
    }
    if (!pts.empty()) t.extra["points"] = pts;
    return t;
}

Table frame_bounds(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const auto degrees = ints_from_json(p["degrees"], "params.degrees");
    const double margin = p["margin"].get<double>();
    const PointSet S = materialize_set(p, 20.0);
    Table t;
    t.columns = {"N", "lower", "upper", "set_size", "dropped", "region_radius", "sampling_at_N"};
    for (const int N : degrees) {
        if (N < 1) throw PreconditionError("degrees must be positive");
        const FrameReport r = sampling_bounds(*OrthoBasis::build(w, N), S, margin);
        t.rows.push_back({N, num(r.lower), num(r.upper), r.set_size, r.dropped, num(r.region_radius), r.sampling_at_N});
    }
    return t;
}

Table interp_bounds(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const PointSet S = materialize_set(p, 10.0);
    const FrameReport r = interpolation_lower_bound(kernel_for(w, positive_int(p["N"], "params.N")), S);
    Table t;
    t.columns = {"set_size", "lower", "upper", "region_radius"};
    t.rows.push_back({r.set_size, num(r.lower), num(r.upper), num(r.region_radius)});
    return t;
}

Table localized_frame(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const int N = positive_int(p["N"], "params.N");
    const auto deltas = doubles_from_json(p["deltas"], "params.deltas");
    const int functions = positive_int(p["functions"], "params.functions");
    auto basis = OrthoBasis::build(w, N);
    if (p["cover_radius"].is_null()) p["cover_radius"] = default_cover_radius(*basis);
    if (!p["cover_radius"].is_number()) throw ConfigError("params.cover_radius must be a number");
    const double cover = p["cover_radius"].get<double>();

    MatrixXc F(N, functions);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g;
    for (int j = 0; j < functions; ++j) {
        for (int i = 0; i < N; ++i) {
            const double re = g(rng);
            F(i, j) = Complex(re, g(rng));
        }
    }
    const auto env_grid = disk_grid(cover, 41);
    Table t;
    t.columns = {"delta", "cells", "cell_nodes", "lower", "upper", "max_ratio", "ratio_over_delta", "envelope_c"};
    for (const double d : deltas) {
        const LocalizedFrame lf = build_localized_frame(basis, d, cover);
        const FrameReport r = localized_frame_bounds(lf);
        const auto ratios = reconstruction_ratios(lf, F);
        const double mx = *std::max_element(ratios.begin(), ratios.end());
        const auto centre = static_cast<std::size_t>(
            std::min_element(lf.gamma_nodes.begin(), lf.gamma_nodes.end(),
                             [](Point a, Point b) { return std::norm(a) < std::norm(b); }) -
            lf.gamma_nodes.begin());
        const DecayFit env = localized_frame_envelope(lf, centre, env_grid);
        t.rows.push_back({num(d), lf.gamma_nodes.size(), lf.cell_nodes, num(r.lower), num(r.upper), num(mx),
                          num(mx / d), num(env.c)});
    }
    return t;
}

Table wiener(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const int N = positive_int(p["N"], "params.N");
    const double margin = p["margin"].get<double>();
    const int restarts = p["restarts"].get<int>();
    if (p["projection_rank"].is_null()) p["projection_rank"] = N;
    const int rank = positive_int(p["projection_rank"], "params.projection_rank");
    if (rank > N) throw PreconditionError("projection rank exceeds N");
    std::vector<Norm> norms;
    for (const auto& q : p["norms"]) {
        const std::string s = q.is_string() ? q.get<std::string>() : q.dump();
        if (s == "1") norms.push_back(Norm::l1);
        else if (s == "2") norms.push_back(Norm::l2);
        else if (s == "inf") norms.push_back(Norm::linf);
        else throw ConfigError("params.norms entries must be \"1\", \"2\" or \"inf\"");
    }
    auto basis = OrthoBasis::build(w, N);
    const PointSet S = restrict_to_disk(materialize_set(p, 20.0), basis->bulk_radius() + margin);
    const MatrixXc A = basis->weighted_matrix(S.points);
    MatrixXc P = MatrixXc::Zero(N, N);
    for (int i = 0; i < rank; ++i) P(i, i) = 1.0;
    WienerOptions opt;
    opt.seed = cfg.seed;
    opt.restarts = restarts;
    const auto est = wiener_probe(A, P, norms, opt);
    Table t;
    t.columns = {"q", "estimate", "certified", "trials"};
    for (const auto& e : est) t.rows.push_back({to_string(e.q), num(e.estimate), e.certified, e.trials});
    t.summary = {{"rows", A.rows()}, {"cols", A.cols()}};
    return t;
}

Table deform(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const int N = positive_int(p["N"], "params.N");
    const auto schedule = doubles_from_json(p["schedule"], "params.schedule");
    const PointSet S = materialize_set(p, 20.0);
    const auto rows = deformation_experiment(OrthoBasis::build(w, N), S, schedule);
    Table t;
    t.columns = {"a", "lower", "upper", "set_size", "sampling_at_N", "density"};
    for (const auto& r : rows) {
        t.rows.push_back({num(r.a), num(r.lower), num(r.upper), r.set_size, r.sampling_at_N, num(r.density)});
    }
    return t;
}

Table sharp(ExperimentConfig& cfg, const Weight& w) {
    const Json& p = cfg.params;
    if (!p["epsilon"].is_number()) throw ConfigError("params.epsilon must be a number");
    const SharpReport r = sharp_experiment(w, p["epsilon"].get<double>(), positive_int(p["N"], "params.N"),
                                           positive_int(p["sweeps"], "params.sweeps"));
    Table t;
    t.columns = {"N",       "epsilon",    "interp_lower", "interp_upper", "sampling_degree", "sampling_lower",
                 "sampling_upper", "density", "plain_decay", "improved_decay", "delta_error"};
    t.rows.push_back({r.N, num(r.epsilon), num(r.interpolation.lower), num(r.interpolation.upper), r.sampling_degree,
                      num(r.sampling.lower), num(r.sampling.upper), num(r.density), num(r.plain_decay),
                      num(r.improved_decay), num(r.improved_delta_error)});
    t.extra["points"] = points_json(r.fekete);
    return t;
}

Table translate_check(ExperimentConfig& cfg, const Weight& w) {
    Json& p = cfg.params;
    const Point zeta = point_from_json(p["zeta"], "params.zeta");
    const int degree = positive_int(p["degree"], "params.degree");
    if (p["coeffs"].is_null()) {
        const VectorXc c = random_coefficients(degree, cfg.seed);
        Json arr = Json::array();
        for (Eigen::Index i = 0; i < c.size(); ++i) arr.push_back(point_json(c(i)));
        p["coeffs"] = arr;
    }
    const auto cs = points_from_json(p["coeffs"], "params.coeffs");
    if (static_cast<int>(cs.size()) != degree) throw ConfigError("params.coeffs must have 'degree' entries");
    VectorXc coeffs(degree);
    for (int i = 0; i < degree; ++i) coeffs(i) = cs[static_cast<std::size_t>(i)];
    const auto grid = grid_from_json(p["grid"]);
    const auto lambdas = points_from_json(p["lambdas"], "params.lambdas");
    const TranslationReport r = gaussian_translation_check(w, zeta, coeffs, grid, lambdas);
    Table t;
    t.columns = {"identity_error", "covariance_error", "grid_points"};
    t.rows.push_back({num(r.identity_error), num(r.covariance_error), grid.size()});
    return t;
}

std::string format_cell(const Json& v) {
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

Table run_experiment(ExperimentConfig& cfg) {
    const Weight w = weight_from_json(cfg.weight);
    const std::string& c = cfg.command;
    if (c == "kernel-table") return kernel_table(cfg, w);
    if (c == "density") return density(cfg, w);
    if (c == "fekete") return fekete(cfg, w);
    if (c == "frame-bounds") return frame_bounds(cfg, w);
    if (c == "interp-bounds") return interp_bounds(cfg, w);
    if (c == "localized-frame") return localized_frame(cfg, w);
    if (c == "wiener") return wiener(cfg, w);
    if (c == "deform") return deform(cfg, w);
    if (c == "sharp") return sharp(cfg, w);
    if (c == "translate-check") return translate_check(cfg, w);
    throw ConfigError("unknown command '" + c + "'");
}

std::string render(const ExperimentConfig& cfg, const Table& t) {
    const Json resolved = cfg.resolved();
    const std::string hash = fnv1a_hex(resolved.dump());
    std::ostringstream os;
    if (cfg.format == OutputFormat::json) {
        Json rows = Json::array();
        for (const auto& r : t.rows) rows.push_back(r);
        Json doc = {{"tool", kToolName},     {"version", kToolVersion}, {"config_hash", hash},
                    {"config", resolved},    {"columns", t.columns},    {"rows", rows},
                    {"summary", t.summary}};
        for (const auto& [k, v] : t.extra.items()) doc[k] = v;
        os << doc.dump(2) << '\n';
        return os.str();
    }
    os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
    os << "# config_hash: " << hash << '\n';
    os << "# config: " << resolved.dump() << '\n';
    if (!t.summary.empty()) {
        Json s = Json::object();
        for (const auto& [k, v] : t.summary.items()) s[k] = v.is_number_float() ? Json(format_cell(v)) : v;
        os << "# summary: " << s.dump() << '\n';
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
        os << '\n';
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments on weighted Fock spaces", kToolName};
    std::string config_path, out_path, format;
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--config", config_path, "Experiment config (JSON)")->required();
    auto* out_opt = app.add_option("--out", out_path, "Output file (default: config output.path, else stdout)");
    auto* fmt_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized probes");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        ExperimentConfig cfg = parse_config(buf.str());
        if (*out_opt) cfg.output_path = out_path;
        if (*fmt_opt) cfg.format = parse_format(format);
        if (*seed_opt) cfg.seed = seed;
        set_thread_count(threads);

        const Table table = run_experiment(cfg);
        const std::string doc = render(cfg, table);
        if (cfg.output_path) {
            std::ofstream file(*cfg.output_path, std::ios::binary);
            if (!file) throw ConfigError("cannot write " + *cfg.output_path);
            file << doc;
        } else {
            out << doc;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << kToolName << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << kToolName << ": precondition violated: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const NumericError& e) {
        err << kToolName << ": numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Json::exception& e) {
        err << kToolName << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << kToolName << ": internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace focklab
