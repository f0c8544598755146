#include "golden.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "focklab/fekete.hpp"
#include "focklab/frames.hpp"

using namespace focklab;

namespace golden {

namespace {

const Weight kG = Weight::gaussian(kPi);

double diag_ratio() {
    const auto k = KernelEvaluator::truncated(OrthoBasis::build(Weight::perturbed_gaussian(kPi, 0.3), 60));
    const auto b = diag_bounds_scan(k, disk_grid(2.0, 21));
    return b.C_max / b.c_min;
}

double diag_oscillation() {
    return scaled_diag_ratio(Weight::perturbed_gaussian(kPi, 0.3), 0.05, disk_grid(2.0, 21), 60).max_deviation;
}

double lattice2_interp() {
    return interpolation_lower_bound(KernelEvaluator::gaussian_closed_form(kG), lattice(2, 2, 10)).lower;
}

double wiener_lattice(Norm q) {
    const auto b = OrthoBasis::build(kG, 40);
    const PointSet S = restrict_to_disk(lattice(0.8, 0.8, 20), b->bulk_radius() + 2.0);
    const MatrixXc A = b->weighted_matrix(S.points);
    const std::vector<Norm> one = {q};
    return wiener_probe(A, MatrixXc::Identity(40, 40), one).front().estimate;
}

double fekete_min_separation() {
    const std::vector<int> degrees = {5, 10, 15, 20, 25, 30, 35, 40};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : fekete_separation_trend(kG, degrees)) best = std::min(best, row.separation);
    return best;
}

double fekete20_sup_norm() {
    const std::vector<int> degrees = {20};
    return fekete_separation_trend(kG, degrees).front().sup_norm;
}

const SharpReport& sharp() {
    static const SharpReport r = sharp_experiment(kG, 0.2, 30, 200);
    return r;
}

double localized_constant() {
    const int N = 40;
    const auto b = OrthoBasis::build(kG, N);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    MatrixXc F(N, 20);
    for (int j = 0; j < 20; ++j)
        for (int i = 0; i < N; ++i) {
            const double re = g(rng);
            F(i, j) = Complex(re, g(rng));
        }
    const auto r = reconstruction_ratios(build_localized_frame(b, 0.1), F);
    return *std::max_element(r.begin(), r.end()) / 0.1;
}

double bernstein(int N) {
    const auto b = OrthoBasis::build(kG, N);
    return bernstein_diagnostic(*b, 200, disk_grid(b->bulk_radius(), 7), 1);
}

}  // namespace

const std::vector<Quantity>& quantities() {
    static const std::vector<Quantity> list = {
        {"perturbed_diag_ratio",
         {{"weight", "perturbed_gaussian(pi, 0.3)"}, {"N", 60}, {"grid", "disk_grid(2, 21)"}, {"value", "C_max/c_min"}},
         diag_ratio},
        {"perturbed_scaled_diag_oscillation",
         {{"weight", "perturbed_gaussian(pi, 0.3)"}, {"delta", 0.05}, {"N", 60}, {"grid", "disk_grid(2, 21)"}},
         diag_oscillation},
        {"lattice2_interp_lower", {{"weight", "gaussian(pi)"}, {"set", "lattice(2, 2, 10)"}}, lattice2_interp},
        {"wiener_lattice08_l1",
         {{"weight", "gaussian(pi)"}, {"N", 40}, {"set", "lattice(0.8, 0.8, 20) in B_{R_N+2}"}, {"P", "identity"},
          {"seed", 1}, {"restarts", 64}},
         [] { return wiener_lattice(Norm::l1); }},
        {"wiener_lattice08_l2",
         {{"weight", "gaussian(pi)"}, {"N", 40}, {"set", "lattice(0.8, 0.8, 20) in B_{R_N+2}"}, {"P", "identity"}},
         [] { return wiener_lattice(Norm::l2); }},
        {"wiener_lattice08_linf",
         {{"weight", "gaussian(pi)"}, {"N", 40}, {"set", "lattice(0.8, 0.8, 20) in B_{R_N+2}"}, {"P", "identity"},
          {"seed", 1}, {"restarts", 64}},
         [] { return wiener_lattice(Norm::linf); }},
        {"fekete_min_separation",
         {{"weight", "gaussian(pi)"}, {"degrees", {5, 10, 15, 20, 25, 30, 35, 40}}, {"sweeps", 200}},
         fekete_min_separation},
        {"fekete20_sup_norm", {{"weight", "gaussian(pi)"}, {"N", 20}, {"sweeps", 200}}, fekete20_sup_norm},
        {"sharp_interp_lower",
         {{"weight", "gaussian(pi)"}, {"epsilon", 0.2}, {"N", 30}, {"sweeps", 200}, {"kernel", "1.2 phi"}},
         [] { return sharp().interpolation.lower; }},
        {"sharp_sampling_lower",
         {{"weight", "gaussian(pi)"}, {"epsilon", 0.2}, {"N", 30}, {"sweeps", 200}, {"model", "0.8 phi, degree 24"}},
         [] { return sharp().sampling.lower; }},
        {"localized_frame_constant",
         {{"weight", "gaussian(pi)"}, {"N", 40}, {"delta", 0.1}, {"functions", 20}, {"seed", 1},
          {"value", "max ratio / delta"}},
         localized_constant},
        {"bernstein_N40",
         {{"weight", "gaussian(pi)"}, {"N", 40}, {"trials", 200}, {"grid", "disk_grid(R_N, 7)"}, {"seed", 1}},
         [] { return bernstein(40); }},
        {"bernstein_N80",
         {{"weight", "gaussian(pi)"}, {"N", 80}, {"trials", 200}, {"grid", "disk_grid(R_N, 7)"}, {"seed", 1}},
         [] { return bernstein(80); }},
    };
    return list;
}

Json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixtures " + path);
    return Json::parse(in);
}

double stored(const Json& fixtures, const std::string& name) {
    const auto& entries = fixtures.at("entries");
    if (!entries.contains(name)) throw std::runtime_error("fixture '" + name + "' missing; regenerate");
    for (const auto& q : quantities()) {
        if (q.name == name && entries[name].at("config") != q.config) {
            throw std::runtime_error("fixture '" + name + "' was recorded with a different config; regenerate");
        }
    }
    return entries[name].at("value").get<double>();
}

double tolerance(const Json& fixtures) { return fixtures.value("tolerance", 0.2); }

}  // namespace golden
