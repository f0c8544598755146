#include <doctest.h>

#include <cmath>
#include <random>

#include "focklab/frames.hpp"

using namespace focklab;

namespace {

const Weight kG = Weight::gaussian(kPi);

PointSet points(std::vector<Point> p) {
    PointSet S;
    S.points = std::move(p);
    return S;
}

MatrixXc random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXc M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double re = g(rng);
            M(i, j) = Complex(re, g(rng));
        }
    return M;
}

}  // namespace

TEST_CASE("sampling bounds") {
    const auto b1 = OrthoBasis::build(kG, 1);
    const FrameReport r = sampling_bounds(*b1, points({{0, 0}}));
    CHECK(r.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.kind == FrameKind::sampling);
    CHECK(r.sampling_at_N);

    const auto b40 = OrthoBasis::build(kG, 40);
    const FrameReport l = sampling_bounds(*b40, lattice(0.8, 0.8, 12));
    CHECK(l.lower > 0.0);
    CHECK(l.lower <= l.upper);
    CHECK(l.region_radius == doctest::Approx(b40->bulk_radius() + 2.0));
    CHECK(l.dropped + l.set_size == lattice(0.8, 0.8, 12).size());

    const FrameReport few = sampling_bounds(*b40, points({{0, 0}, {1, 0}}));
    CHECK(few.lower == 0.0);
    CHECK_FALSE(few.sampling_at_N);
    CHECK_THROWS_AS(sampling_bounds(*b40, lattice(1, 1, 3), -1.0), PreconditionError);
}

TEST_CASE("stability constants scale with the square of a sample factor") {
    std::mt19937_64 rng(2);
    const MatrixXc M = random_matrix(12, 5, rng);
    const auto [a, b] = stability_constants(M);
    for (double c : {0.5, 3.0, 1e-3}) {
        const auto [ac, bc] = stability_constants(c * M);
        CHECK(ac == doctest::Approx(c * c * a).epsilon(1e-12));
        CHECK(bc == doctest::Approx(c * c * b).epsilon(1e-12));
    }
    CHECK(stability_constants(random_matrix(3, 5, rng)).first == 0.0);
}

TEST_CASE("two-point riesz bound") {
    const auto k = KernelEvaluator::gaussian_closed_form(kG);
    for (double d : {0.1, 0.5, 1.0, 2.0}) {
        const FrameReport r = interpolation_lower_bound(k, points({{0.3, -0.2}, {0.3 + d, -0.2}}));
        CHECK(std::abs(r.lower - (1.0 - std::exp(-kPi * d * d / 2))) <= 1e-10);
        CHECK(std::abs(r.upper - (1.0 + std::exp(-kPi * d * d / 2))) <= 1e-10);
        CHECK(r.kind == FrameKind::riesz);
    }
    const FrameReport one = interpolation_lower_bound(k, points({{1, 1}}));
    CHECK(one.lower == doctest::Approx(1.0));
    CHECK(one.upper == doctest::Approx(1.0));
    CHECK_THROWS_AS(interpolation_lower_bound(k, points({{1, 1}, {1, 1}})), PreconditionError);
    CHECK_THROWS_AS(interpolation_lower_bound(k, PointSet{}), PreconditionError);
    CHECK(interpolation_lower_bound(k, lattice(2, 2, 10)).lower > 0.9);
}

TEST_CASE("localized frame for N = 1") {
    const auto b = OrthoBasis::build(kG, 1);
    // mpmath: delta^{-2} \int_{cell} e^{-pi |w|^2 / 2} dm
    for (const auto& [delta, c] : {std::pair{0.2, 0.989604347260966131}, std::pair{0.1, 0.997386796933672495}}) {
        const LocalizedFrame lf = build_localized_frame(b, delta, 0.0);
        REQUIRE(lf.gamma_nodes.size() == 1);
        CHECK(std::abs(lf.coeffs(0, 0) - c) <= 1e-8);
        const FrameReport r = localized_frame_bounds(lf);
        CHECK(r.lower == doctest::Approx(c * c * delta * delta).epsilon(1e-10));
        CHECK(r.upper == doctest::Approx(r.lower));
        CHECK(r.kind == FrameKind::localized_frame);
    }
    CHECK_THROWS_AS(build_localized_frame(b, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_localized_frame(b, 1.5), PreconditionError);
}

TEST_CASE("localized frame for N = 40") {
    const auto b = OrthoBasis::build(kG, 40);
    const LocalizedFrame lf = build_localized_frame(b, 0.2);
    CHECK(lf.coeffs.rows() == 40);
    CHECK(lf.coeffs.cols() == static_cast<Eigen::Index>(lf.gamma_nodes.size()));
    std::size_t origin = 0;
    for (std::size_t i = 0; i < lf.gamma_nodes.size(); ++i)
        if (std::abs(lf.gamma_nodes[i]) < 1e-12) origin = i;
    double odd = 0.0;
    for (int k = 1; k < 40; k += 2) odd = std::max(odd, std::abs(lf.coeffs(k, static_cast<Eigen::Index>(origin))));
    CHECK(odd <= 1e-10);
    CHECK(lf.coeffs.col(static_cast<Eigen::Index>(origin)).allFinite());

    const DecayFit env = localized_frame_envelope(lf, origin, disk_grid(b->bulk_radius(), 25));
    CHECK(env.c > 0.0);

    const FrameReport r2 = localized_frame_bounds(lf);
    const FrameReport r4 = localized_frame_bounds(build_localized_frame(b, 0.4));
    CHECK(r2.lower > 0.0);
    CHECK(r2.upper / r2.lower <= r4.upper / r4.lower);
}

TEST_CASE("reconstruction ratios shrink with the cell size") {
    const auto b = OrthoBasis::build(kG, 20);
    std::mt19937_64 rng(9);
    const MatrixXc f = random_matrix(20, 5, rng);
    const auto r2 = reconstruction_ratios(build_localized_frame(b, 0.2), f);
    const auto r1 = reconstruction_ratios(build_localized_frame(b, 0.1), f);
    REQUIRE(r1.size() == 5);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(r1[j] < r2[j]);
        CHECK(r1[j] > 0.0);
    }
    CHECK_THROWS_AS(reconstruction_ratios(build_localized_frame(b, 0.2), MatrixXc::Zero(20, 1)), PreconditionError);
    CHECK_THROWS_AS(reconstruction_ratios(build_localized_frame(b, 0.2), f.topRows(3)), PreconditionError);
}

TEST_CASE("wiener probe on the identity") {
    const MatrixXc I = MatrixXc::Identity(6, 6);
    const std::vector<Norm> all = {Norm::l1, Norm::l2, Norm::linf};
    const auto est = wiener_probe(I, I, all);
    REQUIRE(est.size() == 3);
    for (const auto& e : est) CHECK(std::abs(e.estimate - 1.0) <= 1e-12);
    CHECK(est[1].certified);
    CHECK_FALSE(est[0].certified);
    CHECK(est[0].trials == 6 + 64);
}

TEST_CASE("wiener probe preconditions") {
    const std::vector<Norm> two = {Norm::l2};
    MatrixXc P = MatrixXc::Identity(3, 3);
    P(0, 1) = 0.5;
    P(1, 1) = 0.5;
    CHECK_THROWS_AS(wiener_probe(MatrixXc::Identity(3, 3), P, two), PreconditionError);
    CHECK_THROWS_AS(wiener_probe(MatrixXc::Identity(3, 4), MatrixXc::Identity(3, 3), two), PreconditionError);
}

TEST_CASE("wiener probe on a projection") {
    // P projects onto the first two coordinates; A acts as diag(2, 3, 100).
    MatrixXc P = MatrixXc::Zero(3, 3);
    P(0, 0) = P(1, 1) = 1.0;
    MatrixXc A = MatrixXc::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = 3.0;
    A(2, 2) = 100.0;
    const std::vector<Norm> all = {Norm::l1, Norm::l2, Norm::linf};
    const auto est = wiener_probe(A, P, all);
    for (const auto& e : est) CHECK(e.estimate == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("wiener probe is monotone under row augmentation") {
    std::mt19937_64 rng(17);
    const std::vector<Norm> all = {Norm::l1, Norm::l2, Norm::linf};
    for (int t = 0; t < 10; ++t) {
        const MatrixXc B = random_matrix(6, 4, rng);
        const MatrixXc P = B * (B.adjoint() * B).inverse() * B.adjoint();
        const MatrixXc A = random_matrix(8, 6, rng);
        MatrixXc Aug(11, 6);
        Aug << A, random_matrix(3, 6, rng);
        WienerOptions opt;
        opt.restarts = 8;
        const auto big = wiener_probe(Aug, P, all, opt);
        for (const auto& e : big)
            if (e.q != Norm::l2) opt.warm_starts.push_back(e.witness);
        const auto small = wiener_probe(A, P, all, opt);
        for (std::size_t i = 0; i < 3; ++i) CHECK(small[i].estimate <= big[i].estimate);
    }
}

TEST_CASE("deformation experiment") {
    const auto b = OrthoBasis::build(kG, 30);
    const PointSet S = lattice(0.8, 0.8, 12);
    const std::vector<double> sched = {1.0, 1.05};
    const auto rows = deformation_experiment(b, S, sched);
    REQUIRE(rows.size() == 2);
    const FrameReport direct = sampling_bounds(*b, S);
    CHECK(rows[0].lower == direct.lower);
    CHECK(rows[0].upper == direct.upper);
    CHECK(rows[0].set_size == direct.set_size);
    CHECK(rows[0].density >= rows[1].density);
    CHECK_THROWS_AS(deformation_experiment(OrthoBasis::build(kG, 2), S, sched), PreconditionError);
}

TEST_CASE("sharp experiment") {
    const SharpReport r = sharp_experiment(kG, 0.2, 12, 30);
    CHECK(r.fekete.size() == 12);
    CHECK(r.sampling_degree == 9);
    CHECK(r.interpolation.lower > 0.0);
    CHECK(r.sampling.lower > 0.0);
    CHECK(r.improved_delta_error <= 1e-10);
    CHECK(r.improved_decay > r.plain_decay);
    CHECK_THROWS_AS(sharp_experiment(kG, 0.5, 12), PreconditionError);
    CHECK_THROWS_AS(sharp_experiment(kG, 0.0, 12), PreconditionError);
}

TEST_CASE("gaussian translations") {
    VectorXc one = VectorXc::Zero(1);
    one(0) = 1.0;
    const std::vector<Point> z1 = {Point(1.0, 0.0)};
    const std::vector<Point> none;
    const auto r = gaussian_translation_check(kPi, {1.0, 0.0}, one, z1, none);
    CHECK(r.identity_error <= 1e-12);

    std::mt19937_64 rng(4);
    const MatrixXc c = random_matrix(11, 1, rng);
    const auto grid = disk_grid(3.0, 31);
    const std::vector<Point> lambdas = {Point(0, 0), Point(0.5, 0.25), Point(-1, 1)};
    const auto r0 = gaussian_translation_check(kPi, {0.0, 0.0}, c.col(0), grid, lambdas);
    CHECK(r0.identity_error == 0.0);
    CHECK(r0.covariance_error <= 1e-12);
    const auto r7 = gaussian_translation_check(kG, {0.7, 0.3}, c.col(0), grid, lambdas);
    CHECK(r7.identity_error <= 1e-10);
    CHECK(r7.covariance_error <= 1e-10);
    CHECK_THROWS_AS(gaussian_translation_check(Weight::perturbed_gaussian(kPi, 0.1), {0.7, 0.3}, c.col(0), grid,
                                               lambdas),
                    PreconditionError);
}
