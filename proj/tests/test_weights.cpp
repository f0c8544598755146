#include <doctest.h>

#include <cmath>
#include <random>

#include "focklab/weights.hpp"

using namespace focklab;

TEST_CASE("phi of the gaussian family") {
    const Weight w = Weight::gaussian(kPi);
    CHECK(eval_phi(w, {0.0, 0.0}) == 0.0);
    CHECK(eval_phi(w, {1.0, 0.0}) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("phi of the perturbed gaussian") {
    const Weight w = Weight::perturbed_gaussian(kPi, 0.5);
    // mpmath: pi^3/4 + 0.5
    CHECK(eval_phi(w, {kPi / 2, kPi / 2}) == doctest::Approx(8.25156917007495504).epsilon(1e-14));
}

TEST_CASE("laplacians") {
    CHECK(eval_laplacian(Weight::gaussian(kPi), {0.3, -2.0}) == doctest::Approx(2 * kPi));
    CHECK(eval_laplacian(Weight::perturbed_gaussian(kPi, 0.5), {kPi / 2, kPi / 2}) ==
          doctest::Approx(2 * kPi - 1).epsilon(1e-14));
    CHECK(eval_laplacian(Weight::scaled(2.0, Weight::gaussian(kPi)), {1.7, 0.1}) == doctest::Approx(4 * kPi));
}

TEST_CASE("curvature constants") {
    const Weight g = Weight::gaussian(3.0);
    CHECK(g.lower_curvature() == 1.5);
    CHECK(g.upper_curvature() == 1.5);
    const Weight p = Weight::perturbed_gaussian(kPi, 0.5);
    CHECK(p.lower_curvature() == doctest::Approx((kPi - 0.5) / 2));
    CHECK(p.upper_curvature() == doctest::Approx((kPi + 0.5) / 2));
    const Weight s = Weight::scaled(1.2, p);
    CHECK(s.lower_curvature() == doctest::Approx(1.2 * (kPi - 0.5) / 2));
    CHECK(s.upper_curvature() == doctest::Approx(1.2 * (kPi + 0.5) / 2));
    CHECK(g.gaussian_alpha().value() == 3.0);
    CHECK(Weight::scaled(2.0, g).gaussian_alpha().value() == 6.0);
    CHECK_FALSE(p.gaussian_alpha().has_value());
    CHECK(g.is_radial());
    CHECK_FALSE(p.is_radial());
}

TEST_CASE("illegal parameters") {
    CHECK_THROWS_AS(Weight::gaussian(0.0), PreconditionError);
    CHECK_THROWS_AS(Weight::gaussian(-1.0), PreconditionError);
    CHECK_THROWS_AS(Weight::perturbed_gaussian(1.0, -0.1), PreconditionError);
    CHECK_THROWS_AS(Weight::scaled(0.0, Weight::gaussian(1.0)), PreconditionError);
}

TEST_CASE("validate_bounds") {
    ValidationGrid grid{-3.0, 3.0, -3.0, 3.0, 50, 50};
    const BoundsReport g = validate_bounds(Weight::gaussian(kPi), grid);
    CHECK(g.pass);
    CHECK(std::abs(g.worst_margin) < 1e-14);
    CHECK(validate_bounds(Weight::perturbed_gaussian(kPi, 0.5), grid).pass);

    const BoundsReport bad = validate_bounds(Weight::perturbed_gaussian(1.0, 2.0));
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.offending_point.has_value());
    const Point z = *bad.offending_point;
    CHECK(2.0 - 4.0 * std::sin(z.real()) * std::sin(z.imag()) <= 0.0);
    CHECK_FALSE(bad.message.empty());
}

TEST_CASE("validate_bounds passes for every legal built-in weight") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alpha(0.2, 8.0), frac(0.0, 0.99), scale(0.1, 4.0);
    for (int i = 0; i < 30; ++i) {
        const double a = alpha(rng);
        CHECK(validate_bounds(Weight::gaussian(a)).pass);
        const Weight p = Weight::perturbed_gaussian(a, frac(rng) * a);
        CHECK(validate_bounds(p).pass);
        CHECK(validate_bounds(Weight::scaled(scale(rng), p)).pass);
    }
}

TEST_CASE("deviation bound holds on a grid") {
    const Weight p = Weight::perturbed_gaussian(kPi, 0.3);
    const double beta = p.reference_alpha();
    for (const Point z : ValidationGrid{}.points()) {
        CHECK(std::abs(p.phi(z) - beta * std::norm(z) / 2) <= p.deviation_bound() + 1e-12);
    }
}

TEST_CASE("describe") {
    CHECK(Weight::gaussian(2.0).describe() == "gaussian(2)");
    CHECK(Weight::scaled(1.5, Weight::gaussian(2.0)).describe().find("scaled(1.5") == 0);
}
