#include "focklab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

namespace focklab {

namespace {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

}  // namespace

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw PreconditionError("Gauss-Legendre rule needs n >= 1");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [pn, pnm1] = legendre_pair(n, x);
            const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto [pn, pnm1] = legendre_pair(n, x);
        const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
        const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = wgt;
        weights[static_cast<std::size_t>(n - 1 - i)] = wgt;
    }
    if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

bool QuadratureRule::contains(Point c, double radius) const {
    switch (kind) {
        case Kind::radial_polar:
        case Kind::disk:
            return std::abs(c - center) + radius <= extent * (1.0 + 1e-12);
        case Kind::tensor_square:
        case Kind::cell: {
            const Point d = c - center;
            return std::abs(d.real()) + radius <= extent * (1.0 + 1e-12) &&
                   std::abs(d.imag()) + radius <= extent * (1.0 + 1e-12);
        }
    }
    return false;
}

double quadrature_extent(const Weight& w, int degree, const QuadratureOptions& opt) {
    if (degree < 1) throw PreconditionError("quadrature needs degree N >= 1");
    // phi differs from the reference Gaussian by at most c, so the relative tail of
    // |z|^{2k} e^{-2 phi} outside B_R is at most e^{4c} Q(k + 1, beta R^2).
    const double beta = w.reference_alpha();
    const double c = w.deviation_bound();
    const double k = degree - 1;
    const double log_budget = std::log(opt.tail_tolerance) - 4.0 * c;
    double x = std::max(1.0, k);
    while (true) {
        if (x > opt.extent_cap) {
            throw NumericError("quadrature extent search exceeded its cap; weight growth too weak for N = " +
                               std::to_string(degree));
        }
        const double q = boost::math::gamma_q(k + 1.0, x);
        if (q > 0.0 && std::log(q) < log_budget) break;
        if (q == 0.0) break;
        x += 0.25;
    }
    return std::sqrt(x / beta);
}

QuadratureRule build_quadrature(const Weight& w, int degree, const QuadratureOptions& opt) {
    const double extent = quadrature_extent(w, degree, opt);
    const double beta = w.reference_alpha();
    QuadratureRule rule;
    rule.extent = extent;
    if (w.is_radial()) {
        rule.kind = QuadratureRule::Kind::radial_polar;
        // Radial resolution scales with the number of Gaussian widths across [0, R].
        const int n_r = static_cast<int>(std::ceil(opt.refinement * (30.0 + 1.2 * degree + 6.0 * extent * std::sqrt(beta))));
        const int n_t = static_cast<int>(std::ceil(opt.refinement * (2.0 * degree + 1.0)));
        const GaussLegendre gl(n_r);
        rule.nodes.reserve(static_cast<std::size_t>(n_r * n_t));
        rule.weights.reserve(static_cast<std::size_t>(n_r * n_t));
        for (int i = 0; i < n_r; ++i) {
            const double r = 0.5 * extent * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
            const double wr = 0.5 * extent * gl.weights[static_cast<std::size_t>(i)] * r;
            for (int j = 0; j < n_t; ++j) {
                const double th = 2.0 * kPi * j / n_t;
                rule.nodes.emplace_back(std::polar(r, th));
                rule.weights.push_back(wr * 2.0 * kPi / n_t);
            }
        }
    } else {
        rule.kind = QuadratureRule::Kind::tensor_square;
        const int n = static_cast<int>(std::ceil(opt.refinement * (40.0 + 1.5 * degree + 8.0 * extent * std::sqrt(beta))));
        const GaussLegendre gl(n);
        rule.nodes.reserve(static_cast<std::size_t>(n * n));
        rule.weights.reserve(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i) {
            const double x = extent * gl.nodes[static_cast<std::size_t>(i)];
            const double wx = extent * gl.weights[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                const double y = extent * gl.nodes[static_cast<std::size_t>(j)];
                rule.nodes.emplace_back(x, y);
                rule.weights.push_back(wx * extent * gl.weights[static_cast<std::size_t>(j)]);
            }
        }
    }
    return rule;
}

QuadratureRule disk_rule(Point center, double radius, int n_radial, int n_angular) {
    if (radius < 0.0) throw PreconditionError("disk radius must be >= 0");
    QuadratureRule rule;
    rule.kind = QuadratureRule::Kind::disk;
    rule.extent = radius;
    rule.center = center;
    if (radius == 0.0) return rule;
    const GaussLegendre gl(n_radial);
    for (int i = 0; i < n_radial; ++i) {
        const double r = 0.5 * radius * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
        const double wr = 0.5 * radius * gl.weights[static_cast<std::size_t>(i)] * r;
        for (int j = 0; j < n_angular; ++j) {
            const double th = 2.0 * kPi * (j + 0.5) / n_angular;
            rule.nodes.push_back(center + std::polar(r, th));
            rule.weights.push_back(wr * 2.0 * kPi / n_angular);
        }
    }
    return rule;
}

QuadratureRule square_rule(Point center, double half_side, int n_per_axis) {
    QuadratureRule rule;
    rule.kind = QuadratureRule::Kind::cell;
    rule.extent = half_side;
    rule.center = center;
    const GaussLegendre gl(n_per_axis);
    for (int i = 0; i < n_per_axis; ++i) {
        for (int j = 0; j < n_per_axis; ++j) {
            rule.nodes.push_back(center + Point(half_side * gl.nodes[static_cast<std::size_t>(i)],
                                                half_side * gl.nodes[static_cast<std::size_t>(j)]));
            rule.weights.push_back(half_side * half_side * gl.weights[static_cast<std::size_t>(i)] *
                                   gl.weights[static_cast<std::size_t>(j)]);
        }
    }
    return rule;
}

}  // namespace focklab
