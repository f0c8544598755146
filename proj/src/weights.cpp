#include "focklab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace focklab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Weight::Weight(Family f) : family_(std::move(f)) {
    std::visit(Overloaded{
                   [this](const Gaussian& g) { m_ = M_ = g.alpha / 2.0; },
                   [this](const PerturbedGaussian& p) {
                       m_ = (p.alpha - p.t) / 2.0;
                       M_ = (p.alpha + p.t) / 2.0;
                   },
                   [this](const Scaled& s) {
                       m_ = s.a * s.inner->m_;
                       M_ = s.a * s.inner->M_;
                   },
               },
               family_);
}

Weight Weight::gaussian(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw PreconditionError("gaussian weight needs alpha > 0");
    }
    return Weight(Gaussian{alpha});
}

Weight Weight::perturbed_gaussian(double alpha, double t) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw PreconditionError("perturbed_gaussian weight needs alpha > 0");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw PreconditionError("perturbed_gaussian weight needs t >= 0");
    }
    return Weight(PerturbedGaussian{alpha, t});
}

Weight Weight::scaled(double a, const Weight& inner) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw PreconditionError("scaled weight needs a > 0");
    }
    return Weight(Scaled{a, std::make_shared<const Weight>(inner)});
}

double Weight::phi(Point z) const {
    return std::visit(Overloaded{
                          [z](const Gaussian& g) { return g.alpha * std::norm(z) / 2.0; },
                          [z](const PerturbedGaussian& p) {
                              return p.alpha * std::norm(z) / 2.0 +
                                     p.t * std::sin(z.real()) * std::sin(z.imag());
                          },
                          [z](const Scaled& s) { return s.a * s.inner->phi(z); },
                      },
                      family_);
}

double Weight::laplacian(Point z) const {
    return std::visit(Overloaded{
                          [](const Gaussian& g) { return 2.0 * g.alpha; },
                          [z](const PerturbedGaussian& p) {
                              return 2.0 * p.alpha -
                                     2.0 * p.t * std::sin(z.real()) * std::sin(z.imag());
                          },
                          [z](const Scaled& s) { return s.a * s.inner->laplacian(z); },
                      },
                      family_);
}

bool Weight::is_radial() const { return gaussian_alpha().has_value(); }

std::optional<double> Weight::gaussian_alpha() const {
    return std::visit(Overloaded{
                          [](const Gaussian& g) -> std::optional<double> { return g.alpha; },
                          [](const PerturbedGaussian& p) -> std::optional<double> {
                              if (p.t == 0.0) return p.alpha;
                              return std::nullopt;
                          },
                          [](const Scaled& s) -> std::optional<double> {
                              auto inner = s.inner->gaussian_alpha();
                              if (!inner) return std::nullopt;
                              return s.a * *inner;
                          },
                      },
                      family_);
}

double Weight::deviation_bound() const {
    return std::visit(Overloaded{
                          [](const Gaussian&) { return 0.0; },
                          [](const PerturbedGaussian& p) { return p.t; },
                          [](const Scaled& s) { return s.a * s.inner->deviation_bound(); },
                      },
                      family_);
}

std::string Weight::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&os](const Gaussian& g) { os << "gaussian(" << g.alpha << ")"; },
                   [&os](const PerturbedGaussian& p) {
                       os << "perturbed_gaussian(" << p.alpha << ", " << p.t << ")";
                   },
                   [&os](const Scaled& s) { os << "scaled(" << s.a << ", " << s.inner->describe() << ")"; },
               },
               family_);
    return os.str();
}

std::vector<Point> ValidationGrid::points() const {
    if (nx < 1 || ny < 1) throw PreconditionError("validation grid must be nonempty");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
        const double x = nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1);
            out.emplace_back(x, y);
        }
    }
    return out;
}

BoundsReport validate_bounds(const Weight& w, const ValidationGrid& grid) {
    const auto pts = grid.points();
    const double m = w.lower_curvature();
    const double M = w.upper_curvature();
    // Relative slack for rounding in the scaled family (a * 2 alpha / 4 vs a * alpha / 2).
    const double slack = 1e-12 * std::max(1.0, std::abs(M));

    BoundsReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const Point z : pts) {
        const double q = w.laplacian(z) / 4.0;
        const double margin = std::min(q - m, M - q);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_point = z;
        }
        const bool bad = q <= 0.0 || margin < -slack;
        if (bad && !rep.offending_point) rep.offending_point = z;
    }
    if (std::abs(rep.worst_margin) <= slack) rep.worst_margin = 0.0;

    std::ostringstream os;
    if (rep.offending_point) {
        rep.pass = false;
        os << "curvature sandwich violated at (" << rep.offending_point->real() << ", "
           << rep.offending_point->imag() << ")";
    } else if (!(m > 0.0) || m > M) {
        rep.pass = false;
        rep.offending_point = rep.worst_point;
        os << "curvature bounds not admissible: m = " << m << ", M = " << M;
    } else {
        os << "ok";
    }
    rep.message = os.str();
    return rep;
}

}  // namespace focklab
