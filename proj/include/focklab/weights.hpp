#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "focklab/common.hpp"

namespace focklab {

/// Subharmonic weight phi on the plane together with its curvature sandwich
///   m <= Laplacian(phi)/4 <= M.
///
/// Three families are built in:
///   gaussian(alpha)               phi = alpha |z|^2 / 2
///   perturbed_gaussian(alpha, t)  phi = alpha |z|^2 / 2 + t sin(x) sin(y)
///   scaled(a, W)                  phi = a phi_W
///
/// Weights are immutable values; copies share the inner weight of a scaled family.
class Weight {
public:
    struct Gaussian {
        double alpha;
    };
    struct PerturbedGaussian {
        double alpha;
        double t;
    };
    struct Scaled {
        double a;
        std::shared_ptr<const Weight> inner;
    };
    using Family = std::variant<Gaussian, PerturbedGaussian, Scaled>;

    /// Throws PreconditionError unless alpha > 0.
    static Weight gaussian(double alpha);
    /// Requires alpha > 0 and t >= 0. Admissibility (t < alpha) is left to validate_bounds.
    static Weight perturbed_gaussian(double alpha, double t);
    /// Requires a > 0.
    static Weight scaled(double a, const Weight& inner);

    const Family& family() const { return family_; }

    double phi(Point z) const;
    double laplacian(Point z) const;

    /// Curvature bounds of Laplacian(phi)/4.
    double lower_curvature() const { return m_; }
    double upper_curvature() const { return M_; }

    bool is_radial() const;

    /// alpha such that the weight equals alpha |z|^2 / 2, if it is Gaussian (possibly scaled).
    std::optional<double> gaussian_alpha() const;

    /// Curvature of the Gaussian the weight oscillates around; m + M.
    double reference_alpha() const { return m_ + M_; }

    /// Constant c with |phi(z) - reference_alpha |z|^2 / 2| <= c for every z.
    double deviation_bound() const;

    std::string describe() const;

private:
    explicit Weight(Family f);

    Family family_;
    double m_ = 0.0;
    double M_ = 0.0;
};

[[nodiscard]] inline double eval_phi(const Weight& w, Point z) { return w.phi(z); }
[[nodiscard]] inline double eval_laplacian(const Weight& w, Point z) { return w.laplacian(z); }

/// Rectangular grid of test points, n_x by n_y over [x0,x1] x [y0,y1].
struct ValidationGrid {
    double x0 = -5.0, x1 = 5.0, y0 = -5.0, y1 = 5.0;
    int nx = 101, ny = 101;

    std::vector<Point> points() const;
};

struct BoundsReport {
    bool pass = true;
    /// min over the grid of min(Lap/4 - m, M - Lap/4); negative when violated.
    double worst_margin = 0.0;
    Point worst_point{};
    /// First grid point where the sandwich (or positivity of the curvature) fails.
    std::optional<Point> offending_point;
    std::string message;
};

/// Checks 0 < m <= Laplacian(phi)(z)/4 <= M on every grid point.
BoundsReport validate_bounds(const Weight& w, const ValidationGrid& grid = {});

}  // namespace focklab
