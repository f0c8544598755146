#pragma once

#include <vector>

#include "focklab/common.hpp"
#include "focklab/weights.hpp"

namespace focklab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);
};

/// Discretization of Lebesgue measure dm on a planar region. The weight
/// e^{-2 phi} is not folded into `weights`; callers apply it.
struct QuadratureRule {
    enum class Kind { radial_polar, tensor_square, disk, cell };

    std::vector<Point> nodes;
    std::vector<double> weights;
    Kind kind = Kind::radial_polar;
    /// Outer radius (polar and disk kinds) or half side (square kinds).
    double extent = 0.0;
    Point center{};

    std::size_t size() const { return nodes.size(); }
    bool contains(Point center, double radius) const;
};

/// Options of build_quadrature. `refinement` multiplies the node counts.
struct QuadratureOptions {
    double refinement = 1.0;
    /// Relative tail mass of |z|^{2(N-1)} e^{-2 phi} allowed outside the extent.
    double tail_tolerance = 1e-16;
    /// The extent search gives up once reference_alpha * extent^2 exceeds this.
    double extent_cap = 4000.0;
};

/// Rule for the weighted inner product of degree-N models: polar
/// (Gauss-Legendre in r, uniform in angle) for radial weights, tensor
/// Gauss-Legendre on [-L, L]^2 otherwise.
QuadratureRule build_quadrature(const Weight& w, int degree, const QuadratureOptions& opt = {});

/// Radius beyond which |z|^{2(N-1)} e^{-2 phi} carries relative mass below `tail_tolerance`.
double quadrature_extent(const Weight& w, int degree, const QuadratureOptions& opt = {});

/// Polar Gauss rule for the closed disk of the given center and radius.
QuadratureRule disk_rule(Point center, double radius, int n_radial, int n_angular);

/// Tensor Gauss rule for the square center + [-h, h]^2.
QuadratureRule square_rule(Point center, double half_side, int n_per_axis);

}  // namespace focklab
