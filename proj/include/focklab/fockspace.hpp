#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "focklab/common.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/weights.hpp"

namespace focklab {

/// Orthonormal basis e_0, ..., e_{N-1} of the polynomials of degree < N inside A^2_phi,
/// the space of entire f with  ||f||^2 = \int |f|^2 e^{-2 phi} dm < infinity.
///
/// The basis is stored through its weighted evaluations  ẽ_k(z) = e_k(z) e^{-phi(z)},
/// which stay bounded; e_k itself overflows quickly off the origin. Internally
///
///   e_k = sum_{j <= k} T(j, k) u_j,   u_j(z) = sqrt(beta^{j+1} / (pi j!)) z^j,
///
/// where beta is the reference curvature of the weight (so T = I for a Gaussian),
/// and u_j e^{-phi} is evaluated in log-magnitude + phase form.
class OrthoBasis {
public:
    /// Orthonormalizes the weighted monomials on the nodes of `quad` (Householder QR).
    /// Throws NumericError if the discrete Gram is numerically singular.
    static std::shared_ptr<const OrthoBasis> build(const Weight& w, int degree,
                                                   std::shared_ptr<const QuadratureRule> quad);
    /// Convenience: builds the quadrature with build_quadrature(w, degree) first.
    static std::shared_ptr<const OrthoBasis> build(const Weight& w, int degree);

    int degree() const { return degree_; }
    const Weight& weight() const { return weight_; }
    /// Upper-triangular coefficients of e_k in the scaled monomials u_j.
    const MatrixXc& transform() const { return transform_; }
    /// log of the per-degree scale factors of u_j.
    const Eigen::VectorXd& log_scaling() const { return log_scale_; }
    const QuadratureRule& quadrature() const { return *quad_; }

    /// (ẽ_0(z), ..., ẽ_{N-1}(z)).
    VectorXc weighted(Point z) const;
    /// Row j holds weighted(points[j])^T.
    MatrixXc weighted_matrix(std::span<const Point> points) const;
    /// Weighted value f(z) e^{-phi(z)} of f = sum_k coeffs_k e_k.
    Complex weighted_value(const VectorXc& coeffs, Point z) const;
    /// log|f(z)| for f = sum_k coeffs_k e_k (may be -inf).
    double log_abs_value(const VectorXc& coeffs, Point z) const;
    /// sum_i w_i ẽ(z_i) over the nodes of `rule`, i.e. \int ẽ_k dm over its region.
    VectorXc integrate_weighted(const QuadratureRule& rule) const;
    /// Weighted scaled-monomial values of `points`, one row per point; multiply by
    /// transform() to get weighted_matrix(points).
    MatrixXc weighted_monomial_matrix(std::span<const Point> points) const;

    /// Radius sqrt(N / (2m)) - 1 of the disk where the degree-N model has saturated
    /// (clamped at 0).
    double bulk_radius() const;

private:
    OrthoBasis(Weight w, int degree, std::shared_ptr<const QuadratureRule> quad);
    /// Weighted scaled monomials u_j(z) e^{-phi(z)}.
    VectorXc weighted_monomials(Point z) const;

    Weight weight_;
    int degree_;
    std::shared_ptr<const QuadratureRule> quad_;
    MatrixXc transform_;
    Eigen::VectorXd log_scale_;
};

/// Bulk radius convention sqrt(N / (2m)) - 1 for a weight with lower curvature m.
double bulk_radius(const Weight& w, int degree);

/// Reproducing kernel K(z, w) of A^2_phi, either truncated to the degree-N model
/// (sum_k e_k(z) conj(e_k(w))) or in closed form (alpha/pi) e^{alpha z conj(w)}
/// for a Gaussian weight.
class KernelEvaluator {
public:
    enum class Mode { truncated, gaussian_closed_form };

    static KernelEvaluator truncated(std::shared_ptr<const OrthoBasis> basis);
    /// Throws PreconditionError unless the weight is Gaussian.
    static KernelEvaluator gaussian_closed_form(const Weight& w);

    Mode mode() const { return mode_; }
    const Weight& weight() const { return weight_; }
    /// Null in closed-form mode.
    const std::shared_ptr<const OrthoBasis>& basis() const { return basis_; }

    Complex kernel(Point z, Point w) const;
    /// K(z, w) e^{-phi(z) - phi(w)}, computed without forming K.
    Complex weighted_kernel(Point z, Point w) const;
    double weighted_diagonal(Point z) const;

    /// Gram matrix [K̃(p_i, p_j)].
    MatrixXc weighted_gram(std::span<const Point> points) const;

private:
    KernelEvaluator(Mode mode, Weight w, std::shared_ptr<const OrthoBasis> basis, double alpha);

    Mode mode_;
    Weight weight_;
    std::shared_ptr<const OrthoBasis> basis_;
    double alpha_ = 0.0;
};

[[nodiscard]] inline Complex kernel(const KernelEvaluator& k, Point z, Point w) { return k.kernel(z, w); }
[[nodiscard]] inline Complex weighted_kernel(const KernelEvaluator& k, Point z, Point w) {
    return k.weighted_kernel(z, w);
}

struct DiagBounds {
    double c_min;
    double C_max;
};

/// min and max of K̃(z, z) over the grid. Throws NumericError if c_min <= 0.
DiagBounds diag_bounds_scan(const KernelEvaluator& k, std::span<const Point> grid);

/// Envelope fit log|K̃| <= log C - c d.
struct DecayFit {
    double c;
    double C;
    /// RMS residual of the least-squares line through the per-separation maxima.
    double residual;
};

struct DecaySample {
    double distance;
    double log_magnitude;
};

/// Fits the upper envelope of (distance, log magnitude) samples: samples are binned by
/// distance, the least-squares line goes through the per-bin maxima, and log C is then
/// raised until every sample lies below the line. Throws PreconditionError when the
/// distances have no spread and, if `require_decay`, NumericError when the fitted rate
/// is not positive.
DecayFit envelope_fit(std::span<const DecaySample> samples, int bins = 16, bool require_decay = true);

/// envelope_fit applied to |K̃(z, w)| over the given pairs.
DecayFit decay_fit(const KernelEvaluator& k, std::span<const std::pair<Point, Point>> pairs);

/// \int_{B_r(center)} K(w, w) e^{-2 phi(w)} dm(w). In truncated mode the disk must
/// lie inside the basis quadrature extent.
double bergman_mass(const KernelEvaluator& k, Point center, double radius);

struct DiagRatioReport {
    double expected;       ///< 1 + delta for Gaussian weights, NaN otherwise
    double max_deviation;  ///< max |ratio - expected| (Gaussian) or max - min (others)
    double min_ratio;
    double max_ratio;
};

/// Ratio K̃_{(1+delta) phi}(z, z) / K̃_phi(z, z) over the grid. Gaussian weights use
/// the closed-form kernels, other weights degree-N truncations.
DiagRatioReport scaled_diag_ratio(const Weight& w, double delta, std::span<const Point> grid,
                                  int degree = 60);

/// Local Bernstein-type ratio |f(z)|^2 e^{-2 phi(z)} / \int_{B_1(z)} |f|^2 e^{-2 phi} dm.
double bernstein_ratio(const OrthoBasis& basis, const VectorXc& coeffs, Point z);

/// Max of bernstein_ratio over grid points and `trials` random coefficient vectors
/// (complex Gaussian entries, deterministic in `seed`). Zero vectors are skipped.
double bernstein_diagnostic(const OrthoBasis& basis, int trials, std::span<const Point> grid,
                            std::uint64_t seed = 1);

/// per_axis x per_axis square grid over [-radius, radius]^2 clipped to the closed disk B_radius(0).
std::vector<Point> disk_grid(double radius, int per_axis);

}  // namespace focklab
