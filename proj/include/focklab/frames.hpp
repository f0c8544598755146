#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "focklab/common.hpp"
#include "focklab/fekete.hpp"
#include "focklab/fockspace.hpp"
#include "focklab/pointsets.hpp"
#include "focklab/weights.hpp"

namespace focklab {

enum class FrameKind { sampling, riesz, localized_frame };

const char* to_string(FrameKind kind);

struct FrameReport {
    double lower = 0.0;
    double upper = 0.0;
    int N = 0;
    /// Radius of the disk the points (or cells) were restricted to.
    double region_radius = 0.0;
    std::size_t set_size = 0;
    FrameKind kind = FrameKind::sampling;
    /// Points of the input dropped by the restriction.
    std::size_t dropped = 0;
    /// False when fewer than N points survive, so lower = 0 trivially.
    bool sampling_at_N = true;
};

/// Extreme squared singular values (sigma_min^2, sigma_max^2) of a sample matrix, with
/// sigma_min = 0 when it has fewer rows than columns.
std::pair<double, double> stability_constants(const MatrixXc& samples);

/// p = 2 stability constants of S for the degree-N model: points outside B_{R_N + margin}
/// are dropped, then A = sigma_min^2 and B = sigma_max^2 of the collocation matrix.
/// Fewer than N surviving points gives A = 0 with sampling_at_N = false.
FrameReport sampling_bounds(const OrthoBasis& basis, const PointSet& S, double margin = 2.0);

/// Extreme eigenvalues of the diagonal-normalized Gram [K̃(lambda, mu)] (Riesz bounds of
/// the normalized kernel system). Throws PreconditionError on duplicate points.
FrameReport interpolation_lower_bound(const KernelEvaluator& k, const PointSet& S);

/// F_gamma = P(delta^{-2} 1_{gamma + delta I}), I = [-1/2, 1/2]^2, for gamma in delta Z^2
/// inside the cover disk. coeffs(k, gamma) = <F_gamma, ẽ_k> coordinates, so
/// F_gamma = sum_k coeffs(k, gamma) ẽ_k.
struct LocalizedFrame {
    double delta = 0.0;
    double cover_radius = 0.0;
    std::vector<Point> gamma_nodes;
    MatrixXc coeffs;
    std::shared_ptr<const OrthoBasis> basis;
    /// Gauss-Legendre nodes per axis in each cell.
    int cell_nodes = 0;
};

/// Cover radius used when none is given: sqrt(N / (2m)) + 2, beyond which the degree-N
/// model carries negligible mass.
double default_cover_radius(const OrthoBasis& basis);

/// Requires 0 < delta < sqrt(2). Throws NumericError when the cell rule disagrees with a
/// finer one by more than 1e-9 relative.
LocalizedFrame build_localized_frame(std::shared_ptr<const OrthoBasis> basis, double delta,
                                     std::optional<double> cover_radius = std::nullopt);

/// Extreme eigenvalues of delta^2 C^* C where C(gamma, k) = <ẽ_k, F_gamma>, i.e. the
/// frame bounds of {F_gamma} on the model scaled so that a perfect partition gives 1.
FrameReport localized_frame_bounds(const LocalizedFrame& lf);

/// ||f - f̃|| / ||f|| on the union of the cells for each column of `coeffs` (functions
/// f = sum_k coeffs_k e_k), where f̃ is the cellwise average of f.
std::vector<double> reconstruction_ratios(const LocalizedFrame& lf, const MatrixXc& coeffs);

/// Envelope fit of |F_gamma(z)| against |z - gamma| over the grid.
DecayFit localized_frame_envelope(const LocalizedFrame& lf, std::size_t gamma_index, std::span<const Point> grid);

enum class Norm { l1, l2, linf };

const char* to_string(Norm q);

struct WienerOptions {
    std::uint64_t seed = 1;
    int restarts = 64;
    /// Extra starting vectors c for the l1 / linf searches (e.g. witnesses of a related probe).
    std::vector<VectorXc> warm_starts;
};

struct WienerEstimate {
    Norm q;
    /// inf ||APc||_q / ||Pc||_q: exact for l2, an upper estimate otherwise.
    double estimate;
    bool certified;
    /// Starting vectors searched (0 for l2).
    int trials;
    /// Minimizing c (l1 / linf only).
    VectorXc witness;
};

/// Lower-bound probe of A on the range of the idempotent P. Throws PreconditionError if
/// the shapes disagree or ||P^2 - P|| > 1e-10 (max entry, relative to max(1, ||P||)).
std::vector<WienerEstimate> wiener_probe(const MatrixXc& A, const MatrixXc& P, std::span<const Norm> norms,
                                         const WienerOptions& options = {});

struct DeformationRow {
    double a;
    double lower;
    double upper;
    std::size_t set_size;
    bool sampling_at_N;
    /// Points per unit Bergman mass of a S in B_{R_N}(0).
    double density;
};

/// sampling_bounds and the central density of a S for each dilation factor a.
/// The density disk must lie inside every dilated clip disk.
std::vector<DeformationRow> deformation_experiment(std::shared_ptr<const OrthoBasis> basis, const PointSet& S,
                                                   std::span<const double> schedule);

struct SharpReport {
    int N = 0;
    double epsilon = 0.0;
    /// Degree of the (1 - epsilon) phi model the sampling bound uses.
    int sampling_degree = 0;
    PointSet fekete;
    FrameReport interpolation;  ///< under (1 + epsilon) phi
    FrameReport sampling;       ///< under (1 - epsilon) phi
    double density = 0.0;       ///< under phi, in B_{R_N}(0)
    /// Fitted envelope rates of the plain and improved Lagrange functions of the point
    /// nearest the origin. The plain rate may be non-positive.
    double plain_decay = 0.0;
    double improved_decay = 0.0;
    /// max |l̃_lambda(lambda') - delta| over the configuration.
    double improved_delta_error = 0.0;
};

/// Requires 0 < epsilon < 1/2. Matched degree for (1 - epsilon) phi is floor((1 - epsilon) N),
/// which keeps the saturation radius of the sampling model equal to that of the Fekete set.
SharpReport sharp_experiment(const Weight& w, double epsilon, int N, int max_sweeps = 200);

struct TranslationReport {
    /// max | |T_zeta f(z)| e^{-phi(z)} - |f(z - zeta)| e^{-phi(z - zeta)} |.
    double identity_error = 0.0;
    /// max over lambda, z of the covariance defect of weighted kernel sections (complex).
    double covariance_error = 0.0;
};

/// T_zeta f(z) = e^{q(z, zeta)} f(z - zeta), q = alpha z conj(zeta) - alpha |zeta|^2 / 2, for
/// f = sum_k coeffs_k e_k over gaussian(alpha). Covariance is checked for kernel sections
/// at each point of `lambdas`.
TranslationReport gaussian_translation_check(double alpha, Point zeta, const VectorXc& coeffs,
                                             std::span<const Point> grid, std::span<const Point> lambdas);

/// gaussian_translation_check with weight validation: throws PreconditionError unless w is Gaussian.
TranslationReport gaussian_translation_check(const Weight& w, Point zeta, const VectorXc& coeffs,
                                             std::span<const Point> grid, std::span<const Point> lambdas);

}  // namespace focklab
