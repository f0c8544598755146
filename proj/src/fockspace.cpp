#include "focklab/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace focklab {

OrthoBasis::OrthoBasis(Weight w, int degree, std::shared_ptr<const QuadratureRule> quad)
    : weight_(std::move(w)), degree_(degree), quad_(std::move(quad)) {
    const double beta = weight_.reference_alpha();
    log_scale_.resize(degree_);
    for (int j = 0; j < degree_; ++j) {
        log_scale_(j) = 0.5 * ((j + 1.0) * std::log(beta) - std::log(kPi) - std::lgamma(j + 1.0));
    }
}

VectorXc OrthoBasis::weighted_monomials(Point z) const {
    VectorXc u(degree_);
    const double phi = weight_.phi(z);
    const double r = std::abs(z);
    if (r == 0.0) {
        u.setZero();
        u(0) = std::exp(log_scale_(0) - phi);
        return u;
    }
    const double logr = std::log(r);
    const Point unit = z / r;
    Point phase(1.0, 0.0);
    for (int j = 0; j < degree_; ++j) {
        u(j) = std::exp(j * logr + log_scale_(j) - phi) * phase;
        phase *= unit;
    }
    return u;
}

VectorXc OrthoBasis::weighted(Point z) const {
    return transform_.transpose().triangularView<Eigen::Lower>() * weighted_monomials(z);
}

MatrixXc OrthoBasis::weighted_monomial_matrix(std::span<const Point> points) const {
    MatrixXc U(static_cast<Eigen::Index>(points.size()), degree_);
    for (std::size_t i = 0; i < points.size(); ++i) {
        U.row(static_cast<Eigen::Index>(i)) = weighted_monomials(points[i]).transpose();
    }
    return U;
}

MatrixXc OrthoBasis::weighted_matrix(std::span<const Point> points) const {
    return weighted_monomial_matrix(points) * transform_.triangularView<Eigen::Upper>();
}

VectorXc OrthoBasis::integrate_weighted(const QuadratureRule& rule) const {
    VectorXc acc = VectorXc::Zero(degree_);
    for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * weighted_monomials(rule.nodes[i]);
    return transform_.transpose().triangularView<Eigen::Lower>() * acc;
}

Complex OrthoBasis::weighted_value(const VectorXc& coeffs, Point z) const {
    if (coeffs.size() != degree_) throw PreconditionError("coefficient vector has wrong length");
    return weighted(z).transpose() * coeffs;
}

double OrthoBasis::log_abs_value(const VectorXc& coeffs, Point z) const {
    return std::log(std::abs(weighted_value(coeffs, z))) + weight_.phi(z);
}

double bulk_radius(const Weight& w, int degree) {
    return std::max(0.0, std::sqrt(degree / (2.0 * w.lower_curvature())) - 1.0);
}

double OrthoBasis::bulk_radius() const { return focklab::bulk_radius(weight_, degree_); }

std::shared_ptr<const OrthoBasis> OrthoBasis::build(const Weight& w, int degree) {
    return build(w, degree, std::make_shared<const QuadratureRule>(build_quadrature(w, degree)));
}

std::shared_ptr<const OrthoBasis> OrthoBasis::build(const Weight& w, int degree,
                                                    std::shared_ptr<const QuadratureRule> quad) {
    if (degree < 1) throw PreconditionError("basis needs degree N >= 1");
    if (!quad || quad->size() < static_cast<std::size_t>(degree)) {
        throw PreconditionError("quadrature has fewer nodes than basis functions");
    }
    auto basis = std::shared_ptr<OrthoBasis>(new OrthoBasis(w, degree, std::move(quad)));
    const auto& q = *basis->quad_;
    const auto n = static_cast<Eigen::Index>(q.size());

    MatrixXc V(n, degree);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        V.row(i) = std::sqrt(q.weights[idx]) * basis->weighted_monomials(q.nodes[idx]).transpose();
    }
    Eigen::HouseholderQR<MatrixXc> qr(V);
    MatrixXc R = qr.matrixQR().topRows(degree).triangularView<Eigen::Upper>();

    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < degree; ++k) {
        const double a = std::abs(R(k, k));
        dmax = std::max(dmax, a);
        dmin = std::min(dmin, a);
        if (a > 0.0) R.row(k) *= std::conj(R(k, k)) / a;  // positive real diagonal
    }
    if (!(dmin > 1e-13 * dmax)) {
        throw NumericError("discrete Gram is numerically singular; N = " + std::to_string(degree) +
                           " is too large for the quadrature");
    }
    MatrixXc T = MatrixXc::Identity(degree, degree);
    R.triangularView<Eigen::Upper>().solveInPlace(T);
    basis->transform_ = T.triangularView<Eigen::Upper>();
    return basis;
}

KernelEvaluator::KernelEvaluator(Mode mode, Weight w, std::shared_ptr<const OrthoBasis> basis, double alpha)
    : mode_(mode), weight_(std::move(w)), basis_(std::move(basis)), alpha_(alpha) {}

KernelEvaluator KernelEvaluator::truncated(std::shared_ptr<const OrthoBasis> basis) {
    if (!basis) throw PreconditionError("truncated kernel needs a basis");
    Weight w = basis->weight();
    return KernelEvaluator(Mode::truncated, std::move(w), std::move(basis), 0.0);
}

KernelEvaluator KernelEvaluator::gaussian_closed_form(const Weight& w) {
    const auto alpha = w.gaussian_alpha();
    if (!alpha) throw PreconditionError("closed-form kernel needs a Gaussian weight, got " + w.describe());
    return KernelEvaluator(Mode::gaussian_closed_form, w, nullptr, *alpha);
}

Complex KernelEvaluator::kernel(Point z, Point w) const {
    if (mode_ == Mode::gaussian_closed_form) {
        return (alpha_ / kPi) * std::exp(alpha_ * z * std::conj(w));
    }
    return weighted_kernel(z, w) * std::exp(weight_.phi(z) + weight_.phi(w));
}

Complex KernelEvaluator::weighted_kernel(Point z, Point w) const {
    if (mode_ == Mode::gaussian_closed_form) {
        const Complex expo = alpha_ * z * std::conj(w) - 0.5 * alpha_ * (std::norm(z) + std::norm(w));
        return (alpha_ / kPi) * std::exp(expo);
    }
    const VectorXc ez = basis_->weighted(z);
    const VectorXc ew = basis_->weighted(w);
    Complex s = 0.0;
    for (Eigen::Index k = 0; k < ez.size(); ++k) s += ez(k) * std::conj(ew(k));
    return s;
}

double KernelEvaluator::weighted_diagonal(Point z) const {
    if (mode_ == Mode::gaussian_closed_form) return alpha_ / kPi;
    return basis_->weighted(z).squaredNorm();
}

MatrixXc KernelEvaluator::weighted_gram(std::span<const Point> points) const {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (mode_ == Mode::truncated) {
        const MatrixXc E = basis_->weighted_matrix(points);
        return E * E.adjoint();
    }
    MatrixXc G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            G(i, j) = weighted_kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
        }
    }
    return G;
}

DiagBounds diag_bounds_scan(const KernelEvaluator& k, std::span<const Point> grid) {
    if (grid.empty()) throw PreconditionError("diagonal scan needs a nonempty grid");
    DiagBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point z : grid) {
        const double d = k.weighted_diagonal(z);
        b.c_min = std::min(b.c_min, d);
        b.C_max = std::max(b.C_max, d);
    }
    if (!(b.c_min > 0.0)) {
        throw NumericError("weighted kernel diagonal is not positive on the grid; truncation too small");
    }
    return b;
}

DecayFit envelope_fit(std::span<const DecaySample> samples, int bins, bool require_decay) {
    std::vector<DecaySample> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) {
        if (std::isfinite(s.log_magnitude) && std::isfinite(s.distance)) pts.push_back(s);
    }
    if (pts.size() < 2) throw PreconditionError("decay fit needs at least two finite samples");
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                        [](const auto& a, const auto& b) { return a.distance < b.distance; });
    const double dmin = lo->distance;
    const double dmax = hi->distance;
    if (!(dmax - dmin > 1e-12 * std::max(1.0, dmax))) {
        throw PreconditionError("decay fit needs a spread of separations");
    }

    // Per-bin maxima form the envelope the line is fit to.
    const double width = (dmax - dmin) / bins;
    std::vector<std::optional<DecaySample>> top(static_cast<std::size_t>(bins));
    for (const auto& s : pts) {
        auto b = static_cast<std::size_t>(std::min(bins - 1, static_cast<int>((s.distance - dmin) / width)));
        if (!top[b] || s.log_magnitude > top[b]->log_magnitude) top[b] = s;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& t : top) {
        if (!t) continue;
        sx += t->distance;
        sy += t->log_magnitude;
        sxx += t->distance * t->distance;
        sxy += t->distance * t->log_magnitude;
        ++n;
    }
    if (n < 2) throw PreconditionError("decay fit needs separations in at least two bins");
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (const auto& t : top) {
        if (!t) continue;
        const double r = t->log_magnitude - (intercept + slope * t->distance);
        ss += r * r;
    }
    const double c = -slope;
    if (require_decay && !(c > 0.0)) throw NumericError("decay fit rejected: fitted rate is not positive");
    double logC = -std::numeric_limits<double>::infinity();
    for (const auto& s : pts) logC = std::max(logC, s.log_magnitude + c * s.distance);
    return DecayFit{c, std::exp(logC), std::sqrt(ss / n)};
}

DecayFit decay_fit(const KernelEvaluator& k, std::span<const std::pair<Point, Point>> pairs) {
    std::vector<DecaySample> samples;
    samples.reserve(pairs.size());
    for (const auto& [z, w] : pairs) {
        samples.push_back({std::abs(z - w), std::log(std::abs(k.weighted_kernel(z, w)))});
    }
    return envelope_fit(samples);
}

double bergman_mass(const KernelEvaluator& k, Point center, double radius) {
    if (radius < 0.0) throw PreconditionError("disk radius must be >= 0");
    if (radius == 0.0) return 0.0;
    if (k.mode() == KernelEvaluator::Mode::gaussian_closed_form) {
        // The weighted diagonal is constant; the disk rule integrates it exactly.
        const auto rule = disk_rule(center, radius, 4, 4);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * k.weighted_diagonal(rule.nodes[i]);
        return s;
    }
    if (!k.basis()->quadrature().contains(center, radius)) {
        throw PreconditionError("disk escapes the quadrature extent of the basis");
    }
    const double beta = k.weight().reference_alpha();
    const int n_r = static_cast<int>(std::ceil(16.0 + 4.0 * radius * std::sqrt(beta)));
    const auto rule = disk_rule(center, radius, n_r, 2 * n_r + k.basis()->degree());
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * k.weighted_diagonal(rule.nodes[i]);
    return s;
}

DiagRatioReport scaled_diag_ratio(const Weight& w, double delta, std::span<const Point> grid, int degree) {
    if (!(std::abs(delta) < 0.25)) throw PreconditionError("scaled_diag_ratio needs |delta| < 1/4");
    if (grid.empty()) throw PreconditionError("scaled_diag_ratio needs a nonempty grid");
    const Weight ws = Weight::scaled(1.0 + delta, w);
    const bool gaussian = w.gaussian_alpha().has_value();
    const KernelEvaluator base = gaussian ? KernelEvaluator::gaussian_closed_form(w)
                                          : KernelEvaluator::truncated(OrthoBasis::build(w, degree));
    const KernelEvaluator scaled = gaussian ? KernelEvaluator::gaussian_closed_form(ws)
                                            : KernelEvaluator::truncated(OrthoBasis::build(ws, degree));
    DiagRatioReport rep{gaussian ? 1.0 + delta : std::numeric_limits<double>::quiet_NaN(), 0.0,
                        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point z : grid) {
        const double r = scaled.weighted_diagonal(z) / base.weighted_diagonal(z);
        rep.min_ratio = std::min(rep.min_ratio, r);
        rep.max_ratio = std::max(rep.max_ratio, r);
        if (gaussian) rep.max_deviation = std::max(rep.max_deviation, std::abs(r - rep.expected));
    }
    if (!gaussian) rep.max_deviation = rep.max_ratio - rep.min_ratio;
    return rep;
}

namespace {

constexpr int kUnitDiskRadial = 24;
constexpr int kUnitDiskAngular = 48;

}  // namespace

double bernstein_ratio(const OrthoBasis& basis, const VectorXc& coeffs, Point z) {
    const auto rule = disk_rule(z, 1.0, kUnitDiskRadial, kUnitDiskAngular);
    const VectorXc vals = basis.weighted_matrix(rule.nodes) * coeffs;
    double local = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) local += rule.weights[i] * std::norm(vals(static_cast<Eigen::Index>(i)));
    return std::norm(basis.weighted_value(coeffs, z)) / local;
}

double bernstein_diagnostic(const OrthoBasis& basis, int trials, std::span<const Point> grid, std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("bernstein_diagnostic needs trials >= 1");
    const int N = basis.degree();
    std::vector<MatrixXc> disks;
    std::vector<Eigen::VectorXd> disk_weights;
    MatrixXc at_center = basis.weighted_matrix(grid);
    disks.reserve(grid.size());
    for (const Point z : grid) {
        const auto rule = disk_rule(z, 1.0, kUnitDiskRadial, kUnitDiskAngular);
        disks.push_back(basis.weighted_matrix(rule.nodes));
        disk_weights.push_back(Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                                  static_cast<Eigen::Index>(rule.size())));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        VectorXc a(N);
        for (int k = 0; k < N; ++k) a(k) = Complex(normal(rng), normal(rng));
        if (a.squaredNorm() == 0.0) continue;
        const VectorXc centers = at_center * a;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const VectorXc vals = disks[g] * a;
            const double local = disk_weights[g].dot(vals.cwiseAbs2());
            if (local > 0.0) best = std::max(best, std::norm(centers(static_cast<Eigen::Index>(g))) / local);
        }
    }
    return best;
}

std::vector<Point> disk_grid(double radius, int per_axis) {
    std::vector<Point> out;
    if (per_axis < 1) return out;
    for (int i = 0; i < per_axis; ++i) {
        const double x = per_axis == 1 ? 0.0 : -radius + 2.0 * radius * i / (per_axis - 1);
        for (int j = 0; j < per_axis; ++j) {
            const double y = per_axis == 1 ? 0.0 : -radius + 2.0 * radius * j / (per_axis - 1);
            if (x * x + y * y <= radius * radius * (1.0 + 1e-12)) out.emplace_back(x, y);
        }
    }
    return out;
}

}  // namespace focklab
