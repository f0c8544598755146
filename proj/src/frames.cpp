#include "focklab/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "focklab/parallel.hpp"
#include "focklab/quadrature.hpp"

namespace focklab {

const char* to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::sampling: return "sampling";
        case FrameKind::riesz: return "riesz";
        case FrameKind::localized_frame: return "localized_frame";
    }
    return "?";
}

const char* to_string(Norm q) {
    switch (q) {
        case Norm::l1: return "1";
        case Norm::l2: return "2";
        case Norm::linf: return "inf";
    }
    return "?";
}

std::pair<double, double> stability_constants(const MatrixXc& samples) {
    if (samples.rows() == 0 || samples.cols() == 0) return {0.0, 0.0};
    const Eigen::JacobiSVD<MatrixXc> svd(samples);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    const double smin = samples.rows() < samples.cols() ? 0.0 : s(s.size() - 1);
    return {smin * smin, smax * smax};
}

FrameReport sampling_bounds(const OrthoBasis& basis, const PointSet& S, double margin) {
    if (!(margin >= 0.0)) throw PreconditionError("sampling margin must be >= 0");
    FrameReport r;
    r.kind = FrameKind::sampling;
    r.N = basis.degree();
    r.region_radius = basis.bulk_radius() + margin;
    const PointSet kept = restrict_to_disk(S, r.region_radius);
    r.set_size = kept.size();
    r.dropped = S.size() - kept.size();
    std::tie(r.lower, r.upper) = stability_constants(basis.weighted_matrix(kept.points));
    r.sampling_at_N = static_cast<int>(kept.size()) >= r.N && r.lower > 0.0;
    return r;
}

FrameReport interpolation_lower_bound(const KernelEvaluator& k, const PointSet& S) {
    if (S.empty()) throw PreconditionError("interpolation bound needs at least one point");
    if (S.size() >= 2 && separation(S) == 0.0) throw PreconditionError("point set has duplicate points");
    const MatrixXc G = k.weighted_gram(S.points);
    Eigen::VectorXd d(G.rows());
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
        d(i) = G(i, i).real();
        if (!(d(i) > 0.0)) throw NumericError("kernel diagonal vanishes at a point of the set");
        d(i) = 1.0 / std::sqrt(d(i));
    }
    const MatrixXc H = d.asDiagonal() * G * d.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(H, Eigen::EigenvaluesOnly);
    FrameReport r;
    r.kind = FrameKind::riesz;
    r.N = k.basis() ? k.basis()->degree() : 0;
    r.set_size = S.size();
    for (const Point p : S.points) r.region_radius = std::max(r.region_radius, std::abs(p));
    r.lower = std::max(0.0, eig.eigenvalues()(0));
    r.upper = eig.eigenvalues()(eig.eigenvalues().size() - 1);
    return r;
}

double default_cover_radius(const OrthoBasis& basis) {
    return std::sqrt(basis.degree() / (2.0 * basis.weight().lower_curvature())) + 2.0;
}

namespace {

/// Offsets and weights of an n x n Gauss rule on the cell delta I.
struct CellRule {
    std::vector<Point> offsets;
    std::vector<double> weights;

    CellRule(double delta, int n) {
        const auto sq = square_rule(0.0, delta / 2.0, n);
        offsets = sq.nodes;
        weights = sq.weights;
    }

    std::vector<Point> nodes_at(Point gamma) const {
        std::vector<Point> out(offsets.size());
        for (std::size_t i = 0; i < offsets.size(); ++i) out[i] = gamma + offsets[i];
        return out;
    }
};

/// Row of \int_cell (weighted scaled monomials); multiply by T to get \int_cell ẽ_k.
Eigen::RowVectorXcd cell_monomial_integral(const OrthoBasis& basis, const CellRule& rule, Point gamma) {
    const auto nodes = rule.nodes_at(gamma);
    const MatrixXc U = basis.weighted_monomial_matrix(nodes);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
    return w.cast<Complex>().transpose() * U;
}

int cell_node_count(double delta, double beta) {
    return std::clamp(static_cast<int>(std::ceil(4.0 + 10.0 * delta * std::sqrt(beta))), 4, 24);
}

}  // namespace

LocalizedFrame build_localized_frame(std::shared_ptr<const OrthoBasis> basis, double delta,
                                     std::optional<double> cover_radius) {
    if (!basis) throw PreconditionError("localized frame needs a basis");
    if (!(delta > 0.0) || !(delta < std::sqrt(2.0))) throw PreconditionError("cell side must lie in (0, sqrt 2)");
    LocalizedFrame lf;
    lf.delta = delta;
    lf.cover_radius = cover_radius ? *cover_radius : default_cover_radius(*basis);
    if (!(lf.cover_radius >= 0.0)) throw PreconditionError("cover radius must be >= 0");
    lf.basis = basis;

    const long jmax = static_cast<long>(std::floor(lf.cover_radius / delta * (1.0 + 1e-12)));
    for (long j = -jmax; j <= jmax; ++j) {
        for (long k = -jmax; k <= jmax; ++k) {
            const Point g(static_cast<double>(j) * delta, static_cast<double>(k) * delta);
            if (std::norm(g) <= lf.cover_radius * lf.cover_radius * (1.0 + 1e-12)) lf.gamma_nodes.push_back(g);
        }
    }

    const double beta = basis->weight().reference_alpha();
    lf.cell_nodes = cell_node_count(delta, beta);
    const CellRule rule(delta, lf.cell_nodes);

    // Resolution check against a finer rule on a central, a mid-radius and the outermost cell.
    {
        const CellRule fine(delta, lf.cell_nodes + 4);
        const double peak = std::sqrt(basis->degree() / (2.0 * basis->weight().lower_curvature()));
        std::vector<Point> probes;
        auto nearest = [&](double radius) {
            return *std::min_element(lf.gamma_nodes.begin(), lf.gamma_nodes.end(), [&](Point a, Point b) {
                return std::abs(std::abs(a) - radius) < std::abs(std::abs(b) - radius);
            });
        };
        probes = {nearest(0.0), nearest(std::min(peak, lf.cover_radius)), nearest(lf.cover_radius)};
        double scale = 0.0, diff = 0.0;
        for (const Point g : probes) {
            const auto a = cell_monomial_integral(*basis, rule, g);
            const auto b = cell_monomial_integral(*basis, fine, g);
            scale = std::max(scale, b.norm());
            diff = std::max(diff, (a - b).norm());
        }
        if (!(diff <= 1e-9 * scale)) throw NumericError("cell quadrature is not resolved");
    }

    const auto G = static_cast<Eigen::Index>(lf.gamma_nodes.size());
    MatrixXc rows(G, basis->degree());
    parallel_for(lf.gamma_nodes.size(), [&](std::size_t i) {
        rows.row(static_cast<Eigen::Index>(i)) = cell_monomial_integral(*basis, rule, lf.gamma_nodes[i]);
    });
    // C(gamma, k) = delta^{-2} \int_cell ẽ_k; F_gamma has coordinates conj(C(gamma, k)).
    const MatrixXc C = (rows * basis->transform().triangularView<Eigen::Upper>()) / (delta * delta);
    lf.coeffs = C.adjoint();
    return lf;
}

FrameReport localized_frame_bounds(const LocalizedFrame& lf) {
    const MatrixXc S = lf.delta * lf.delta * (lf.coeffs * lf.coeffs.adjoint());
    const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(S, Eigen::EigenvaluesOnly);
    FrameReport r;
    r.kind = FrameKind::localized_frame;
    r.N = lf.basis->degree();
    r.region_radius = lf.cover_radius;
    r.set_size = lf.gamma_nodes.size();
    r.lower = std::max(0.0, eig.eigenvalues()(0));
    r.upper = eig.eigenvalues()(eig.eigenvalues().size() - 1);
    return r;
}

std::vector<double> reconstruction_ratios(const LocalizedFrame& lf, const MatrixXc& coeffs) {
    const OrthoBasis& basis = *lf.basis;
    if (coeffs.rows() != basis.degree()) throw PreconditionError("coefficient rows must equal N");
    const Eigen::Index m = coeffs.cols();
    const MatrixXc TF = basis.transform().triangularView<Eigen::Upper>() * coeffs;
    const CellRule rule(lf.delta, lf.cell_nodes);
    const auto G = lf.gamma_nodes.size();
    Eigen::MatrixXd err(static_cast<Eigen::Index>(G), m), nrm(static_cast<Eigen::Index>(G), m);
    const double area = lf.delta * lf.delta;

    parallel_for(G, [&](std::size_t g) {
        const auto nodes = rule.nodes_at(lf.gamma_nodes[g]);
        const MatrixXc V = basis.weighted_monomial_matrix(nodes) * TF;
        for (Eigen::Index j = 0; j < m; ++j) {
            Complex avg = 0.0;
            for (Eigen::Index i = 0; i < V.rows(); ++i) avg += rule.weights[static_cast<std::size_t>(i)] * V(i, j);
            avg /= area;
            double e = 0.0, n = 0.0;
            for (Eigen::Index i = 0; i < V.rows(); ++i) {
                const double w = rule.weights[static_cast<std::size_t>(i)];
                e += w * std::norm(V(i, j) - avg);
                n += w * std::norm(V(i, j));
            }
            err(static_cast<Eigen::Index>(g), j) = e;
            nrm(static_cast<Eigen::Index>(g), j) = n;
        }
    });

    std::vector<double> out(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const double n = nrm.col(j).sum();
        if (!(n > 0.0)) throw PreconditionError("reconstruction ratio of the zero function");
        out[static_cast<std::size_t>(j)] = std::sqrt(err.col(j).sum() / n);
    }
    return out;
}

DecayFit localized_frame_envelope(const LocalizedFrame& lf, std::size_t gamma_index, std::span<const Point> grid) {
    if (gamma_index >= lf.gamma_nodes.size()) throw PreconditionError("cell index out of range");
    const Point g = lf.gamma_nodes[gamma_index];
    const VectorXc values =
        lf.basis->weighted_matrix(grid) * lf.coeffs.col(static_cast<Eigen::Index>(gamma_index));
    std::vector<DecaySample> samples;
    samples.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        samples.push_back({std::abs(grid[i] - g), std::log(std::abs(values(static_cast<Eigen::Index>(i))))});
    }
    return envelope_fit(samples);
}

// ---------------------------------------------------------------------------------------
// Wiener probe

namespace {

/// Plain loops throughout so that shared rows of A and an augmented A' give bit-identical
/// partial results, which makes the augmentation monotonicity exact.
MatrixXc product_rows(const MatrixXc& A, const MatrixXc& P) {
    MatrixXc out(A.rows(), P.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < P.cols(); ++j) {
            Complex s = 0.0;
            for (Eigen::Index l = 0; l < A.cols(); ++l) s += A(i, l) * P(l, j);
            out(i, j) = s;
        }
    }
    return out;
}

VectorXc apply(const MatrixXc& M, const VectorXc& c) {
    VectorXc out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Complex s = 0.0;
        for (Eigen::Index j = 0; j < M.cols(); ++j) s += M(i, j) * c(j);
        out(i) = s;
    }
    return out;
}

double qnorm(const VectorXc& v, Norm q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        s = (q == Norm::l1) ? s + a : std::max(s, a);
    }
    return s;
}

struct Search {
    const MatrixXc& P;
    const MatrixXc& AP;
    Norm q;

    /// Ratio evaluated from scratch; NaN when Pc = 0.
    double fresh(const VectorXc& c) const {
        const double den = qnorm(apply(P, c), q);
        if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return qnorm(apply(AP, c), q) / den;
    }

    /// ||v + s u||_q without forming the sum.
    double shifted_norm(const VectorXc& v, Complex s, const Complex* u) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double a = std::abs(v(i) + s * u[i]);
            acc = (q == Norm::l1) ? acc + a : std::max(acc, a);
        }
        return acc;
    }

    /// Coordinate descent over complex steps +-h, +-ih; returns the final vector.
    VectorXc descend(VectorXc c) const {
        VectorXc x = P * c;
        VectorXc y = AP * c;
        const double den = qnorm(x, q);
        if (!(den > 0.0)) return c;
        double rho = qnorm(y, q) / den;
        const double cmax = c.cwiseAbs().maxCoeff();
        double h = 0.25 * cmax;
        const Complex dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (int sweep = 0; sweep < 150 && h > 1e-6 * cmax; ++sweep) {
            bool improved = false;
            for (Eigen::Index j = 0; j < c.size(); ++j) {
                for (const Complex d : dirs) {
                    const Complex step = h * d;
                    const double dt = shifted_norm(x, step, P.col(j).data());
                    if (!(dt > 0.0)) continue;
                    const double rt = shifted_norm(y, step, AP.col(j).data()) / dt;
                    if (rt < rho) {
                        c(j) += step;
                        x += step * P.col(j);
                        y += step * AP.col(j);
                        rho = rt;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) h *= 0.5;
        }
        return c;
    }
};

VectorXc random_complex(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = g(rng);
        v(i) = Complex(re, g(rng));
    }
    return v;
}

}  // namespace

std::vector<WienerEstimate> wiener_probe(const MatrixXc& A, const MatrixXc& P, std::span<const Norm> norms,
                                         const WienerOptions& options) {
    if (P.rows() != P.cols()) throw PreconditionError("P must be square");
    if (A.cols() != P.rows()) throw PreconditionError("A and P are not dimension-compatible");
    if (P.size() == 0) throw PreconditionError("P is empty");
    const double pscale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (!((P * P - P).cwiseAbs().maxCoeff() <= 1e-10 * pscale)) throw PreconditionError("P is not idempotent");
    if (options.restarts < 0) throw PreconditionError("restart count must be >= 0");
    const Eigen::Index n = P.cols();
    for (const auto& w : options.warm_starts) {
        if (w.size() != n) throw PreconditionError("warm start has the wrong length");
    }

    const MatrixXc AP = product_rows(A, P);
    std::vector<WienerEstimate> out;
    for (const Norm q : norms) {
        WienerEstimate est{q, 0.0, false, 0, {}};
        if (q == Norm::l2) {
            const Eigen::JacobiSVD<MatrixXc> psvd(P, Eigen::ComputeThinU);
            const auto& ps = psvd.singularValues();
            Eigen::Index rank = 0;
            while (rank < ps.size() && ps(rank) > 1e-10 * ps(0)) ++rank;
            if (rank == 0) throw PreconditionError("P has trivial range");
            const MatrixXc AU = A * psvd.matrixU().leftCols(rank);
            est.estimate = std::sqrt(stability_constants(AU).first);
            est.certified = true;
            out.push_back(std::move(est));
            continue;
        }

        const Search search{P, AP, q};
        std::vector<VectorXc> starts = options.warm_starts;
        for (Eigen::Index j = 0; j < n; ++j) starts.push_back(VectorXc::Unit(n, j));
        std::mt19937_64 rng(options.seed + (q == Norm::l1 ? 0 : 0x9e3779b97f4a7c15ULL));
        for (int r = 0; r < options.restarts; ++r) starts.push_back(random_complex(n, rng));

        double best = std::numeric_limits<double>::infinity();
        VectorXc witness;
        auto consider = [&](const VectorXc& c) {
            const double v = search.fresh(c);
            if (v < best) {
                best = v;
                witness = c;
            }
        };
        for (const auto& s : starts) {
            consider(s);
            consider(search.descend(s));
        }
        if (!std::isfinite(best)) throw NumericError("no starting vector has Pc != 0");
        est.estimate = best;
        est.trials = static_cast<int>(starts.size());
        est.witness = std::move(witness);
        out.push_back(std::move(est));
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Experiments

namespace {

KernelEvaluator kernel_for(const Weight& w, std::shared_ptr<const OrthoBasis> fallback) {
    if (w.gaussian_alpha()) return KernelEvaluator::gaussian_closed_form(w);
    return KernelEvaluator::truncated(std::move(fallback));
}

/// Degree whose saturation radius for w reaches `radius`.
int degree_covering(const Weight& w, double radius) {
    return static_cast<int>(std::ceil(2.0 * w.lower_curvature() * (radius + 1.0) * (radius + 1.0)));
}

}  // namespace

std::vector<DeformationRow> deformation_experiment(std::shared_ptr<const OrthoBasis> basis, const PointSet& S,
                                                   std::span<const double> schedule) {
    if (!basis) throw PreconditionError("deformation experiment needs a basis");
    const double r = basis->bulk_radius();
    if (!(r > 0.0)) throw PreconditionError("degree too small: the bulk disk is empty");
    const KernelEvaluator k = kernel_for(basis->weight(), basis);
    std::vector<DeformationRow> rows;
    for (const double a : schedule) {
        const PointSet Sa = dilate(S, a);
        const FrameReport fr = sampling_bounds(*basis, Sa);
        const double d0[] = {r};
        const Point c0[] = {Point(0.0)};
        const DensityEstimate dens = beurling_density(Sa, k, d0, c0);
        rows.push_back({a, fr.lower, fr.upper, fr.set_size, fr.sampling_at_N, dens.lower});
    }
    return rows;
}

SharpReport sharp_experiment(const Weight& w, double epsilon, int N, int max_sweeps) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw PreconditionError("epsilon must lie in (0, 1/2)");
    if (N < 2) throw PreconditionError("sharp experiment needs N >= 2");
    SharpReport rep;
    rep.N = N;
    rep.epsilon = epsilon;

    auto basis = OrthoBasis::build(w, N);
    const FeketeResult f = refine(approx_fekete(basis, default_candidate_grid(*basis)), max_sweeps);
    rep.fekete = f.points;
    const double reach = fekete_search_radius(*basis);

    const Weight plus = Weight::scaled(1.0 + epsilon, w);
    const KernelEvaluator k_plus =
        plus.gaussian_alpha() ? KernelEvaluator::gaussian_closed_form(plus)
                              : KernelEvaluator::truncated(OrthoBasis::build(plus, degree_covering(plus, reach)));
    rep.interpolation = interpolation_lower_bound(k_plus, f.points);

    const Weight minus = Weight::scaled(1.0 - epsilon, w);
    rep.sampling_degree = static_cast<int>(std::floor((1.0 - epsilon) * N));
    auto basis_minus = OrthoBasis::build(minus, rep.sampling_degree);
    rep.sampling = sampling_bounds(*basis_minus, f.points);

    const double r = basis->bulk_radius();
    if (r > 0.0) {
        const double d0[] = {r};
        const Point c0[] = {Point(0.0)};
        rep.density = beurling_density(f.points, kernel_for(w, basis), d0, c0).lower;
    }

    // Improved localization around the point nearest the origin.
    const auto& pts = f.points.points;
    const auto i0 = static_cast<Eigen::Index>(
        std::min_element(pts.begin(), pts.end(), [](Point a, Point b) { return std::norm(a) < std::norm(b); }) -
        pts.begin());
    const Point lam = pts[static_cast<std::size_t>(i0)];
    const Weight small = Weight::scaled(epsilon, w);
    const KernelEvaluator k_eps =
        small.gaussian_alpha()
            ? KernelEvaluator::gaussian_closed_form(small)
            : KernelEvaluator::truncated(OrthoBasis::build(small, degree_covering(small, 2.0 * reach)));
    auto damping = [&](Point z, Point l) { return k_eps.weighted_kernel(z, l) / k_eps.weighted_diagonal(l); };

    const LagrangeSystem lag(f);
    const auto grid = verification_grid(f);
    const MatrixXc L = lag.evaluate(grid);
    std::vector<DecaySample> plain, improved;
    plain.reserve(grid.size());
    improved.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Point z = grid[g];
        const Complex l = L(i0, static_cast<Eigen::Index>(g));
        const double d = std::abs(z - lam);
        plain.push_back({d, std::log(std::abs(l))});
        improved.push_back({d, std::log(std::abs(l * damping(z, lam)))});
    }
    rep.plain_decay = envelope_fit(plain, 16, false).c;
    rep.improved_decay = envelope_fit(improved, 16, false).c;

    const MatrixXc Lp = lag.evaluate(pts);
    for (Eigen::Index a = 0; a < Lp.rows(); ++a) {
        for (Eigen::Index b = 0; b < Lp.cols(); ++b) {
            const Complex lt = Lp(a, b) * damping(pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(a)]);
            rep.improved_delta_error = std::max(rep.improved_delta_error, std::abs(lt - (a == b ? 1.0 : 0.0)));
        }
    }
    return rep;
}

TranslationReport gaussian_translation_check(double alpha, Point zeta, const VectorXc& coeffs,
                                             std::span<const Point> grid, std::span<const Point> lambdas) {
    if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
    const Eigen::Index n = coeffs.size();
    Eigen::VectorXd scale(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        scale(k) = std::exp(0.5 * ((k + 1) * std::log(alpha) - std::log(kPi) - std::lgamma(k + 1.0)));
    }
    auto f = [&](Point u) {
        Complex s = 0.0, p = 1.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            s += coeffs(k) * scale(k) * p;
            p *= u;
        }
        return s;
    };
    auto phi = [&](Point z) { return alpha * std::norm(z) / 2.0; };
    auto q = [&](Point z, Point t) { return alpha * z * std::conj(t) - alpha * std::norm(t) / 2.0; };
    const double log_pref = std::log(alpha / kPi);

    TranslationReport rep;
    for (const Point z : grid) {
        const double fz = std::abs(f(z - zeta));
        const double lhs = std::exp(q(z, zeta).real() - phi(z)) * fz;
        const double rhs = fz * std::exp(-phi(z - zeta));
        rep.identity_error = std::max(rep.identity_error, std::abs(lhs - rhs));
        for (const Point lam : lambdas) {
            // T_zeta(e^{-phi(lam)} K_lam) vs e^{i Im q(lam + zeta, zeta)} e^{-phi(lam + zeta)} K_{lam + zeta},
            // both weighted by e^{-phi(z)}.
            const Complex el = q(z, zeta) - phi(lam) + alpha * (z - zeta) * std::conj(lam) - phi(z) + log_pref;
            const Complex er = Complex(0.0, q(lam + zeta, zeta).imag()) - phi(lam + zeta) +
                               alpha * z * std::conj(lam + zeta) - phi(z) + log_pref;
            rep.covariance_error = std::max(rep.covariance_error, std::abs(std::exp(el) - std::exp(er)));
        }
    }
    return rep;
}

TranslationReport gaussian_translation_check(const Weight& w, Point zeta, const VectorXc& coeffs,
                                             std::span<const Point> grid, std::span<const Point> lambdas) {
    const auto alpha = w.gaussian_alpha();
    if (!alpha) throw PreconditionError("translation check needs a Gaussian weight");
    return gaussian_translation_check(*alpha, zeta, coeffs, grid, lambdas);
}

}  // namespace focklab
