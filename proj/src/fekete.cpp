#include "focklab/fekete.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace focklab {

MatrixXc collocation_matrix(const OrthoBasis& basis, const PointSet& S) { return basis.weighted_matrix(S.points); }

double log_abs_det(const MatrixXc& M) {
    if (M.rows() != M.cols()) throw PreconditionError("log_abs_det needs a square matrix");
    if (M.rows() == 0) return 0.0;
    const Eigen::PartialPivLU<MatrixXc> lu(M);
    double s = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
    return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
}

PointSet hex_grid(double radius, double spacing) {
    if (!(radius >= 0.0) || !(spacing > 0.0)) throw PreconditionError("hex grid needs radius >= 0 and spacing > 0");
    PointSet S;
    S.clip_radius = radius;
    S.generator = "hex_grid";
    const double dy = spacing * std::sqrt(3.0) / 2.0;
    const long kmax = static_cast<long>(std::floor(radius / dy));
    const long jmax = static_cast<long>(std::floor(radius / spacing)) + 1;
    for (long k = -kmax; k <= kmax; ++k) {
        const double shift = (k % 2 == 0) ? 0.0 : 0.5 * spacing;
        for (long j = -jmax; j <= jmax; ++j) {
            const Point p(static_cast<double>(j) * spacing + shift, static_cast<double>(k) * dy);
            if (std::norm(p) <= radius * radius) S.points.push_back(p);
        }
    }
    return S;
}

double fekete_search_radius(const OrthoBasis& basis) {
    return std::sqrt(basis.degree() / (2.0 * basis.weight().lower_curvature())) + 1.0;
}

PointSet default_candidate_grid(const OrthoBasis& basis) {
    const double R = fekete_search_radius(basis);
    return hex_grid(R, R / (3.0 * std::sqrt(static_cast<double>(basis.degree()))));
}

namespace {

double estimate_spacing(const PointSet& grid) {
    if (grid.generator == "hex_grid" && grid.size() >= 2) {
        // Nearest neighbour of the point closest to the origin.
        const auto it = std::min_element(grid.points.begin(), grid.points.end(),
                                         [](Point a, Point b) { return std::norm(a) < std::norm(b); });
        double best = std::numeric_limits<double>::infinity();
        for (const Point p : grid.points) {
            if (p != *it) best = std::min(best, std::abs(p - *it));
        }
        return best;
    }
    return grid.size() >= 2 ? separation(grid) : 1.0;
}

}  // namespace

FeketeResult approx_fekete(std::shared_ptr<const OrthoBasis> basis, const PointSet& grid) {
    if (!basis) throw PreconditionError("approx_fekete needs a basis");
    const int N = basis->degree();
    const auto G = static_cast<Eigen::Index>(grid.size());
    if (G < 4 * static_cast<Eigen::Index>(N)) throw PreconditionError("candidate grid needs at least 4N points");

    // Columns of A are the weighted basis vectors of the candidates.
    MatrixXc A = collocation_matrix(*basis, grid).transpose();
    Eigen::VectorXd norms = A.colwise().squaredNorm().transpose();
    const double scale = norms.maxCoeff();
    std::vector<char> taken(static_cast<std::size_t>(G), 0);
    std::vector<Eigen::Index> picks;
    picks.reserve(static_cast<std::size_t>(N));

    for (int step = 0; step < N; ++step) {
        Eigen::Index best = -1;
        double best_norm = 0.0;
        for (Eigen::Index j = 0; j < G; ++j) {
            if (!taken[static_cast<std::size_t>(j)] && norms(j) > best_norm) {
                best_norm = norms(j);
                best = j;
            }
        }
        if (best < 0 || !(best_norm > 1e-28 * scale)) {
            throw NumericError("approx_fekete found only " + std::to_string(step) + " of " + std::to_string(N) +
                               " nonzero pivots");
        }
        taken[static_cast<std::size_t>(best)] = 1;
        picks.push_back(best);
        VectorXc q = A.col(best) / std::sqrt(best_norm);
        // Project the pivot direction out of the remaining columns (twice, for stability).
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::RowVectorXcd coeff = q.adjoint() * A;
            A.noalias() -= q * coeff;
        }
        norms = A.colwise().squaredNorm().transpose();
    }

    FeketeResult f;
    f.basis = std::move(basis);
    f.candidates = grid;
    f.grid_spacing = estimate_spacing(grid);
    f.points.generator = "fekete(N=" + std::to_string(N) + ")";
    f.points.clip_radius = grid.clip_radius;
    for (const auto j : picks) f.points.points.push_back(grid.points[static_cast<std::size_t>(j)]);
    f.log_abs_det = log_abs_det(collocation_matrix(*f.basis, f.points));
    return f;
}

namespace {

constexpr double kStepFloor = 1e-6;
constexpr double kGain = 1e-14;
constexpr double kExchangeGain = 1e-9;
constexpr double kSweepGain = 1e-10;

constexpr double kDiag = 0.70710678118654752440;
const std::array<Point, 8> kCompass = {Point(1, 0),          Point(-1, 0),         Point(0, 1),
                                       Point(0, -1),         Point(kDiag, kDiag),  Point(-kDiag, kDiag),
                                       Point(kDiag, -kDiag), Point(-kDiag, -kDiag)};

}  // namespace

FeketeResult refine(const FeketeResult& f, int max_sweeps) {
    if (!f.basis) throw PreconditionError("refine needs a basis");
    const OrthoBasis& basis = *f.basis;
    const int N = basis.degree();
    if (static_cast<int>(f.points.size()) != N) throw PreconditionError("configuration size must equal N");

    FeketeResult out = f;
    out.refined = true;
    out.accepted_moves = 0;
    MatrixXc M = collocation_matrix(basis, out.points);
    auto& pts = out.points.points;
    const MatrixXc C = basis.weighted_matrix(out.candidates.points).transpose();

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        int moved = 0;
        int swapped = 0;
        double gain = 0.0;  // increase of log|Delta| over the sweep

        // Swap in the candidate where some |l_i| exceeds 1; this multiplies |Delta| by that value.
        for (; swapped < 10 * N && C.cols() > 0; ++swapped) {
            const MatrixXc L = Eigen::PartialPivLU<MatrixXc>(M.transpose()).solve(C);
            Eigen::Index i = 0, j = 0;
            const double top = L.cwiseAbs().maxCoeff(&i, &j);
            if (!(top > 1.0 + kExchangeGain)) break;
            const Point z = out.candidates.points[static_cast<std::size_t>(j)];
            M.row(i) = basis.weighted(z).transpose();
            pts[static_cast<std::size_t>(i)] = z;
            gain += std::log(top);
        }

        // Compass search on each point with the others fixed: the objective is |l_i(z)|.
        for (int i = 0; i < N; ++i) {
            double h = f.grid_spacing;
            VectorXc v = Eigen::PartialPivLU<MatrixXc>(M).solve(VectorXc::Unit(N, i));  // row i of M^{-T}
            while (h >= kStepFloor) {
                const Point x = pts[static_cast<std::size_t>(i)];
                double best = 1.0 + kGain;
                Point best_z = x;
                for (const Point d : kCompass) {
                    const Point z = x + h * d;
                    const double val = std::abs(v.dot(basis.weighted(z).conjugate()));
                    if (val > best) {
                        best = val;
                        best_z = z;
                    }
                }
                if (best_z == x) {
                    h *= 0.5;
                    continue;
                }
                M.row(i) = basis.weighted(best_z).transpose();
                pts[static_cast<std::size_t>(i)] = best_z;
                v = Eigen::PartialPivLU<MatrixXc>(M).solve(VectorXc::Unit(N, i));
                gain += std::log(best);
                ++moved;
            }
        }
        out.accepted_moves += moved + swapped;
        if (swapped == 0 && gain < kSweepGain) break;
    }
    if (out.accepted_moves > 0) {
        out.log_abs_det = log_abs_det(M);
    }
    return out;
}

LagrangeSystem::LagrangeSystem(const FeketeResult& f) : basis_(f.basis) {
    if (!basis_) throw PreconditionError("Lagrange system needs a basis");
    const MatrixXc M = collocation_matrix(*basis_, f.points);
    if (M.rows() != M.cols()) throw PreconditionError("Lagrange system needs N points");
    lu_t_.compute(M.transpose());
    if (!(lu_t_.rcond() > 1e-15)) throw NumericError("collocation matrix is singular");
}

VectorXc LagrangeSystem::evaluate(Point z) const { return lu_t_.solve(basis_->weighted(z)); }

MatrixXc LagrangeSystem::evaluate(std::span<const Point> grid) const {
    return lu_t_.solve(basis_->weighted_matrix(grid).transpose());
}

double LagrangeSystem::sup_norm(std::span<const Point> grid) const {
    if (grid.empty()) return 0.0;
    return evaluate(grid).cwiseAbs().maxCoeff();
}

VectorXc lagrange_eval(const FeketeResult& f, Point z) { return LagrangeSystem(f).evaluate(z); }

std::vector<Point> verification_grid(const FeketeResult& f) {
    const double R = fekete_search_radius(*f.basis);
    const double h = 0.5 * f.grid_spacing;
    const int per_axis = 2 * static_cast<int>(std::ceil(R / h)) + 1;
    return disk_grid(h * (per_axis - 1) / 2.0, per_axis);
}

std::vector<FeketeTrendRow> fekete_separation_trend(const Weight& w, std::span<const int> degrees, int max_sweeps) {
    std::vector<FeketeTrendRow> rows;
    int prev = 0;
    for (const int N : degrees) {
        if (N <= prev) throw PreconditionError("degree list must be increasing");
        prev = N;
        auto basis = OrthoBasis::build(w, N);
        const FeketeResult f = refine(approx_fekete(basis, default_candidate_grid(*basis)), max_sweeps);
        const LagrangeSystem lag(f);
        rows.push_back({N, N >= 2 ? separation(f.points) : std::numeric_limits<double>::infinity(),
                        lag.sup_norm(verification_grid(f)), f.log_abs_det, basis->bulk_radius()});
    }
    return rows;
}

}  // namespace focklab
