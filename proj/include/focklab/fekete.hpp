#pragma once

#include <memory>
#include <span>
#include <vector>

#include "focklab/common.hpp"
#include "focklab/fockspace.hpp"
#include "focklab/pointsets.hpp"

namespace focklab {

/// Weighted collocation matrix M[j][k] = ẽ_k(x_j) = e_k(x_j) e^{-phi(x_j)}.
MatrixXc collocation_matrix(const OrthoBasis& basis, const PointSet& S);

/// log |det M| of a square matrix; -inf when singular.
double log_abs_det(const MatrixXc& M);

/// Hexagonal packing of the closed disk B_radius(0) with the given spacing.
PointSet hex_grid(double radius, double spacing);

/// Radius sqrt(N / (2m)) + 1 of the disk the candidate grid covers.
double fekete_search_radius(const OrthoBasis& basis);

/// Hexagonal candidate grid on B_{fekete_search_radius} with spacing radius / (3 sqrt N).
PointSet default_candidate_grid(const OrthoBasis& basis);

/// Approximate maximizer of |det(ẽ_k(x_j))| together with what produced it.
struct FeketeResult {
    PointSet points;
    std::shared_ptr<const OrthoBasis> basis;
    double log_abs_det = 0.0;
    double grid_spacing = 0.0;
    bool refined = false;
    /// Compass moves and exchanges accepted by the last refine call.
    int accepted_moves = 0;
    /// Candidate grid the configuration was selected from.
    PointSet candidates;
};

/// Greedy volume maximization: column-pivoted orthogonalization of the transposed
/// collocation matrix of the grid. Each pivot is the candidate with the largest residual
/// norm (ties to the lowest index). Requires at least 4N candidates; throws NumericError if
/// fewer than N usable pivots exist.
FeketeResult approx_fekete(std::shared_ptr<const OrthoBasis> basis, const PointSet& grid);

/// Cyclic single-point ascent on log|Delta|: each point moves by compass search over
/// eight directions (initial step = grid spacing, halved on failure, floor 1e-6). Each
/// sweep first exchanges points for candidates where some |l_lambda| exceeds 1.
/// log|Delta| never decreases. `max_sweeps` caps the number of sweeps; a sweep without
/// exchanges that raises log|Delta| by less than 1e-10 ends the ascent.
FeketeResult refine(const FeketeResult& f, int max_sweeps = 200);

/// Lagrange functions l_lambda of a configuration, l_lambda(mu) = delta_{lambda mu}.
/// Factorizes the collocation matrix once; evaluations solve the transposed system.
class LagrangeSystem {
public:
    /// Throws NumericError if the collocation matrix is singular.
    explicit LagrangeSystem(const FeketeResult& f);

    /// (l_lambda(z))_lambda in the order of f.points.
    VectorXc evaluate(Point z) const;
    /// Column j holds evaluate(grid[j]).
    MatrixXc evaluate(std::span<const Point> grid) const;
    /// max over grid points and lambda of |l_lambda(z)|.
    double sup_norm(std::span<const Point> grid) const;

private:
    std::shared_ptr<const OrthoBasis> basis_;
    Eigen::PartialPivLU<MatrixXc> lu_t_;
};

VectorXc lagrange_eval(const FeketeResult& f, Point z);

/// Square grid covering B_{fekete_search_radius} at half the candidate spacing.
std::vector<Point> verification_grid(const FeketeResult& f);

struct FeketeTrendRow {
    int N;
    /// Minimum pairwise distance; +inf for N = 1.
    double separation;
    /// Lagrange sup-norm on the verification grid (1 at a true maximizer).
    double sup_norm;
    double log_abs_det;
    double bulk_radius;
};

/// approx_fekete + refine for each N, reporting separation and the Lagrange sup-norm.
std::vector<FeketeTrendRow> fekete_separation_trend(const Weight& w, std::span<const int> degrees,
                                                    int max_sweeps = 200);

}  // namespace focklab
