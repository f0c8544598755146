#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "focklab/common.hpp"
#include "focklab/fockspace.hpp"
#include "focklab/weights.hpp"

namespace focklab {

/// Finite planar configuration Lambda. `clip_radius` is the radius of the disk the set
/// is known to be complete in; density scans refuse balls leaving that disk.
struct PointSet {
    std::vector<Point> points;
    /// Free-form provenance, e.g. "lattice(0.8, 0.8, 10)".
    std::string generator;
    double clip_radius = std::numeric_limits<double>::infinity();
    /// Set when duplicates are intentional.
    bool degenerate = false;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// {(j a, k b) : j, k integers} inside the closed disk B_R(0).
PointSet lattice(double a, double b, double R);

/// Minimum pairwise distance. Throws PreconditionError for fewer than two points.
double separation(const PointSet& S);

/// Largest number of points in a closed unit ball.
int relative_separation(const PointSet& S);

/// Points of S in the closed ball B_r(center).
int count_in_ball(const PointSet& S, Point center, double radius);

/// Points of S with |p| <= radius, order preserved.
PointSet restrict_to_disk(const PointSet& S, double radius);

struct DensityRecord {
    double r;
    Point center;
    int count;
    double mass;
    double ratio;
};

struct DensityEstimate {
    double lower;  ///< min ratio over the family, estimate of D^-
    double upper;  ///< max ratio over the family, estimate of D^+
    std::vector<DensityRecord> records;
};

/// #(S cap B_r(z)) / \int_{B_r(z)} K(w, w) e^{-2 phi(w)} dm(w) over every (r, z) pair.
/// Throws PreconditionError if a ball leaves the disk S was generated in.
DensityEstimate beurling_density(const PointSet& S, const KernelEvaluator& k, std::span<const double> radii,
                                 std::span<const Point> centers);

/// Same count against \int_{B_r(z)} Laplacian(phi)/2 dm, the plane form of i dd-bar phi.
DensityEstimate curvature_density(const PointSet& S, const Weight& w, std::span<const double> radii,
                                  std::span<const Point> centers);

/// a S. Requires a > 0.
PointSet dilate(const PointSet& S, double a);

/// Real 2x2 matrix acting on (x, y), row-major.
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// A S. Throws PreconditionError for singular A.
PointSet linear_map(const PointSet& S, const Matrix2& A);

/// One "x,y" line per point. Lines starting with '#' and blank lines are skipped on read.
void write_points_csv(std::ostream& os, const PointSet& S);
PointSet read_points_csv(std::istream& is);

}  // namespace focklab
