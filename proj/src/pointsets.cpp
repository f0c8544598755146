#include "focklab/pointsets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace focklab {

namespace {

constexpr double kBallSlack = 1e-12;

bool in_closed_ball(Point p, Point c, double r) {
    return std::norm(p - c) <= r * r * (1.0 + kBallSlack) + 1e-300;
}

/// Uniform bucket grid with unit cells.
class CellIndex {
public:
    explicit CellIndex(std::span<const Point> pts) : pts_(pts) {
        for (std::size_t i = 0; i < pts.size(); ++i) cells_[key(cell_of(pts[i]))].push_back(i);
    }

    template <class F>
    void for_each_near(Point c, int reach, F&& f) const {
        const auto [cx, cy] = cell_of(c);
        for (long dx = -reach; dx <= reach; ++dx) {
            for (long dy = -reach; dy <= reach; ++dy) {
                auto it = cells_.find(key({cx + dx, cy + dy}));
                if (it == cells_.end()) continue;
                for (std::size_t i : it->second) f(i);
            }
        }
    }

private:
    static std::pair<long, long> cell_of(Point p) {
        return {static_cast<long>(std::floor(p.real())), static_cast<long>(std::floor(p.imag()))};
    }
    static std::uint64_t key(std::pair<long, long> c) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.first)) << 32) |
               static_cast<std::uint32_t>(c.second);
    }

    std::span<const Point> pts_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

PointSet lattice(double a, double b, double R) {
    if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("lattice spacings must be positive");
    if (!(R > 0.0)) throw PreconditionError("lattice clip radius must be positive");
    PointSet S;
    S.generator = "lattice(" + fmt(a) + ", " + fmt(b) + ", " + fmt(R) + ")";
    S.clip_radius = R;
    const long jmax = static_cast<long>(std::floor(R / a * (1.0 + kBallSlack)));
    const long kmax = static_cast<long>(std::floor(R / b * (1.0 + kBallSlack)));
    for (long j = -jmax; j <= jmax; ++j) {
        for (long k = -kmax; k <= kmax; ++k) {
            const Point p(static_cast<double>(j) * a, static_cast<double>(k) * b);
            if (in_closed_ball(p, 0.0, R)) S.points.push_back(p);
        }
    }
    return S;
}

double separation(const PointSet& S) {
    if (S.size() < 2) throw PreconditionError("separation needs at least two points");
    std::vector<Point> p = S.points;
    std::sort(p.begin(), p.end(), [](Point u, Point v) { return u.real() < v.real(); });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (p[j].real() - p[i].real() >= best) break;
            best = std::min(best, std::abs(p[j] - p[i]));
        }
    }
    return best;
}

int count_in_ball(const PointSet& S, Point center, double radius) {
    return static_cast<int>(std::count_if(S.points.begin(), S.points.end(),
                                          [&](Point p) { return in_closed_ball(p, center, radius); }));
}

int relative_separation(const PointSet& S) {
    if (S.empty()) return 0;
    const CellIndex index(S.points);
    auto count_unit = [&](Point c) {
        int n = 0;
        index.for_each_near(c, 1, [&](std::size_t i) { n += in_closed_ball(S.points[i], c, 1.0) ? 1 : 0; });
        return n;
    };
    int best = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        const Point p = S.points[i];
        best = std::max(best, count_unit(p));
        index.for_each_near(p, 2, [&](std::size_t j) {
            if (j <= i || !in_closed_ball(S.points[j], p, 2.0)) return;
            best = std::max(best, count_unit(0.5 * (p + S.points[j])));
        });
    }
    return best;
}

PointSet restrict_to_disk(const PointSet& S, double radius) {
    PointSet out;
    out.generator = S.generator;
    out.clip_radius = std::min(S.clip_radius, radius);
    out.degenerate = S.degenerate;
    for (const Point p : S.points) {
        if (in_closed_ball(p, 0.0, radius)) out.points.push_back(p);
    }
    return out;
}

namespace {

void check_ball(const PointSet& S, Point center, double r) {
    if (!(r > 0.0)) throw PreconditionError("density radius must be positive");
    if (std::abs(center) + r > S.clip_radius * (1.0 + kBallSlack)) {
        throw PreconditionError("ball B_" + fmt(r) + "(" + fmt(center.real()) + ", " + fmt(center.imag()) +
                                ") leaves the region the point set was generated in (radius " +
                                fmt(S.clip_radius) + ")");
    }
}

template <class MassFn>
DensityEstimate density_scan(const PointSet& S, std::span<const double> radii, std::span<const Point> centers,
                             MassFn&& mass_of) {
    if (radii.empty() || centers.empty()) throw PreconditionError("density scan needs radii and centers");
    for (const double r : radii) {
        for (const Point c : centers) check_ball(S, c, r);
    }
    DensityEstimate est{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}};
    for (const double r : radii) {
        for (const Point c : centers) {
            const int n = count_in_ball(S, c, r);
            const double mass = mass_of(c, r);
            const double ratio = n / mass;
            est.records.push_back({r, c, n, mass, ratio});
            est.lower = std::min(est.lower, ratio);
            est.upper = std::max(est.upper, ratio);
        }
    }
    return est;
}

}  // namespace

DensityEstimate beurling_density(const PointSet& S, const KernelEvaluator& k, std::span<const double> radii,
                                 std::span<const Point> centers) {
    return density_scan(S, radii, centers, [&](Point c, double r) { return bergman_mass(k, c, r); });
}

DensityEstimate curvature_density(const PointSet& S, const Weight& w, std::span<const double> radii,
                                  std::span<const Point> centers) {
    return density_scan(S, radii, centers, [&](Point c, double r) {
        const int n_r = static_cast<int>(std::ceil(20.0 + 4.0 * r));
        const auto rule = disk_rule(c, r, n_r, 2 * n_r);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * w.laplacian(rule.nodes[i]) / 2.0;
        return s;
    });
}

PointSet dilate(const PointSet& S, double a) {
    if (!(a > 0.0)) throw PreconditionError("dilation factor must be positive");
    PointSet out = S;
    for (Point& p : out.points) p *= a;
    out.clip_radius = S.clip_radius * a;
    out.generator = fmt(a) + " * " + S.generator;
    return out;
}

PointSet linear_map(const PointSet& S, const Matrix2& A) {
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    const double scale = std::max({std::abs(A[0][0]), std::abs(A[0][1]), std::abs(A[1][0]), std::abs(A[1][1])});
    if (!(std::abs(det) > 1e-14 * scale * scale)) throw PreconditionError("linear map is singular");
    PointSet out = S;
    for (Point& p : out.points) {
        p = Point(A[0][0] * p.real() + A[0][1] * p.imag(), A[1][0] * p.real() + A[1][1] * p.imag());
    }
    // The image of B_R contains B_{sigma_min R}.
    const Eigen::Matrix2d M{{A[0][0], A[0][1]}, {A[1][0], A[1][1]}};
    const double smin = Eigen::JacobiSVD<Eigen::Matrix2d>(M).singularValues()(1);
    out.clip_radius = S.clip_radius * smin;
    out.generator = "linear_map(" + S.generator + ")";
    return out;
}

void write_points_csv(std::ostream& os, const PointSet& S) {
    os.precision(17);
    for (const Point p : S.points) os << p.real() << ',' << p.imag() << '\n';
}

PointSet read_points_csv(std::istream& is) {
    PointSet S;
    S.generator = "csv";
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("point CSV line " + std::to_string(lineno) + ": expected x,y");
        try {
            std::size_t used = 0;
            const double x = std::stod(line.substr(0, comma), &used);
            const double y = std::stod(line.substr(comma + 1), &used);
            S.points.emplace_back(x, y);
        } catch (const std::logic_error&) {
            throw ConfigError("point CSV line " + std::to_string(lineno) + ": not a number");
        }
    }
    return S;
}

}  // namespace focklab
