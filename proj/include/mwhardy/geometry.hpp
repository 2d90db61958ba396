#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace mwhardy {

/// Point of R^n for n <= 2; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

double distance(const Point& x, const Point& y, int n);

/// Axis-parallel cube given by center and edge length.
struct Cube {
    int n = 1;
    Point center{};
    double edge = 1.0;

    /// rQ: same center, edge multiplied by r.
    Cube scaled(double r) const { return Cube{n, center, edge * r}; }
    Point lo() const;
    Point hi() const;
    double volume() const;
    /// Closed-cube membership.
    bool contains(const Point& x) const;
    /// Euclidean distance from x to the closed cube.
    double distance_to(const Point& x) const;
};

/// Dyadic cube 2^{-level}([0,1)^n + index).
struct DyadicCube {
    int n = 1;
    int level = 0;
    std::array<std::int64_t, 2> index{};

    double edge() const;
    Cube cube() const;
    DyadicCube parent() const;
    std::vector<DyadicCube> children() const;
    /// The cube of level `level` containing x (half-open convention).
    static DyadicCube containing(const Point& x, int level, int n);
};

/// The family Q_t = { t([0,1)^n + k) } restricted to an index box [lo, hi).
struct DyadicGrid {
    int n = 1;
    double t = 1.0;
    std::array<std::int64_t, 2> lo{};
    std::array<std::int64_t, 2> hi{};

    /// Smallest index box whose cubes cover [-half_width, half_width]^n.
    static DyadicGrid covering(int n, double t, double half_width);
    std::size_t size() const;
    std::vector<Cube> cubes() const;
    std::array<std::int64_t, 2> index_of(const Point& x) const;
};

/// Radius r* of a ball contained in B(x,r) and B(y,delta r) when |x-y| = d;
/// none when the two balls do not overlap (d >= (1+delta) r).
std::optional<double> ball_intersection_radius(double r, double delta, double d);

/// Center of the inscribed ball B(z, r*) for concrete x, y.
std::optional<Point> ball_intersection_center(const Point& x, const Point& y, double r, double delta, int n);

// ---------------------------------------------------------------------------
// Whitney decomposition in exact integer arithmetic.
//
// Coordinates are integers in units of 2^unit_exp. An open set is the interior
// of the union of closed integer boxes; Whitney cubes are dyadic cubes whose
// edge is a power of two (in units) and whose corner is a multiple of the edge.

struct IntBox {
    std::array<std::int64_t, 2> lo{};
    std::array<std::int64_t, 2> hi{}; // exclusive
};

struct OpenSet {
    int n = 1;
    int unit_exp = 0;          // one unit = 2^unit_exp
    std::vector<IntBox> boxes; // Omega = interior of the union of their closures
};

struct WhitneyCube {
    std::array<std::int64_t, 2> corner{};
    std::int64_t edge = 1;
};

struct WhitneyCover {
    int n = 1;
    int unit_exp = 0;
    /// Cubes meeting the distance bracket sqrt(n) l <= dist(Q, Omega^c) <= 4 sqrt(n) l.
    std::vector<WhitneyCube> cubes;
    /// Unit cells of Omega left over where the recursion reaches the unit edge
    /// (the unresolved part of the infinite cascade toward the boundary).
    std::vector<WhitneyCube> residual;
    double a_tilde = 17.0 / 16.0;
    double a_star = 9.0 / 8.0;

    double unit() const;
    Cube cube(const WhitneyCube& q) const;
    /// Resolved cubes followed by residual cells.
    std::vector<Cube> all_cubes() const;
};

/// Rasterized view of an open set with exact distance queries.
class LatticeSet {
public:
    explicit LatticeSet(const OpenSet& omega);

    int n() const { return n_; }
    bool contains_cell(std::int64_t i, std::int64_t j = 0) const;
    /// Whether the closed box [lo, hi] (integer corners) meets the interior of Omega.
    bool meets(const std::array<std::int64_t, 2>& lo, const std::array<std::int64_t, 2>& hi) const;
    /// Squared Euclidean distance between the closed box and Omega^c, scaled
    /// by `scale` (box corners are given in units of 1/scale).
    std::int64_t dist2_to_complement(const std::array<std::int64_t, 2>& lo, const std::array<std::int64_t, 2>& hi,
                                     std::int64_t scale = 1) const;
    std::int64_t cell_count() const { return cell_count_; }
    const std::array<std::int64_t, 2>& bbox_lo() const { return lo_; }
    const std::array<std::int64_t, 2>& bbox_hi() const { return hi_; }

private:
    int n_;
    std::array<std::int64_t, 2> lo_{}, hi_{}, ext_{};
    std::vector<std::uint8_t> mask_;
    std::vector<std::int64_t> prefix_;
    std::vector<std::array<std::int64_t, 2>> boundary_; // complement cells touching Omega
    std::int64_t cell_count_ = 0;
    std::int64_t count_in(std::array<std::int64_t, 2> lo, std::array<std::int64_t, 2> hi) const;
};

/// Throws DomainError when Omega is empty (or not bounded, i.e. all of R^n,
/// which a finite box union cannot express).
WhitneyCover whitney_decompose(const OpenSet& omega);

struct WhitneyReport {
    bool tiling = false;
    bool distance_bracket = false;
    bool neighbor_ratio = false;
    bool touch_bound = false;
    bool overlap_bound = false;
    int max_touch = 0;
    int max_overlap = 0;
    bool all() const { return tiling && distance_bracket && neighbor_ratio && touch_bound && overlap_bound; }
};

/// Exact integer check of the five Whitney properties; `lambda16` is the
/// dilation factor times 16 (18 for 9/8).
WhitneyReport check_whitney(const OpenSet& omega, const WhitneyCover& cover, std::int64_t lambda16 = 18);

} // namespace mwhardy
