#include "mwhardy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwhardy/error.hpp"

namespace mwhardy {

double distance(const Point& x, const Point& y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

Point Cube::lo() const {
    Point p{};
    for (int i = 0; i < n; ++i) p[i] = center[i] - 0.5 * edge;
    return p;
}

Point Cube::hi() const {
    Point p{};
    for (int i = 0; i < n; ++i) p[i] = center[i] + 0.5 * edge;
    return p;
}

double Cube::volume() const { return std::pow(edge, n); }

bool Cube::contains(const Point& x) const {
    for (int i = 0; i < n; ++i)
        if (std::abs(x[i] - center[i]) > 0.5 * edge) return false;
    return true;
}

double Cube::distance_to(const Point& x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = std::max(0.0, std::abs(x[i] - center[i]) - 0.5 * edge);
        s += g * g;
    }
    return std::sqrt(s);
}

double DyadicCube::edge() const { return std::ldexp(1.0, -level); }

Cube DyadicCube::cube() const {
    const double e = edge();
    Cube c{n, {}, e};
    for (int i = 0; i < n; ++i) c.center[i] = (static_cast<double>(index[i]) + 0.5) * e;
    return c;
}

namespace {
std::int64_t floor_div2(std::int64_t k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }
} // namespace

DyadicCube DyadicCube::parent() const {
    DyadicCube p{n, level - 1, {}};
    for (int i = 0; i < n; ++i) p.index[i] = floor_div2(index[i]);
    return p;
}

std::vector<DyadicCube> DyadicCube::children() const {
    std::vector<DyadicCube> out;
    const int count = 1 << n;
    for (int mask = 0; mask < count; ++mask) {
        DyadicCube c{n, level + 1, {}};
        for (int i = 0; i < n; ++i) c.index[i] = 2 * index[i] + ((mask >> i) & 1);
        out.push_back(c);
    }
    return out;
}

DyadicCube DyadicCube::containing(const Point& x, int level, int n) {
    DyadicCube c{n, level, {}};
    for (int i = 0; i < n; ++i) c.index[i] = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], level)));
    return c;
}

DyadicGrid DyadicGrid::covering(int n, double t, double half_width) {
    DyadicGrid g{n, t, {0, 0}, {1, 1}};
    for (int i = 0; i < n; ++i) {
        g.lo[i] = static_cast<std::int64_t>(std::floor(-half_width / t));
        g.hi[i] = static_cast<std::int64_t>(std::ceil(half_width / t));
    }
    return g;
}

std::size_t DyadicGrid::size() const {
    return static_cast<std::size_t>((hi[0] - lo[0]) * (hi[1] - lo[1]));
}

std::vector<Cube> DyadicGrid::cubes() const {
    std::vector<Cube> out;
    out.reserve(size());
    for (std::int64_t b = lo[1]; b < hi[1]; ++b) {
        for (std::int64_t a = lo[0]; a < hi[0]; ++a) {
            Cube c{n, {}, t};
            c.center[0] = (static_cast<double>(a) + 0.5) * t;
            if (n == 2) c.center[1] = (static_cast<double>(b) + 0.5) * t;
            out.push_back(c);
        }
    }
    return out;
}

std::array<std::int64_t, 2> DyadicGrid::index_of(const Point& x) const {
    std::array<std::int64_t, 2> k{0, 0};
    for (int i = 0; i < n; ++i) k[i] = static_cast<std::int64_t>(std::floor(x[i] / t));
    return k;
}

std::optional<double> ball_intersection_radius(double r, double delta, double d) {
    if (!(r > 0.0) || !(delta > 0.0) || d < 0.0) throw PreconditionError("ball_intersection: need r, delta > 0, d >= 0");
    if (d >= (1.0 + delta) * r) return std::nullopt;
    return 0.5 * ((1.0 + delta) * r - std::max(d, std::abs(1.0 - delta) * r));
}

std::optional<Point> ball_intersection_center(const Point& x, const Point& y, double r, double delta, int n) {
    const double d = distance(x, y, n);
    if (!ball_intersection_radius(r, delta, d)) return std::nullopt;
    if (d <= std::abs(1.0 - delta) * r) return delta <= 1.0 ? y : x;
    // Along the axis x -> y the lens spans [d - delta r, r] measured from x.
    const double s = 0.5 * (d - delta * r + r);
    Point z{};
    for (int i = 0; i < n; ++i) z[i] = x[i] + (y[i] - x[i]) * (s / d);
    return z;
}

// ---------------------------------------------------------------------------

double WhitneyCover::unit() const { return std::ldexp(1.0, unit_exp); }

Cube WhitneyCover::cube(const WhitneyCube& q) const {
    const double u = unit();
    Cube c{n, {}, static_cast<double>(q.edge) * u};
    for (int i = 0; i < n; ++i) c.center[i] = (static_cast<double>(q.corner[i]) + 0.5 * static_cast<double>(q.edge)) * u;
    return c;
}

std::vector<Cube> WhitneyCover::all_cubes() const {
    std::vector<Cube> out;
    out.reserve(cubes.size() + residual.size());
    for (const auto& q : cubes) out.push_back(cube(q));
    for (const auto& q : residual) out.push_back(cube(q));
    return out;
}

LatticeSet::LatticeSet(const OpenSet& omega) : n_(omega.n) {
    if (n_ < 1 || n_ > 2) throw PreconditionError("open set: dimension must be 1 or 2");
    if (omega.boxes.empty()) throw DomainError("open set is empty");
    lo_ = {std::numeric_limits<std::int64_t>::max(), 0};
    hi_ = {std::numeric_limits<std::int64_t>::min(), 1};
    if (n_ == 2) {
        lo_[1] = std::numeric_limits<std::int64_t>::max();
        hi_[1] = std::numeric_limits<std::int64_t>::min();
    }
    for (const auto& b : omega.boxes) {
        for (int i = 0; i < n_; ++i) {
            if (b.hi[i] <= b.lo[i]) throw PreconditionError("open set: box with empty extent");
            lo_[i] = std::min(lo_[i], b.lo[i]);
            hi_[i] = std::max(hi_[i], b.hi[i]);
        }
    }
    for (int i = 0; i < n_; ++i) {
        lo_[i] -= 1;
        hi_[i] += 1;
    }
    ext_ = {hi_[0] - lo_[0], hi_[1] - lo_[1]};
    mask_.assign(static_cast<std::size_t>(ext_[0] * ext_[1]), 0);
    for (const auto& b : omega.boxes) {
        const std::int64_t b1lo = n_ == 2 ? b.lo[1] : 0, b1hi = n_ == 2 ? b.hi[1] : 1;
        for (std::int64_t j = b1lo; j < b1hi; ++j)
            for (std::int64_t i = b.lo[0]; i < b.hi[0]; ++i)
                mask_[static_cast<std::size_t>((i - lo_[0]) + ext_[0] * (j - lo_[1]))] = 1;
    }
    prefix_.assign(static_cast<std::size_t>((ext_[0] + 1) * (ext_[1] + 1)), 0);
    for (std::int64_t j = 0; j < ext_[1]; ++j)
        for (std::int64_t i = 0; i < ext_[0]; ++i) {
            const auto at = [&](std::int64_t a, std::int64_t b) -> std::int64_t& {
                return prefix_[static_cast<std::size_t>(a + (ext_[0] + 1) * b)];
            };
            at(i + 1, j + 1) = at(i, j + 1) + at(i + 1, j) - at(i, j) + mask_[static_cast<std::size_t>(i + ext_[0] * j)];
        }
    cell_count_ = prefix_.back();
    for (std::int64_t j = 0; j < ext_[1]; ++j)
        for (std::int64_t i = 0; i < ext_[0]; ++i) {
            if (mask_[static_cast<std::size_t>(i + ext_[0] * j)]) continue;
            bool touches = false;
            for (std::int64_t dj = -1; dj <= 1 && !touches; ++dj)
                for (std::int64_t di = -1; di <= 1 && !touches; ++di)
                    touches = contains_cell(lo_[0] + i + di, lo_[1] + j + dj);
            if (touches) boundary_.push_back({lo_[0] + i, lo_[1] + j});
        }
}

bool LatticeSet::contains_cell(std::int64_t i, std::int64_t j) const {
    if (n_ == 1) j = 0;
    if (i < lo_[0] || i >= hi_[0] || j < lo_[1] || j >= hi_[1]) return false;
    return mask_[static_cast<std::size_t>((i - lo_[0]) + ext_[0] * (j - lo_[1]))] != 0;
}

std::int64_t LatticeSet::count_in(std::array<std::int64_t, 2> lo, std::array<std::int64_t, 2> hi) const {
    if (n_ == 1) {
        lo[1] = 0;
        hi[1] = 1;
    }
    for (int i = 0; i < 2; ++i) {
        lo[i] = std::clamp(lo[i], lo_[i], hi_[i]) - lo_[i];
        hi[i] = std::clamp(hi[i], lo_[i], hi_[i]) - lo_[i];
        if (hi[i] <= lo[i]) return 0;
    }
    const auto at = [&](std::int64_t a, std::int64_t b) { return prefix_[static_cast<std::size_t>(a + (ext_[0] + 1) * b)]; };
    return at(hi[0], hi[1]) - at(lo[0], hi[1]) - at(hi[0], lo[1]) + at(lo[0], lo[1]);
}

bool LatticeSet::meets(const std::array<std::int64_t, 2>& lo, const std::array<std::int64_t, 2>& hi) const {
    return count_in(lo, hi) > 0;
}

std::int64_t LatticeSet::dist2_to_complement(const std::array<std::int64_t, 2>& lo, const std::array<std::int64_t, 2>& hi,
                                             std::int64_t scale) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& c : boundary_) {
        std::int64_t s = 0;
        for (int i = 0; i < n_; ++i) {
            const std::int64_t clo = c[i] * scale, chi = (c[i] + 1) * scale;
            const std::int64_t g = std::max<std::int64_t>({0, clo - hi[i], lo[i] - chi});
            s += g * g;
        }
        best = std::min(best, s);
        if (best == 0) break;
    }
    return best;
}

WhitneyCover whitney_decompose(const OpenSet& omega) {
    const LatticeSet set(omega);
    if (set.cell_count() == 0) throw DomainError("whitney: open set is empty");
    const int n = omega.n;
    WhitneyCover out;
    out.n = n;
    out.unit_exp = omega.unit_exp;

    std::int64_t extent = 1;
    for (int i = 0; i < n; ++i) extent = std::max(extent, set.bbox_hi()[i] - set.bbox_lo()[i]);
    std::int64_t top = 1;
    while (top < 2 * extent) top *= 2;
    // Every top-level cube is larger than the padded bounding box, so it holds
    // complement points and is never accepted itself.
    const auto floor_to = [](std::int64_t v, std::int64_t m) { return v >= 0 ? (v / m) * m : -((-v + m - 1) / m) * m; };
    std::array<std::int64_t, 2> start{0, 0}, stop{top, top};
    for (int i = 0; i < n; ++i) {
        start[i] = floor_to(set.bbox_lo()[i], top);
        stop[i] = set.bbox_hi()[i];
    }
    if (n == 1) stop[1] = 1;

    std::vector<WhitneyCube> stack;
    for (std::int64_t b = start[1]; b < stop[1]; b += top)
        for (std::int64_t a = start[0]; a < stop[0]; a += top) stack.push_back({{a, b}, top});
    std::reverse(stack.begin(), stack.end());

    while (!stack.empty()) {
        const WhitneyCube q = stack.back();
        stack.pop_back();
        std::array<std::int64_t, 2> hi = {q.corner[0] + q.edge, n == 2 ? q.corner[1] + q.edge : 1};
        if (!set.meets(q.corner, hi)) continue;
        const std::int64_t d2 = set.dist2_to_complement(q.corner, hi);
        if (d2 >= n * q.edge * q.edge) {
            out.cubes.push_back(q);
            continue;
        }
        if (q.edge == 1) {
            out.residual.push_back(q);
            continue;
        }
        const std::int64_t h = q.edge / 2;
        const int count = 1 << n;
        for (int m = count - 1; m >= 0; --m) {
            WhitneyCube c{{q.corner[0] + ((m & 1) ? h : 0), n == 2 ? q.corner[1] + ((m & 2) ? h : 0) : 0}, h};
            stack.push_back(c);
        }
    }
    return out;
}

WhitneyReport check_whitney(const OpenSet& omega, const WhitneyCover& cover, std::int64_t lambda16) {
    const LatticeSet set(omega);
    const int n = omega.n;
    WhitneyReport rep;
    const auto hi_of = [n](const WhitneyCube& q) {
        return std::array<std::int64_t, 2>{q.corner[0] + q.edge, n == 2 ? q.corner[1] + q.edge : 1};
    };

    // Tiling: every cell of Omega covered exactly once, nothing outside.
    {
        const auto lo = set.bbox_lo(), hi = set.bbox_hi();
        const std::int64_t w = hi[0] - lo[0], hgt = n == 2 ? hi[1] - lo[1] : 1;
        std::vector<int> count(static_cast<std::size_t>(w * hgt), 0);
        bool ok = true;
        const auto mark = [&](const WhitneyCube& q) {
            const auto qh = hi_of(q);
            for (std::int64_t j = (n == 2 ? q.corner[1] : 0); j < qh[1]; ++j)
                for (std::int64_t i = q.corner[0]; i < qh[0]; ++i) {
                    if (!set.contains_cell(i, j)) {
                        ok = false;
                        return;
                    }
                    ++count[static_cast<std::size_t>((i - lo[0]) + w * (n == 2 ? j - lo[1] : 0))];
                }
        };
        for (const auto& q : cover.cubes) mark(q);
        for (const auto& q : cover.residual) mark(q);
        if (ok) {
            for (std::int64_t j = 0; j < hgt && ok; ++j)
                for (std::int64_t i = 0; i < w && ok; ++i)
                    if (set.contains_cell(lo[0] + i, lo[1] + j) != (count[static_cast<std::size_t>(i + w * j)] == 1))
                        ok = false;
        }
        rep.tiling = ok;
    }

    rep.distance_bracket = true;
    for (const auto& q : cover.cubes) {
        const std::int64_t d2 = set.dist2_to_complement(q.corner, hi_of(q));
        const std::int64_t l2 = q.edge * q.edge;
        if (d2 < n * l2 || d2 > 16 * n * l2) rep.distance_bracket = false;
    }

    const auto& cs = cover.cubes;
    const auto touching = [&](const WhitneyCube& a, const WhitneyCube& b) {
        for (int i = 0; i < n; ++i)
            if (a.corner[i] > b.corner[i] + b.edge || b.corner[i] > a.corner[i] + a.edge) return false;
        return true;
    };
    rep.neighbor_ratio = true;
    const int touch_cap = (n == 1 ? 12 : 144) - (n == 1 ? 4 : 16);
    for (std::size_t a = 0; a < cs.size(); ++a) {
        int touches = 0;
        for (std::size_t b = 0; b < cs.size(); ++b) {
            if (!touching(cs[a], cs[b])) continue;
            ++touches;
            if (4 * cs[a].edge < cs[b].edge || 4 * cs[b].edge < cs[a].edge) rep.neighbor_ratio = false;
        }
        rep.max_touch = std::max(rep.max_touch, touches);
    }
    rep.touch_bound = rep.max_touch <= touch_cap;

    // Overlap of the dilates lambda Q_k, coordinates scaled by 32 so that
    // every corner is an integer.
    std::vector<std::array<std::int64_t, 4>> boxes;
    bool inside = true;
    for (const auto& q : cs) {
        std::array<std::int64_t, 2> lo{0, 0}, hi{0, 1};
        for (int i = 0; i < n; ++i) {
            const std::int64_t c = 32 * q.corner[i] + 16 * q.edge;
            lo[i] = c - lambda16 * q.edge;
            hi[i] = c + lambda16 * q.edge;
        }
        if (set.dist2_to_complement(lo, hi, 32) <= 0) inside = false;
        boxes.push_back({lo[0], hi[0], lo[1], hi[1]});
    }
    std::array<std::vector<std::int64_t>, 2> axes;
    for (int i = 0; i < 2; ++i) {
        for (const auto& b : boxes) {
            axes[i].push_back(b[2 * i]);
            axes[i].push_back(b[2 * i + 1]);
        }
        std::sort(axes[i].begin(), axes[i].end());
        axes[i].erase(std::unique(axes[i].begin(), axes[i].end()), axes[i].end());
    }
    // Sample points: every breakpoint (even index) and every gap midpoint (odd index).
    const auto idx = [&](int axis, std::int64_t v) {
        return 2 * static_cast<std::int64_t>(std::lower_bound(axes[axis].begin(), axes[axis].end(), v) - axes[axis].begin());
    };
    const std::int64_t nx = boxes.empty() ? 0 : 2 * static_cast<std::int64_t>(axes[0].size());
    const std::int64_t ny = n == 2 && !boxes.empty() ? 2 * static_cast<std::int64_t>(axes[1].size()) : 1;
    std::vector<int> diff(static_cast<std::size_t>((nx + 1) * (ny + 1)), 0);
    const auto cell = [&](std::int64_t a, std::int64_t b) -> int& { return diff[static_cast<std::size_t>(a + (nx + 1) * b)]; };
    for (const auto& b : boxes) {
        const std::int64_t a0 = idx(0, b[0]), a1 = idx(0, b[1]) + 1;
        const std::int64_t c0 = n == 2 ? idx(1, b[2]) : 0, c1 = n == 2 ? idx(1, b[3]) + 1 : 1;
        cell(a0, c0) += 1;
        cell(a1, c0) -= 1;
        cell(a0, c1) -= 1;
        cell(a1, c1) += 1;
    }
    for (std::int64_t b = 0; b <= ny; ++b)
        for (std::int64_t a = 0; a <= nx; ++a) {
            int v = cell(a, b);
            if (a > 0) v += cell(a - 1, b);
            if (b > 0) v += cell(a, b - 1);
            if (a > 0 && b > 0) v -= cell(a - 1, b - 1);
            cell(a, b) = v;
            rep.max_overlap = std::max(rep.max_overlap, v);
        }
    rep.overlap_bound = inside && rep.max_overlap <= touch_cap + 1;
    return rep;
}

} // namespace mwhardy
