#include "mwhardy/maximal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

namespace {

double norm2(const Point& x, int n) { return n == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1]; }

double raw_bump(const Point& x, int n) {
    const double r2 = norm2(x, n);
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

double quadrature_on_unit_cube(int n, const std::function<double(const Point&)>& f) {
    const int k = n == 1 ? 4096 : 256;
    const double s = 2.0 / k;
    std::vector<double> vals;
    vals.reserve(n == 1 ? k : k * k);
    for (int j = 0; j < (n == 1 ? 1 : k); ++j)
        for (int i = 0; i < k; ++i) vals.push_back(f({-1.0 + (i + 0.5) * s, n == 1 ? 0.0 : -1.0 + (j + 0.5) * s}));
    return pairwise_sum(vals) * (n == 1 ? s : s * s);
}

double binomial(int a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

inline double apply_norm(const cplx* mat, const cplx* v, int m) {
    double s = 0.0;
    if (!mat) {
        for (int j = 0; j < m; ++j) s += std::norm(v[j]);
        return std::sqrt(s);
    }
    for (int i = 0; i < m; ++i) {
        cplx acc(0.0);
        for (int j = 0; j < m; ++j) acc += mat[i + j * m] * v[j];
        s += std::norm(acc);
    }
    return std::sqrt(s);
}

double frobenius(const cplx* mat, int m) {
    if (!mat) return 1.0;
    double s = 0.0;
    for (int i = 0; i < m * m; ++i) s += std::norm(mat[i]);
    return std::sqrt(s);
}

struct Offset {
    int di = 0, dj = 0;
    double r = 0.0;
};

double offset_radius(const Grid& g, int di, int dj) { return g.h * std::sqrt(static_cast<double>(di * di + dj * dj)); }

std::vector<Offset> ball_offsets(const Grid& g, double a, double t) {
    std::vector<Offset> out;
    const int reach = static_cast<int>(std::ceil(a * t / g.h)) + 1;
    const int rj = g.n == 2 ? reach : 0;
    for (int dj = -rj; dj <= rj; ++dj)
        for (int di = -reach; di <= reach; ++di) {
            const double r = offset_radius(g, di, dj);
            if (r / t < a) out.push_back({di, dj, r});
        }
    return out;
}

bool shifted(const Grid& g, std::size_t x, int di, int dj, std::size_t& y) {
    const auto c = g.cell(x);
    const int i = c[0] + di, j = c[1] + dj;
    if (i < 0 || i >= g.cells || j < 0 || (g.n == 2 ? j >= g.cells : j != 0)) return false;
    y = g.index(i, j);
    return true;
}

void check_stack(const ConvolutionStack& s) {
    if (s.levels.empty() || s.levels.size() != s.scales.size()) throw PreconditionError("maximal: empty convolution stack");
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

ScalarField variant_field(const ConvolutionStack& s, const WeightMode& mode, GrandVariant v, double param) {
    switch (v) {
    case GrandVariant::Radial: return radial_maximal(s, mode);
    case GrandVariant::Nontangential: return nontangential_maximal(s, mode, param);
    case GrandVariant::Peetre: return peetre_maximal(s, mode, param);
    }
    return radial_maximal(s, mode);
}

ScalarField grand_from_fields(const std::vector<ScalarField>& fields, const std::vector<double>& seminorms) {
    ScalarField out(fields.front().grid, 0.0);
    for (std::size_t k = 0; k < fields.size(); ++k)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = std::max(out.values[i], fields[k].values[i] / seminorms[k]);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

TestFunction::TestFunction(int n, std::string name, Profile profile)
    : n_(n), name_(std::move(name)), profile_(std::move(profile)) {
    if (n != 1 && n != 2) throw PreconditionError("test function: n must be 1 or 2");
    integral_ = quadrature_on_unit_cube(n_, profile_);
}

TestFunction TestFunction::bump(int n) {
    static const double c1 = quadrature_on_unit_cube(1, [](const Point& x) { return raw_bump(x, 1); });
    static const double c2 = quadrature_on_unit_cube(2, [](const Point& x) { return raw_bump(x, 2); });
    const double c = n == 1 ? c1 : c2;
    return TestFunction(n, "bump", [n, c](const Point& x) { return raw_bump(x, n) / c; });
}

std::vector<double> TestFunction::seminorms(int n_max) const {
    if (n_max < 0) throw PreconditionError("seminorm: N must be nonnegative");
    const double s = n_ == 1 ? 1.0 / 128 : 1.0 / 64; // lattice step; difference step is 2s
    const double hd = 2.0 * s;
    const int top = n_max + 1; // highest derivative order
    const int K = static_cast<int>(std::ceil(1.0 / s)) + top + 2;
    const int side = 2 * K + 1;
    std::vector<double> lat(static_cast<std::size_t>(n_ == 1 ? side : side * side));
    for (int j = 0; j < (n_ == 1 ? 1 : side); ++j)
        for (int i = 0; i < side; ++i) lat[i + side * j] = profile_({(i - K) * s, n_ == 1 ? 0.0 : (j - K) * s});
    auto at = [&](int i, int j) { return lat[(i + K) + side * (n_ == 1 ? 0 : j + K)]; };

    std::vector<std::pair<int, int>> alphas;
    for (int k = 0; k <= top; ++k)
        for (int a1 = k; a1 >= 0; --a1)
            if (n_ == 2 || a1 == k) alphas.push_back({a1, k - a1});

    const int inner = K - top;
    std::vector<double> best(n_max + 1, 0.0);
    std::vector<double> by_order(top + 1);
    for (int j = (n_ == 1 ? 0 : -inner); j <= (n_ == 1 ? 0 : inner); ++j)
        for (int i = -inner; i <= inner; ++i) {
            std::fill(by_order.begin(), by_order.end(), 0.0);
            for (const auto& [a1, a2] : alphas) {
                double d = 0.0;
                for (int p = 0; p <= a1; ++p)
                    for (int q = 0; q <= a2; ++q) {
                        const double c = binomial(a1, p) * binomial(a2, q) * (((a1 - p) + (a2 - q)) % 2 ? -1.0 : 1.0);
                        d += c * at(i + 2 * p - a1, j + 2 * q - a2);
                    }
                d = std::abs(d) / std::pow(hd, a1 + a2);
                by_order[a1 + a2] = std::max(by_order[a1 + a2], d);
            }
            for (int k = 1; k <= top; ++k) by_order[k] = std::max(by_order[k], by_order[k - 1]);
            const double rho = 1.0 + std::sqrt(norm2({i * s, j * s}, n_));
            double w = 1.0;
            for (int e = 0; e < n_; ++e) w *= rho;
            for (int N = 0; N <= n_max; ++N) {
                w *= rho;
                best[N] = std::max(best[N], by_order[N + 1] * w);
            }
        }
    return best;
}

SchwartzDictionary SchwartzDictionary::from(std::vector<TestFunction> members, int N) {
    if (members.empty()) throw PreconditionError("dictionary: no members");
    SchwartzDictionary d;
    d.N = N;
    for (const auto& m : members) d.seminorms.push_back(m.seminorm(N));
    d.members = std::move(members);
    return d;
}

namespace {

std::vector<TestFunction> standard_members(int n, std::size_t size, const TestFunction* leading) {
    const TestFunction psi = leading ? *leading : TestFunction::bump(n);
    std::vector<TestFunction> out;
    auto add = [&](std::string name, std::function<double(const Point&)> f) {
        if (out.size() < size) out.emplace_back(n, std::move(name), std::move(f));
    };
    auto dilate = [psi](double c, Point shift) {
        return [psi, c, shift](const Point& x) { return psi({c * (x[0] - shift[0]), c * (x[1] - shift[1])}); };
    };
    const char* axis[2] = {"e1", "e2"};
    out.push_back(psi);
    add("psi(2x)", dilate(2.0, {0.0, 0.0}));
    add("psi(4x)", dilate(4.0, {0.0, 0.0}));
    auto translates = [&](double c, double off, const char* tag) {
        for (int i = 0; i < n; ++i)
            for (double sgn : {1.0, -1.0}) {
                Point sh{0.0, 0.0};
                sh[i] = sgn * off;
                add(std::string("psi(") + (c == 2.0 ? "2" : "4") + "(x" + (sgn > 0 ? "-" : "+") + tag + axis[i] + "))",
                    dilate(c, sh));
            }
    };
    translates(2.0, 0.5, "");
    for (int i = 0; i < n; ++i) add(std::string("x") + char('1' + i) + "*psi", [psi, i](const Point& x) { return x[i] * psi(x); });
    translates(4.0, 0.75, "3/4");
    translates(2.0, 0.25, "1/4");
    for (int i = 0; i < n; ++i)
        add(std::string("x") + char('1' + i) + "*psi(2x)", [psi, i](const Point& x) { return x[i] * psi({2 * x[0], 2 * x[1]}); });
    for (int i = 0; i < n; ++i)
        add(std::string("x") + char('1' + i) + "^2*psi", [psi, i](const Point& x) { return x[i] * x[i] * psi(x); });
    if (out.size() > size) out.resize(size);
    return out;
}

} // namespace

SchwartzDictionary SchwartzDictionary::standard(int n, int N, std::size_t size, const TestFunction* leading) {
    if (size == 0) throw PreconditionError("dictionary: size must be positive");
    return from(standard_members(n, size, leading), N);
}

int grand_parameter(int n, double p, double d_lower, double d_upper) {
    return static_cast<int>(std::floor(n / p + (d_lower + 2.0 * d_upper) / p)) + 1;
}

// ---------------------------------------------------------------------------

VectorField convolve_scale(const VectorField& f, const TestFunction& psi, double t) {
    const Grid& g = f.grid;
    if (psi.n() != g.n) throw PreconditionError("convolve: dimension mismatch");
    if (t < 2.0 * g.h) throw ResolutionError("convolve: scale " + std::to_string(t) + " below 2h");
    struct Tap {
        int di, dj;
        double w;
    };
    std::vector<Tap> taps;
    const int reach = static_cast<int>(std::ceil(t / g.h));
    const int rj = g.n == 2 ? reach : 0;
    const double scale = g.n == 1 ? g.h / t : (g.h / t) * (g.h / t);
    for (int dj = -rj; dj <= rj; ++dj)
        for (int di = -reach; di <= reach; ++di) {
            const double w = psi({di * g.h / t, dj * g.h / t});
            if (w != 0.0) taps.push_back({di, dj, w * scale});
        }
    VectorField out(g, f.m);
    const int m = f.m;
    // outputs beyond the support dilated by the kernel reach stay zero
    std::array<int, 2> lo{g.cells, g.n == 2 ? g.cells : 0}, hi{-1, g.n == 2 ? -1 : 0};
    for (std::size_t x = 0; x < g.size(); ++x) {
        bool nonzero = false;
        for (int k = 0; k < m && !nonzero; ++k) nonzero = f.data[x * m + k] != cplx(0.0);
        if (!nonzero) continue;
        const auto c = g.cell(x);
        for (int a = 0; a < g.n; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    if (hi[0] < lo[0]) return out;
    std::vector<std::size_t> targets;
    for (int j = std::max(0, lo[1] - rj); j <= std::min(g.n == 2 ? g.cells - 1 : 0, hi[1] + rj); ++j)
        for (int i = std::max(0, lo[0] - reach); i <= std::min(g.cells - 1, hi[0] + reach); ++i) targets.push_back(g.index(i, j));
    parallel_for(targets.size(), [&](std::size_t ti) {
        const std::size_t x = targets[ti];
        const auto c = g.cell(x);
        cplx* dst = out.data.data() + x * m;
        for (const auto& tap : taps) {
            const int i = c[0] - tap.di, j = c[1] - tap.dj;
            if (i < 0 || i >= g.cells || j < 0 || (g.n == 2 ? j >= g.cells : j != 0)) continue;
            const cplx* src = f.data.data() + g.index(i, j) * m;
            for (int k = 0; k < m; ++k) dst[k] += tap.w * src[k];
        }
    });
    return out;
}

ConvolutionStack convolve_stack(const VectorField& f, const TestFunction& psi, const std::vector<double>& scales) {
    ConvolutionStack s;
    s.scales = scales;
    for (double t : scales) s.levels.push_back(convolve_scale(f, psi, t));
    return s;
}

// ---------------------------------------------------------------------------

WeightMode WeightMode::unweighted(int m) {
    WeightMode w;
    w.m_ = m;
    return w;
}

WeightMode WeightMode::pointwise(const WeightSamples& ws) {
    WeightMode w;
    w.m_ = ws.m();
    w.samples_ = &ws;
    return w;
}

WeightMode WeightMode::reducing(const ReducingFamily& family) {
    WeightMode w;
    w.m_ = family.m;
    w.family_ = &family;
    return w;
}

std::string WeightMode::name() const {
    if (family_) return "A";
    if (samples_) return "W";
    return "none";
}

WeightMode::Bound WeightMode::bind(double t) const { return Bound{this, family_ ? family_->scale_index(t) : 0}; }

const cplx* WeightMode::Bound::matrix(std::size_t x) const {
    if (mode->samples_) return mode->samples_->root.data.data() + x * mode->m_ * mode->m_;
    if (mode->family_) return mode->family_->at(slot, x).matrix().data();
    return nullptr;
}

ScalarField radial_maximal(const ConvolutionStack& s, const WeightMode& mode) {
    check_stack(s);
    const Grid& g = s.levels.front().grid;
    const int m = mode.m();
    ScalarField out(g, 0.0);
    for (std::size_t k = 0; k < s.scales.size(); ++k) {
        const auto bound = mode.bind(s.scales[k]);
        const cplx* v = s.levels[k].data.data();
        parallel_for(g.size(), [&](std::size_t x) {
            out.values[x] = std::max(out.values[x], apply_norm(bound.matrix(x), v + x * m, m));
        });
    }
    return out;
}

ScalarField nontangential_maximal(const ConvolutionStack& s, const WeightMode& mode, double a) {
    check_stack(s);
    if (!(a > 0.0)) throw PreconditionError("nontangential: aperture must be positive");
    const Grid& g = s.levels.front().grid;
    const int m = mode.m();
    ScalarField out(g, 0.0);
    for (std::size_t k = 0; k < s.scales.size(); ++k) {
        const auto bound = mode.bind(s.scales[k]);
        const auto offs = ball_offsets(g, a, s.scales[k]);
        const cplx* v = s.levels[k].data.data();
        parallel_for(g.size(), [&](std::size_t x) {
            const cplx* mat = bound.matrix(x);
            double best = out.values[x];
            std::size_t y;
            for (const auto& o : offs)
                if (shifted(g, x, o.di, o.dj, y)) best = std::max(best, apply_norm(mat, v + y * m, m));
            out.values[x] = best;
        });
    }
    return out;
}

ScalarField nontangential_infimum_maximal(const ConvolutionStack& s, const WeightMode& mode, double a, double b) {
    check_stack(s);
    if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("infimum maximal: a and b must be positive");
    const Grid& g = s.levels.front().grid;
    const int m = mode.m();
    const double lo = g.L / g.h;
    if (std::abs(lo - std::round(lo)) > 1e-9) throw AlignmentError("infimum maximal: L/h must be an integer");
    const auto origin = static_cast<std::int64_t>(std::llround(lo));
    ScalarField out(g, 0.0);
    for (std::size_t k = 0; k < s.scales.size(); ++k) {
        const double t = s.scales[k];
        const double cr = b * t / g.h;
        if (cr < 1.0 - 1e-9 || std::abs(cr - std::round(cr)) > 1e-9)
            throw AlignmentError("infimum maximal: bt/h must be a positive integer at t = " + std::to_string(t));
        const auto c = static_cast<std::int64_t>(std::llround(cr));
        const auto bound = mode.bind(t);
        const auto offs = ball_offsets(g, a, t);
        const cplx* v = s.levels[k].data.data();
        parallel_for(g.size(), [&](std::size_t x) {
            const cplx* mat = bound.matrix(x);
            std::vector<std::pair<std::int64_t, std::int64_t>> cubes;
            std::size_t y;
            for (const auto& o : offs)
                if (shifted(g, x, o.di, o.dj, y)) {
                    const auto cy = g.cell(y);
                    cubes.push_back({floor_div(cy[0] - origin, c), g.n == 2 ? floor_div(cy[1] - origin, c) : 0});
                }
            if (cubes.empty()) throw InvariantError("infimum maximal: no cube meets the ball");
            std::sort(cubes.begin(), cubes.end());
            cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
            double best = out.values[x];
            for (const auto& [qi, qj] : cubes) {
                const auto i0 = std::max<std::int64_t>(0, origin + qi * c);
                const auto i1 = std::min<std::int64_t>(g.cells, origin + (qi + 1) * c);
                const auto j0 = g.n == 2 ? std::max<std::int64_t>(0, origin + qj * c) : 0;
                const auto j1 = g.n == 2 ? std::min<std::int64_t>(g.cells, origin + (qj + 1) * c) : 1;
                double low = std::numeric_limits<double>::infinity();
                for (auto j = j0; j < j1; ++j)
                    for (auto i = i0; i < i1; ++i)
                        low = std::min(low, apply_norm(mat, v + g.index(static_cast<int>(i), static_cast<int>(j)) * m, m));
                best = std::max(best, low);
            }
            out.values[x] = best;
        });
    }
    return out;
}

ScalarField peetre_maximal(const ConvolutionStack& s, const WeightMode& mode, double l) {
    check_stack(s);
    if (!(l > 0.0)) throw PreconditionError("peetre: l must be positive");
    const Grid& g = s.levels.front().grid;
    const int m = mode.m();
    const int span = 2 * g.cells - 1;
    ScalarField out(g, 0.0);
    for (std::size_t k = 0; k < s.scales.size(); ++k) {
        const double t = s.scales[k];
        const auto bound = mode.bind(t);
        const cplx* v = s.levels[k].data.data();
        std::vector<double> damp(static_cast<std::size_t>(g.n == 1 ? span : span * span));
        for (int dj = (g.n == 2 ? -(g.cells - 1) : 0); dj <= (g.n == 2 ? g.cells - 1 : 0); ++dj)
            for (int di = -(g.cells - 1); di <= g.cells - 1; ++di)
                damp[(di + g.cells - 1) + span * (g.n == 2 ? dj + g.cells - 1 : 0)] =
                    std::pow(1.0 + offset_radius(g, di, dj) / t, -l);
        std::vector<double> vnorm(g.size());
        for (std::size_t y = 0; y < g.size(); ++y) vnorm[y] = apply_norm(nullptr, v + y * m, m);
        std::vector<std::size_t> order(g.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return vnorm[p] > vnorm[q]; });
        parallel_for(g.size(), [&](std::size_t x) {
            const cplx* mat = bound.matrix(x);
            const double cap = frobenius(mat, m) * (1.0 + 1e-10);
            const auto cx = g.cell(x);
            double best = out.values[x];
            for (std::size_t y : order) {
                if (cap * vnorm[y] < best) break;
                const auto cy = g.cell(y);
                const double d = damp[(cy[0] - cx[0] + g.cells - 1) + span * (g.n == 2 ? cy[1] - cx[1] + g.cells - 1 : 0)];
                best = std::max(best, apply_norm(mat, v + y * m, m) * d);
            }
            out.values[x] = best;
        });
    }
    return out;
}

ScalarField grand_maximal(const std::vector<ConvolutionStack>& member_stacks, const SchwartzDictionary& dict,
                          GrandVariant variant, double param, const WeightMode& mode) {
    if (dict.members.empty() || member_stacks.size() != dict.members.size())
        throw PreconditionError("grand maximal: dictionary and stacks disagree or are empty");
    std::vector<ScalarField> fields;
    for (const auto& s : member_stacks) fields.push_back(variant_field(s, mode, variant, param));
    return grand_from_fields(fields, dict.seminorms);
}

ScalarField grand_maximal(const VectorField& f, const SchwartzDictionary& dict, GrandVariant variant, double param,
                          const WeightMode& mode) {
    if (dict.members.empty()) throw PreconditionError("grand maximal: empty dictionary");
    const auto scales = dyadic_scales(f.grid);
    std::vector<ConvolutionStack> stacks;
    for (const auto& phi : dict.members) stacks.push_back(convolve_stack(f, phi, scales));
    return grand_maximal(stacks, dict, variant, param, mode);
}

// ---------------------------------------------------------------------------

double lp_quasinorm(const ScalarField& g, double p) {
    if (!(p > 0.0)) throw PreconditionError("lp: p must be positive");
    std::vector<double> v(g.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p == 1.0 ? g.values[i] : std::pow(g.values[i], p);
    const double s = pairwise_sum(v) * g.grid.cell_volume();
    return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double weighted_lp_norm(const VectorField& f, const WeightSamples& ws) {
    ScalarField g(f.grid);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = apply_norm(ws.root.data.data() + i * f.m * f.m, f.data.data() + i * f.m, f.m);
    return lp_quasinorm(g, ws.p);
}

double hardy_quasinorm(const VectorField& f, const TestFunction& psi, const WeightSamples& ws) {
    const auto s = convolve_stack(f, psi, dyadic_scales(f.grid));
    return lp_quasinorm(radial_maximal(s, WeightMode::pointwise(ws)), ws.p);
}

// ---------------------------------------------------------------------------

ChainReport chain_check(const VectorField& f, const TestFunction& psi, const MaximalConfig& cfg, const WeightMode& mode) {
    const Grid& g = f.grid;
    const auto scales = dyadic_scales(g);
    auto members = standard_members(g.n, cfg.dictionary_size, &psi);
    std::vector<double> sn_n, sn_n1;
    for (const auto& phi : members) {
        const auto table = phi.seminorms(cfg.N + 1);
        sn_n.push_back(table[cfg.N]);
        sn_n1.push_back(table[cfg.N + 1]);
    }
    std::vector<ConvolutionStack> stacks;
    for (const auto& phi : members) stacks.push_back(convolve_stack(f, phi, scales));

    ChainReport rep;
    auto compare = [&](const std::string& name, const std::vector<double>& lhs, const std::vector<double>& rhs) {
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            ++rep.comparisons;
            if (!(lhs[i] <= rhs[i])) rep.violations.push_back({name, i, lhs[i], rhs[i]});
        }
    };

    const auto& s0 = stacks.front();
    const auto radial = radial_maximal(s0, mode);
    const auto nt = nontangential_maximal(s0, mode, cfg.a);
    const auto inf = nontangential_infimum_maximal(s0, mode, cfg.a, cfg.b);
    const auto peetre = peetre_maximal(s0, mode, cfg.l);
    compare("radial <= nontangential", radial.values, nt.values);
    std::vector<double> damped(nt.values.size());
    const double c = std::pow(1.0 + cfg.a, -cfg.l);
    for (std::size_t i = 0; i < damped.size(); ++i) damped[i] = nt.values[i] * c;
    compare("nontangential (1+a)^-l <= peetre", damped, peetre.values);
    compare("infimum <= nontangential", inf.values, nt.values);

    const std::pair<GrandVariant, double> variants[] = {
        {GrandVariant::Radial, 0.0}, {GrandVariant::Nontangential, cfg.a}, {GrandVariant::Peetre, cfg.l}};
    for (const auto& [variant, param] : variants) {
        std::vector<ScalarField> fields;
        for (const auto& s : stacks) fields.push_back(variant_field(s, mode, variant, param));
        const auto grand = grand_from_fields(fields, sn_n);
        const auto grand_next = grand_from_fields(fields, sn_n1);
        std::vector<double> single(fields.front().values.size());
        for (std::size_t i = 0; i < single.size(); ++i) single[i] = fields.front().values[i] / sn_n.front();
        const std::string tag = variant == GrandVariant::Radial ? "radial" : variant == GrandVariant::Peetre ? "peetre" : "nontangential";
        compare("single / ||psi||_SN <= grand " + tag, single, grand.values);
        compare("grand " + tag + " at N+1 <= at N", grand_next.values, grand.values);
    }
    return rep;
}

} // namespace mwhardy
