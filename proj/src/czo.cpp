#include "mwhardy/czo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

namespace {

struct Quadrature {
    std::vector<Point> points;
    std::vector<double> weights;
};

// nodes and weights on [-1, 1]
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count) {
    std::vector<double> x(count), w(count);
    for (int i = 0; i < (count + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < count; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = count * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[count - 1 - i] = z;
        w[i] = w[count - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

void add_interval(Quadrature& q, double a, double b, int panels, const std::vector<double>& gx,
                  const std::vector<double>& gw) {
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * step;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            q.points.push_back({mid + 0.5 * step * gx[i], 0.0});
            q.weights.push_back(0.5 * step * gw[i]);
        }
    }
}

void add_rect(Quadrature& q, Point lo, Point hi, int panels, const std::vector<double>& gx,
              const std::vector<double>& gw) {
    const double wx = hi[0] - lo[0], wy = hi[1] - lo[1];
    const double unit = std::min(wx, wy);
    const int px = panels * static_cast<int>(std::ceil(wx / unit - 1e-9));
    const int py = panels * static_cast<int>(std::ceil(wy / unit - 1e-9));
    const double sx = wx / px, sy = wy / py;
    for (int a = 0; a < px; ++a)
        for (int b = 0; b < py; ++b) {
            const double mx = lo[0] + (a + 0.5) * sx, my = lo[1] + (b + 0.5) * sy;
            for (std::size_t i = 0; i < gx.size(); ++i)
                for (std::size_t j = 0; j < gx.size(); ++j) {
                    q.points.push_back({mx + 0.5 * sx * gx[i], my + 0.5 * sy * gx[j]});
                    q.weights.push_back(0.25 * sx * sy * gw[i] * gw[j]);
                }
        }
}

Quadrature annulus_rule(int n, const Point& c, double r_in, double r_out, int panels, int nodes) {
    const auto [gx, gw] = gauss_legendre(nodes);
    Quadrature q;
    if (n == 1) {
        add_interval(q, c[0] - r_out, c[0] - r_in, panels, gx, gw);
        add_interval(q, c[0] + r_in, c[0] + r_out, panels, gx, gw);
        return q;
    }
    add_rect(q, {c[0] - r_out, c[1] + r_in}, {c[0] + r_out, c[1] + r_out}, panels, gx, gw);
    add_rect(q, {c[0] - r_out, c[1] - r_out}, {c[0] + r_out, c[1] - r_in}, panels, gx, gw);
    add_rect(q, {c[0] - r_out, c[1] - r_in}, {c[0] - r_in, c[1] + r_in}, panels, gx, gw);
    add_rect(q, {c[0] + r_in, c[1] - r_in}, {c[0] + r_out, c[1] + r_in}, panels, gx, gw);
    return q;
}

std::vector<std::array<int, 2>> exponents(int n, int s) {
    std::vector<std::array<int, 2>> out;
    for (int d = 0; d <= s; ++d) {
        if (n == 1) {
            out.push_back({d, 0});
            continue;
        }
        for (int j = 0; j <= d; ++j) out.push_back({d - j, j});
    }
    return out;
}

double monomial(const std::array<int, 2>& e, const Point& x) {
    return std::pow(x[0], e[0]) * std::pow(x[1], e[1]);
}

// d^gamma of K in the chosen variable by nested central differences with step eps
double derivative(const Kernel& k, const Point& x, const Point& y, std::array<int, 2> gamma, bool first, double eps) {
    for (int axis = 0; axis < 2; ++axis) {
        if (gamma[axis] == 0) continue;
        --gamma[axis];
        Point xp = x, xm = x, yp = y, ym = y;
        if (first) {
            xp[axis] += eps;
            xm[axis] -= eps;
        } else {
            yp[axis] += eps;
            ym[axis] -= eps;
        }
        return (derivative(k, xp, yp, gamma, first, eps) - derivative(k, xm, ym, gamma, first, eps)) / (2.0 * eps);
    }
    return k(x, y);
}

} // namespace

Kernel Kernel::rational(int n, std::string name, std::vector<KernelTerm> terms, double radial_power, int order,
                        double delta) {
    if (n != 1 && n != 2) throw PreconditionError("kernel dimension must be 1 or 2");
    if (terms.empty()) throw PreconditionError("kernel needs at least one numerator term");
    if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("kernel Holder exponent must lie in (0, 1]");
    if (order < 0) throw PreconditionError("kernel order must be nonnegative");
    for (const auto& t : terms)
        if (t.powers[0] < 0 || t.powers[1] < 0 || (n == 1 && t.powers[1] != 0))
            throw PreconditionError("kernel term powers must be nonnegative and fit the dimension");
    Kernel k;
    k.n_ = n;
    k.name_ = std::move(name);
    k.terms_ = std::move(terms);
    k.radial_power_ = radial_power;
    k.order_ = order;
    k.delta_ = delta;
    return k;
}

Kernel Kernel::hilbert() { return rational(1, "hilbert", {{1.0 / std::numbers::pi, {1, 0}}}, 2.0); }

Kernel Kernel::riesz2d() { return rational(2, "riesz2d", {{0.5 / std::numbers::pi, {1, 0}}}, 3.0); }

Kernel Kernel::identity(int n) {
    Kernel k;
    k.n_ = n;
    k.name_ = "identity";
    k.identity_ = true;
    return k;
}

double Kernel::at_offset(const Point& u) const {
    if (identity_) return 0.0;
    const double r2 = u[0] * u[0] + (n_ == 2 ? u[1] * u[1] : 0.0);
    if (r2 == 0.0) return 0.0;
    double num = 0.0;
    for (const auto& t : terms_) num += t.coef * monomial(t.powers, u);
    return num * std::pow(r2, -0.5 * radial_power_);
}

KernelReport kernel_validate(const Kernel& k, std::size_t budget, std::uint64_t seed) {
    KernelReport rep;
    if (k.is_identity()) {
        rep.failures.push_back("identity is not an off-diagonal kernel");
        return rep;
    }
    const int n = k.n();
    const int s = k.order();
    const double delta = k.delta();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto direction = [&]() -> Point {
        if (n == 1) return {unit(rng) < 0.5 ? -1.0 : 1.0, 0.0};
        const double a = 2.0 * std::numbers::pi * unit(rng);
        return {std::cos(a), std::sin(a)};
    };
    constexpr int kBands = 6; // decades of |x - y| from 1e-3
    std::vector<std::array<double, kBands>> size_band(s + 1), reg_band(s + 1);
    for (auto& b : size_band) b.fill(0.0);
    for (auto& b : reg_band) b.fill(0.0);

    for (std::size_t it = 0; it < budget; ++it) {
        const double lr = -3.0 + 6.0 * unit(rng);
        const double r = std::pow(10.0, lr);
        const int band = std::min(kBands - 1, static_cast<int>(lr + 3.0));
        const Point x{2.0 * unit(rng) - 1.0, n == 2 ? 2.0 * unit(rng) - 1.0 : 0.0};
        const Point d = direction();
        const Point y{x[0] + r * d[0], x[1] + r * d[1]};
        const double rho = r * std::pow(10.0, -3.0 + (3.0 - std::log10(2.0)) * unit(rng));
        const Point e = direction();
        const bool first = it % 2 == 1;
        // perturb the differentiated variable
        const Point z = first ? Point{x[0] + rho * e[0], x[1] + rho * e[1]} : Point{y[0] + rho * e[0], y[1] + rho * e[1]};
        const double eps = 1e-4 * r;
        for (int order = 0; order <= s; ++order)
            for (const auto& gamma : exponents(n, order)) {
                if (order != gamma[0] + gamma[1]) continue;
                const double dk = derivative(k, x, y, gamma, first, 1e-3 * r);
                const double size = std::abs(dk) * std::pow(r, n + order);
                size_band[order][band] = std::max(size_band[order][band], size);
                const double dz = first ? derivative(k, z, y, gamma, true, eps) : derivative(k, x, z, gamma, false, eps);
                const double dk_fine = derivative(k, x, y, gamma, first, eps);
                const double reg = std::abs(dk_fine - dz) * std::pow(r, n + order + delta) / std::pow(rho, delta);
                reg_band[order][band] = std::max(reg_band[order][band], reg);
            }
        ++rep.samples;
    }

    auto judge = [&](const std::array<double, kBands>& b, const std::string& label) {
        const double mid = std::max(b[2], b[3]);
        const double top = *std::max_element(b.begin(), b.end());
        if (!std::isfinite(top)) rep.failures.push_back(label + ": non-finite value");
        else if (b[kBands - 1] > 10.0 * mid) rep.failures.push_back(label + ": grows at large |x - y|");
        else if (b[0] > 10.0 * mid) rep.failures.push_back(label + ": grows near the diagonal");
        return top;
    };
    for (int order = 0; order <= s; ++order) {
        rep.size_constant.push_back(judge(size_band[order], "size, order " + std::to_string(order)));
        rep.regularity_constant.push_back(judge(reg_band[order], "regularity, order " + std::to_string(order)));
        rep.c_k = std::max({rep.c_k, rep.size_constant.back(), rep.regularity_constant.back()});
    }
    rep.finite = rep.failures.empty() && std::isfinite(rep.c_k);
    return rep;
}

VectorField truncated_apply(const Kernel& k, double eta, const VectorField& f) {
    const Grid& g = f.grid;
    if (g.n != k.n()) throw PreconditionError("kernel and field dimensions differ");
    if (eta < 2.0 * g.h * (1.0 - 1e-12)) throw ResolutionError("truncation below twice the grid spacing");
    if (k.is_identity()) return f;

    const int c = g.cells;
    const int span = 2 * c - 1;
    const int rad = c - 1;
    std::vector<double> table(g.n == 1 ? span : static_cast<std::size_t>(span) * span, 0.0);
    const double eta2 = eta * eta * (1.0 - 1e-12);
    const double vol = g.cell_volume();
    for (int dy = g.n == 2 ? -rad : 0; dy <= (g.n == 2 ? rad : 0); ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
            const Point u{dx * g.h, dy * g.h};
            if (u[0] * u[0] + u[1] * u[1] < eta2) continue;
            table[static_cast<std::size_t>(dx + rad) + static_cast<std::size_t>(span) * (dy + (g.n == 2 ? rad : 0))] =
                k.at_offset(u) * vol;
        }

    std::vector<std::size_t> sources;
    for (std::size_t y = 0; y < g.size(); ++y)
        if (!f.at(y).isZero(0.0)) sources.push_back(y);

    VectorField out(g, f.m);
    parallel_for(g.size(), [&](std::size_t x) {
        const auto cx = g.cell(x);
        auto acc = out.at(x);
        for (std::size_t y : sources) {
            const auto cy = g.cell(y);
            const double w = table[static_cast<std::size_t>(cx[0] - cy[0] + rad) +
                                   static_cast<std::size_t>(span) * (g.n == 2 ? cx[1] - cy[1] + rad : 0)];
            if (w != 0.0) acc += w * f.at(y);
        }
    });
    return out;
}

VectorField principal_value_apply(const Kernel& k, double eta, const VectorField& f) {
    const double h = f.grid.h;
    if (eta < 4.0 * h * (1.0 - 1e-12)) throw ResolutionError("principal value ladder needs eta >= 4h");
    if (k.is_identity()) return f;
    const auto coarse = truncated_apply(k, eta, f);
    auto fine = truncated_apply(k, eta / 2, f);
    const double e1 = eta - h, e2 = eta / 2 - h;
    const double w = e2 / (e1 - e2);
    for (std::size_t i = 0; i < fine.data.size(); ++i) fine.data[i] += w * (fine.data[i] - coarse.data[i]);
    return fine;
}

CVector apply_at(const Kernel& k, const Grid& g, const LocalField& a, const Point& x) {
    CVector out = CVector::Zero(a.m);
    if (k.is_identity()) return out;
    const double vol = g.cell_volume();
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto y = g.point(a.samples[i]);
        const double w = k(x, y) * vol;
        for (int c = 0; c < a.m; ++c) out(c) += w * a.values[i * a.m + c];
    }
    return out;
}

double annulus_integral(int n, const Point& c, double r_in, double r_out, const std::function<double(const Point&)>& g,
                        int panels, int nodes) {
    const auto q = annulus_rule(n, c, r_in, r_out, panels, nodes);
    std::vector<double> terms(q.points.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = q.weights[i] * g(q.points[i]);
    return pairwise_sum(terms);
}

MomentReport vanishing_moment_check(const Kernel& k, const std::vector<Atom>& atoms, const Grid& g, int s,
                                    double c_k) {
    MomentReport rep;
    const int n = g.n;
    const auto gammas = exponents(n, s);
    const std::vector<double> etas{8.0 * g.h, 4.0 * g.h, 2.0 * g.h};
    const double sigma = n == 1 ? 2.0 : 2.0 * std::numbers::pi;
    constexpr int kOctaves = 16;

    for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
        const auto& atom = atoms[ai];
        const int m = atom.field.m;
        const double l1 = atom.field.l1_norm(g);
        const auto field = atom.field.to_field(g);
        const double ext = atom.cube.edge + std::max(std::abs(atom.cube.center[0]), std::abs(atom.cube.center[1]));

        // domain integrals per eta, gamma, component
        std::vector<std::vector<std::vector<cplx>>> dom(etas.size(),
                                                        std::vector<std::vector<cplx>>(gammas.size(), std::vector<cplx>(m)));
        for (std::size_t e = 0; e < etas.size(); ++e) {
            const auto t = truncated_apply(k, etas[e], field);
            for (std::size_t gi = 0; gi < gammas.size(); ++gi)
                for (int c = 0; c < m; ++c) {
                    std::vector<double> re(g.size()), im(g.size());
                    for (std::size_t x = 0; x < g.size(); ++x) {
                        const cplx v = t.at(x)(c) * monomial(gammas[gi], g.point(x)) * g.cell_volume();
                        re[x] = v.real();
                        im[x] = v.imag();
                    }
                    dom[e][gi][c] = {pairwise_sum(re), pairwise_sum(im)};
                }
        }

        // far field over the complement of the domain
        std::vector<std::vector<cplx>> far(gammas.size(), std::vector<cplx>(m, cplx(0.0)));
        if (!k.is_identity() && l1 > 0.0) {
            for (int o = 0; o < kOctaves; ++o) {
                const auto q = annulus_rule(n, {0.0, 0.0}, g.L * std::ldexp(1.0, o), g.L * std::ldexp(1.0, o + 1),
                                            n == 1 ? 8 : 2, 8);
                std::vector<CVector> vals(q.points.size());
                parallel_for(q.points.size(), [&](std::size_t i) { vals[i] = apply_at(k, g, atom.field, q.points[i]); });
                for (std::size_t gi = 0; gi < gammas.size(); ++gi)
                    for (int c = 0; c < m; ++c) {
                        std::vector<double> re(q.points.size()), im(q.points.size());
                        for (std::size_t i = 0; i < q.points.size(); ++i) {
                            const cplx v = vals[i](c) * q.weights[i] * monomial(gammas[gi], q.points[i]);
                            re[i] = v.real();
                            im[i] = v.imag();
                        }
                        far[gi][c] += cplx(pairwise_sum(re), pairwise_sum(im));
                    }
            }
        }

        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            MomentEntry entry;
            entry.atom = ai;
            entry.gamma = gammas[gi];
            entry.etas = etas;
            const int order = gammas[gi][0] + gammas[gi][1];
            const double scale = l1 * std::pow(ext, order);
            double worst = -1.0;
            for (int c = 0; c < m; ++c) {
                const cplx i1 = dom[0][gi][c], i2 = dom[1][gi][c], i3 = dom[2][gi][c];
                cplx limit = i3;
                const double d12 = std::abs(i1 - i2), d23 = std::abs(i2 - i3);
                if (d23 > 1e-14 * std::max(scale, 1e-300) && d12 > d23) {
                    const double q = std::clamp(std::log2(d12 / d23), 1.0, 4.0);
                    limit = i3 + (i3 - i2) / (std::exp2(q) - 1.0);
                }
                const double res = scale > 0.0 ? std::abs(limit + far[gi][c]) / scale : 0.0;
                if (res > worst) {
                    worst = res;
                    entry.domain_values = {std::abs(i1), std::abs(i2), std::abs(i3)};
                    entry.domain_limit = std::abs(limit);
                    entry.far_field = std::abs(far[gi][c]);
                    entry.residual = res;
                }
            }
            if (!k.is_identity()) {
                const double r = std::sqrt(static_cast<double>(n)) * atom.cube.edge / 2.0;
                const double rr = std::max(g.L - std::max(std::abs(atom.cube.center[0]), std::abs(atom.cube.center[1])), r);
                const double decay = s + k.delta() - order;
                entry.tail_estimate = decay > 0.0 ? c_k * l1 * std::pow(r, s + k.delta()) * sigma * std::exp2(order) *
                                                        std::pow(rr, -decay) / decay
                                                  : kInfinity;
            }
            rep.worst = std::max(rep.worst, entry.residual);
            rep.entries.push_back(std::move(entry));
        }
    }
    return rep;
}

bool BoundednessReport::finite() const {
    return std::isfinite(max_lp) && std::isfinite(max_hardy);
}

BoundednessReport boundedness_harness(const Kernel& k, const std::vector<Atom>& atoms, const WeightSamples& ws,
                                      const TestFunction& psi, const BoundednessOptions& options) {
    const Grid& g = ws.grid();
    const int n = g.n;
    const double p = ws.p;
    if (k.n() != n) throw PreconditionError("kernel and weight dimensions differ");
    const double eta = options.eta > 0.0 ? options.eta : 4.0 * g.h;
    const double root_n = std::sqrt(static_cast<double>(n));
    const int s_needed = static_cast<int>(std::floor(n * (1.0 / p - 1.0) + 1e-12));

    BoundednessReport rep;
    for (const auto& atom : atoms) {
        if (atom.field.m != ws.m()) throw PreconditionError("atom and weight sizes differ");
        if (moment_residual(atom.field, g, atom.cube, 0) > 1e-6)
            throw PreconditionError("boundedness harness needs mean-zero atoms");
        AtomOperatorBound b;
        b.hypothesis_met = atom.s >= s_needed;
        const double l = atom.cube.edge;
        const Point c = atom.cube.center;
        const auto ta = principal_value_apply(k, eta, atom.field.to_field(g));

        std::vector<double> near_terms;
        for (std::size_t x : g.indices_in(atom.cube.scaled(2.0 * root_n))) {
            const double v = (ws.root.at(x) * ta.at(x)).norm();
            near_terms.push_back(std::pow(v, p) * g.cell_volume());
        }
        b.near = pairwise_sum(near_terms);

        if (!atom.field.samples.empty()) {
            for (int i = 1; i <= options.annuli; ++i) {
                const double r_in = std::ldexp(root_n * l, i - 1), r_out = std::ldexp(root_n * l, i);
                const auto q = annulus_rule(n, c, r_in, r_out, n == 1 ? 8 : 2, 8);
                std::vector<double> terms(q.points.size());
                parallel_for(q.points.size(), [&](std::size_t j) {
                    const auto& x = q.points[j];
                    const CVector tx = apply_at(k, g, atom.field, x);
                    const CMatrix root = ws.weight.power_at(x, 1.0 / p).matrix();
                    terms[j] = q.weights[j] * std::pow((root * tx).norm(), p);
                });
                b.annuli.push_back(pairwise_sum(terms));
            }
        } else {
            b.annuli.assign(options.annuli, 0.0);
        }

        const double total = b.near + std::accumulate(b.annuli.begin(), b.annuli.end(), 0.0);
        double beyond = 0.0;
        for (std::size_t i = 8; i < b.annuli.size(); ++i) beyond += b.annuli[i];
        b.tail_fraction = total > 0.0 ? beyond / total : 0.0;
        double log_sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i + 1 < b.annuli.size(); ++i)
            if (b.annuli[i] > 0.0 && b.annuli[i + 1] > 0.0) {
                log_sum += std::log(b.annuli[i] / b.annuli[i + 1]);
                ++pairs;
            }
        b.decay_rate = pairs ? std::exp(log_sum / pairs) : 0.0;
        b.lp_bound = std::pow(total, 1.0 / p);
        if (options.hardy) b.hardy_bound = ta.is_zero() ? 0.0 : hardy_quasinorm(ta, psi, ws);
        rep.max_lp = std::max(rep.max_lp, b.lp_bound);
        rep.max_hardy = std::max(rep.max_hardy, b.hardy_bound);
        rep.per_atom.push_back(std::move(b));
    }
    return rep;
}

} // namespace mwhardy
