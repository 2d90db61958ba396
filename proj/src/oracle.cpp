#include "mwhardy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mwhardy/error.hpp"

namespace mwhardy::oracle {

namespace {

std::vector<std::size_t> members(const Grid& g, const Cube& q) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (q.contains(g.point(i))) out.push_back(i);
    return out;
}

double avg(const std::vector<double>& w, const std::vector<std::size_t>& idx, double (*f)(double)) {
    double s = 0.0;
    for (auto i : idx) s += f(w[i]);
    return s / static_cast<double>(idx.size());
}

double dist(const Grid& g, std::size_t x, std::size_t y) {
    const auto a = g.point(x), b = g.point(y);
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]));
}

std::array<long, 2> cube_key(const Grid& g, std::size_t x, double t) {
    const auto p = g.point(x);
    return {static_cast<long>(std::floor(p[0] / t)), g.n == 2 ? static_cast<long>(std::floor(p[1] / t)) : 0L};
}

double rel_field(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

std::vector<double> sample_weight(const MatrixWeight& weight) {
    if (weight.m() != 1) throw PreconditionError("scalar oracle needs m = 1");
    const Grid& g = weight.grid();
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = weight.at(g.point(i)).matrix()(0, 0).real();
    return w;
}

double ap(const Grid& g, const std::vector<double>& w, const Cube& q, double p) {
    const auto idx = members(g, q);
    double mean_w = 0.0, low = INFINITY;
    for (auto i : idx) {
        mean_w += w[i];
        low = std::min(low, w[i]);
    }
    mean_w /= static_cast<double>(idx.size());
    if (p <= 1.0) return mean_w / low;
    double dual = 0.0;
    for (auto i : idx) dual += std::pow(w[i], -1.0 / (p - 1.0));
    dual /= static_cast<double>(idx.size());
    return mean_w * std::pow(dual, p - 1.0);
}

double ap_infty(const Grid& g, const std::vector<double>& w, const Cube& q) {
    const auto idx = members(g, q);
    return avg(w, idx, [](double v) { return v; }) * std::exp(-avg(w, idx, [](double v) { return std::log(v); }));
}

double reducing_value(const Grid& g, const std::vector<double>& w, const Cube& q, double p) {
    return std::pow(avg(w, members(g, q), [](double v) { return v; }), 1.0 / p);
}

std::vector<cplx> convolve(const Grid& g, const std::vector<cplx>& f, const TestFunction& psi, double t) {
    std::vector<cplx> out(g.size(), cplx(0.0));
    const double jac = std::pow(g.h / t, g.n);
    for (std::size_t x = 0; x < g.size(); ++x) {
        const auto px = g.point(x);
        for (std::size_t y = 0; y < g.size(); ++y) {
            if (f[y] == cplx(0.0)) continue;
            const auto py = g.point(y);
            const double v = psi({(px[0] - py[0]) / t, (px[1] - py[1]) / t});
            if (v != 0.0) out[x] += v * jac * f[y];
        }
    }
    return out;
}

std::vector<double> weight_factor(const Grid& g, const std::vector<double>& w, double p, Mode mode, double t) {
    std::vector<double> out(g.size(), 1.0);
    if (mode == Mode::Pointwise)
        for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::pow(w[i], 1.0 / p);
    if (mode == Mode::Reducing) {
        std::map<std::array<long, 2>, std::pair<double, int>> sums;
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto& s = sums[cube_key(g, i, t)];
            s.first += w[i];
            ++s.second;
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& s = sums[cube_key(g, i, t)];
            out[i] = std::pow(s.first / s.second, 1.0 / p);
        }
    }
    return out;
}

std::vector<double> radial(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                           const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto fac = weight_factor(g, w, p, mode, scales[k]);
        for (std::size_t x = 0; x < g.size(); ++x) out[x] = std::max(out[x], fac[x] * std::abs(conv[k][x]));
    }
    return out;
}

std::vector<double> nontangential(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                                  const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double a) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto fac = weight_factor(g, w, p, mode, scales[k]);
        for (std::size_t x = 0; x < g.size(); ++x)
            for (std::size_t y = 0; y < g.size(); ++y)
                if (dist(g, x, y) / scales[k] < a) out[x] = std::max(out[x], fac[x] * std::abs(conv[k][y]));
    }
    return out;
}

std::vector<double> infimum(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                            const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double a,
                            double b) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const double side = b * scales[k];
        const auto fac = weight_factor(g, w, p, mode, scales[k]);
        // minimum of |psi_t * f| over each cube of edge bt
        std::map<std::array<long, 2>, double> low;
        for (std::size_t y = 0; y < g.size(); ++y) {
            const auto key = cube_key(g, y, side);
            const auto it = low.find(key);
            const double v = std::abs(conv[k][y]);
            if (it == low.end()) low[key] = v;
            else it->second = std::min(it->second, v);
        }
        for (std::size_t x = 0; x < g.size(); ++x) {
            double best = 0.0;
            for (std::size_t y = 0; y < g.size(); ++y)
                if (dist(g, x, y) / scales[k] < a) best = std::max(best, low[cube_key(g, y, side)]);
            out[x] = std::max(out[x], fac[x] * best);
        }
    }
    return out;
}

std::vector<double> peetre(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                           const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double l) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto fac = weight_factor(g, w, p, mode, scales[k]);
        for (std::size_t x = 0; x < g.size(); ++x)
            for (std::size_t y = 0; y < g.size(); ++y)
                out[x] = std::max(out[x], fac[x] * std::abs(conv[k][y]) * std::pow(1.0 + dist(g, x, y) / scales[k], -l));
    }
    return out;
}

double lp(const Grid& g, const std::vector<double>& v, double p) {
    double s = 0.0;
    for (double x : v) s += std::pow(x, p);
    return std::pow(s * std::pow(g.h, g.n), 1.0 / p);
}

std::vector<Comparison> compare(const MatrixWeight& weight, const VectorField& f, const Config& cfg) {
    if (weight.m() != 1 || f.m != 1) throw PreconditionError("scalar oracle needs m = 1");
    const Grid& g = weight.grid();
    const double p = cfg.p;
    const auto w = sample_weight(weight);
    const WeightSamples ws(weight, p);
    std::vector<Comparison> out;
    auto add = [&](std::string name, double toolkit, double oracle_value, double diff) {
        out.push_back({std::move(name), toolkit, oracle_value, diff, diff <= cfg.tol});
    };

    const auto cubes = grid_cube_family(g, cfg.min_edge, cfg.max_edge);
    {
        const auto rep = ap_characteristic(ws, cubes);
        const auto rep_inf = ap_infty_characteristic(ws, cubes);
        double d = 0.0, d_inf = 0.0, o = 0.0, o_inf = 0.0;
        for (std::size_t i = 0; i < cubes.cubes.size(); ++i) {
            const double v = ap(g, w, cubes.cubes[i], p), v_inf = ap_infty(g, w, cubes.cubes[i]);
            d = std::max(d, rel(rep.per_cube[i].value, v));
            d_inf = std::max(d_inf, rel(rep_inf.per_cube[i].value, v_inf));
            o = std::max(o, v);
            o_inf = std::max(o_inf, v_inf);
        }
        add("A_p characteristic", rep.value, o, d);
        add("A_p,inf characteristic", rep_inf.value, o_inf, d_inf);
    }
    for (auto strategy : {ReducingStrategy::ExactScalar, ReducingStrategy::DirectionFit}) {
        double d = 0.0, top = 0.0, o = 0.0;
        for (const auto& q : cubes.cubes) {
            const double a = reducing_operator(ws, q, strategy).a.matrix()(0, 0).real();
            const double v = reducing_value(g, w, q, p);
            d = std::max(d, rel(a, v));
            top = std::max(top, a);
            o = std::max(o, v);
        }
        add(std::string("reducing value (") + to_string(strategy) + ")", top, o, d);
    }

    const auto scales = dyadic_scales(g);
    const auto family = build_reducing_family(ws, scales);
    {
        double d = 0.0, top = 0.0, o = 0.0;
        for (std::size_t k = 0; k < scales.size(); ++k) {
            const auto fac = weight_factor(g, w, p, Mode::Reducing, scales[k]);
            for (std::size_t x = 0; x < g.size(); ++x) {
                const double a = family.at(k, x).matrix()(0, 0).real();
                d = std::max(d, rel(a, fac[x]));
                top = std::max(top, a);
                o = std::max(o, fac[x]);
            }
        }
        add("reducing family", top, o, d);
    }

    std::vector<cplx> fv(f.data.begin(), f.data.end());
    const auto psi = TestFunction::bump(g.n);
    std::vector<std::vector<cplx>> conv;
    for (double t : scales) conv.push_back(convolve(g, fv, psi, t));
    {
        const auto stack = convolve_stack(f, psi, scales);
        double d = 0.0;
        for (std::size_t k = 0; k < scales.size(); ++k) {
            std::vector<double> a(g.size()), b(g.size());
            for (std::size_t x = 0; x < g.size(); ++x) {
                a[x] = std::abs(stack.levels[k].data[x]);
                b[x] = std::abs(conv[k][x]);
            }
            d = std::max(d, rel_field(a, b));
        }
        add("convolution", 0.0, 0.0, d);

        for (auto [mode, name] : {std::pair{Mode::Pointwise, "W"}, std::pair{Mode::Reducing, "A"}}) {
            const auto wm = mode == Mode::Pointwise ? WeightMode::pointwise(ws) : WeightMode::reducing(family);
            auto field = [&](const std::string& q, const ScalarField& t, const std::vector<double>& o) {
                add(q + " (" + name + ")", t.max(), *std::max_element(o.begin(), o.end()), rel_field(t.values, o));
            };
            field("radial maximal", radial_maximal(stack, wm), radial(g, w, p, mode, conv, scales));
            field("nontangential maximal", nontangential_maximal(stack, wm, cfg.a),
                  nontangential(g, w, p, mode, conv, scales, cfg.a));
            field("infimum maximal", nontangential_infimum_maximal(stack, wm, cfg.a, cfg.b),
                  infimum(g, w, p, mode, conv, scales, cfg.a, cfg.b));
            field("Peetre maximal", peetre_maximal(stack, wm, cfg.l), peetre(g, w, p, mode, conv, scales, cfg.l));
        }
    }
    {
        const auto dict = SchwartzDictionary::standard(g.n, cfg.N, cfg.dictionary_size);
        std::vector<std::vector<std::vector<cplx>>> member_conv;
        for (const auto& phi : dict.members) {
            member_conv.emplace_back();
            for (double t : scales) member_conv.back().push_back(convolve(g, fv, phi, t));
        }
        const auto wm = WeightMode::pointwise(ws);
        for (auto [variant, name] : {std::pair{GrandVariant::Radial, "radial"}, std::pair{GrandVariant::Nontangential, "nontangential"},
                                     std::pair{GrandVariant::Peetre, "Peetre"}}) {
            std::vector<double> o(g.size(), 0.0);
            for (std::size_t k = 0; k < dict.members.size(); ++k) {
                std::vector<double> v;
                if (variant == GrandVariant::Radial) v = radial(g, w, p, Mode::Pointwise, member_conv[k], scales);
                if (variant == GrandVariant::Nontangential)
                    v = nontangential(g, w, p, Mode::Pointwise, member_conv[k], scales, cfg.a);
                if (variant == GrandVariant::Peetre) v = peetre(g, w, p, Mode::Pointwise, member_conv[k], scales, cfg.l);
                for (std::size_t x = 0; x < g.size(); ++x) o[x] = std::max(o[x], v[x] / dict.seminorms[k]);
            }
            const double param = variant == GrandVariant::Peetre ? cfg.l : cfg.a;
            const auto t = grand_maximal(f, dict, variant, param, wm);
            add(std::string("grand maximal, ") + name + " (W)", t.max(), *std::max_element(o.begin(), o.end()),
                rel_field(t.values, o));
        }
    }
    {
        const double hq = hardy_quasinorm(f, psi, ws);
        const double o = lp(g, radial(g, w, p, Mode::Pointwise, conv, scales), p);
        add("Hardy quasinorm", hq, o, rel(hq, o));
        std::vector<double> wf(g.size());
        for (std::size_t x = 0; x < g.size(); ++x) wf[x] = std::pow(w[x], 1.0 / p) * std::abs(fv[x]);
        const double wl = weighted_lp_norm(f, ws);
        const double ol = lp(g, wf, p);
        add("weighted L^p norm", wl, ol, rel(wl, ol));
    }
    return out;
}

} // namespace mwhardy::oracle
