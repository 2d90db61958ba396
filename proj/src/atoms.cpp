#include "mwhardy/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

namespace {

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

double power(const std::array<int, 2>& e, const Point& x) {
    double v = 1.0;
    for (int i = 0; i < e[0]; ++i) v *= x[0];
    for (int i = 0; i < e[1]; ++i) v *= x[1];
    return v;
}

double norm1(const cplx* v, int m) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += std::norm(v[c]);
    return std::sqrt(s);
}

double eta_at(const LocalField& f, std::size_t sample) {
    const auto it = std::lower_bound(f.samples.begin(), f.samples.end(), sample);
    if (it == f.samples.end() || *it != sample) return 0.0;
    return f.values[static_cast<std::size_t>(it - f.samples.begin())].real();
}

LocalField from_map(const std::map<std::size_t, std::vector<cplx>>& acc, int m) {
    LocalField out;
    out.m = m;
    for (const auto& [x, v] : acc) {
        out.samples.push_back(x);
        out.values.insert(out.values.end(), v.begin(), v.end());
    }
    return out;
}

LocalField nonzero_part(const VectorField& f) {
    LocalField out;
    out.m = f.m;
    for (std::size_t x = 0; x < f.grid.size(); ++x) {
        bool any = false;
        for (int c = 0; c < f.m; ++c) any = any || f.data[x * f.m + c] != cplx(0.0);
        if (!any) continue;
        out.samples.push_back(x);
        for (int c = 0; c < f.m; ++c) out.values.push_back(f.data[x * f.m + c]);
    }
    return out;
}

double max_abs(const LocalField& a) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) v = std::max(v, norm1(&a.values[i * a.m], a.m));
    return v;
}

// Smallest cube centered at c holding every sample of a (by center), at least min_edge.
Cube enclosing_cube(const LocalField& a, const Grid& g, const Point& c, double min_edge) {
    double r = 0.0;
    for (auto x : a.samples) {
        const auto p = g.point(x);
        for (int i = 0; i < g.n; ++i) r = std::max(r, std::abs(p[i] - c[i]));
    }
    return Cube{g.n, c, std::max(min_edge, 2.0 * r + g.h)};
}

} // namespace

const char* to_string(AtomFlavor f) { return f == AtomFlavor::W ? "W" : "A"; }

AtomSize atom_size(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, AtomFlavor flavor,
                   const HermitianMatrix* a_q) {
    const Grid& g = ws.grid();
    const auto qs = g.indices_in(q_cube);
    if (qs.empty()) throw DomainError("atom: cube holds no grid samples");
    if (!(q >= 1.0)) throw PreconditionError("atom: q must be at least 1");
    const double p = ws.p, hn = g.cell_volume();
    const double measure = static_cast<double>(qs.size()) * hn;
    const int m = a.m;
    const bool inf = std::isinf(q);
    std::vector<double> per(a.samples.size());
    if (flavor == AtomFlavor::A) {
        if (!a_q) throw PreconditionError("atom: A flavor needs A_Q");
        parallel_for(a.samples.size(), [&](std::size_t i) {
            CVector v(m);
            for (int c = 0; c < m; ++c) v(c) = a.values[i * m + c];
            per[i] = (a_q->matrix() * v).norm();
        });
        AtomSize out;
        out.bound = std::pow(measure, (inf ? 0.0 : 1.0 / q) - 1.0 / p);
        if (inf) {
            for (double v : per) out.size = std::max(out.size, v);
        } else {
            for (auto& v : per) v = std::pow(v, q);
            out.size = std::pow(pairwise_sum(per) * hn, 1.0 / q);
        }
        return out;
    }
    parallel_for(a.samples.size(), [&](std::size_t i) {
        std::vector<double> inner(qs.size());
        for (std::size_t k = 0; k < qs.size(); ++k) {
            const auto r = ws.root.at(qs[k]);
            double s = 0.0;
            for (int row = 0; row < m; ++row) {
                cplx acc(0.0);
                for (int c = 0; c < m; ++c) acc += r(row, c) * a.values[i * m + c];
                s += std::norm(acc);
            }
            inner[k] = std::pow(s, 0.5 * p);
        }
        per[i] = pairwise_sum(inner) * hn;
    });
    AtomSize out;
    out.bound = inf ? 1.0 : std::pow(measure, 1.0 / q);
    if (inf) {
        for (double v : per) out.size = std::max(out.size, std::pow(v, 1.0 / p));
    } else {
        for (auto& v : per) v = std::pow(v, q / p);
        out.size = std::pow(pairwise_sum(per) * hn, 1.0 / q);
    }
    return out;
}

double moment_residual(const LocalField& a, const Grid& g, const Cube& q_cube, int s) {
    const double l1 = a.l1_norm(g);
    if (!(l1 > 1e-250)) return 0.0;
    const double reach = q_cube.edge + std::hypot(q_cube.center[0], q_cube.center[1]);
    double worst = 0.0;
    for (const auto& ex : exponents(g.n, s))
        for (int c = 0; c < a.m; ++c) {
            std::vector<double> re(a.samples.size()), im(a.samples.size());
            for (std::size_t i = 0; i < a.samples.size(); ++i) {
                const cplx v = a.values[i * a.m + c] * power(ex, g.point(a.samples[i]));
                re[i] = v.real();
                im[i] = v.imag();
            }
            const double mom = std::hypot(pairwise_sum(re), pairwise_sum(im)) * g.cell_volume();
            worst = std::max(worst, mom / (l1 * std::pow(reach, ex[0] + ex[1])));
        }
    return worst;
}

AtomValidation validate_atom(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, int s,
                             AtomFlavor flavor, const HermitianMatrix& a_q, double moment_tol) {
    const Grid& g = ws.grid();
    AtomValidation v;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (norm1(&a.values[i * a.m], a.m) > 0.0 && !q_cube.contains(g.point(a.samples[i]))) ++v.outside_samples;
    v.support_ok = v.outside_samples == 0;
    const auto sz = atom_size(a, q_cube, ws, q, flavor, &a_q);
    v.size = sz.size;
    v.size_bound = sz.bound;
    v.margin = sz.size > 0.0 ? sz.bound / sz.size : kInfinity;
    v.size_ok = sz.size <= sz.bound * (1.0 + 1e-12);
    v.moment_residual = moment_residual(a, g, q_cube, s);
    v.moments_ok = v.moment_residual <= moment_tol;
    return v;
}

AtomValidation validate_atom(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, int s,
                             AtomFlavor flavor, ReducingStrategy strategy, double moment_tol) {
    const HermitianMatrix a_q = flavor == AtomFlavor::A ? reducing_operator(ws, q_cube, strategy).a
                                                        : HermitianMatrix::identity(ws.m());
    return validate_atom(a, q_cube, ws, q, s, flavor, a_q, moment_tol);
}

std::pair<Atom, double> normalize_to_atom(const LocalField& field, const Cube& q_cube, const WeightSamples& ws,
                                          double q, int s, AtomFlavor flavor, ReducingStrategy strategy,
                                          double moment_tol) {
    const Grid& g = ws.grid();
    if (max_abs(field) == 0.0) throw DegenerateMeasureError("normalize: zero field");
    for (std::size_t i = 0; i < field.samples.size(); ++i)
        if (norm1(&field.values[i * field.m], field.m) > 0.0 && !q_cube.contains(g.point(field.samples[i])))
            throw PreconditionError("normalize: field not supported in the cube");
    if (moment_residual(field, g, q_cube, s) > moment_tol) throw PreconditionError("normalize: moments do not vanish");
    const HermitianMatrix a_q = flavor == AtomFlavor::A ? reducing_operator(ws, q_cube, strategy).a
                                                        : HermitianMatrix::identity(ws.m());
    const auto sz = atom_size(field, q_cube, ws, q, flavor, &a_q);
    const double factor = sz.bound / sz.size;
    Atom atom;
    atom.field = field;
    for (auto& v : atom.field.values) v *= factor;
    atom.cube = q_cube;
    atom.p = ws.p;
    atom.q = q;
    atom.s = s;
    atom.flavor = flavor;
    atom.validation = validate_atom(atom.field, q_cube, ws, q, s, flavor, a_q, moment_tol);
    return {std::move(atom), factor};
}

AtomHardyBound atom_hardy_bound(const Atom& atom, const TestFunction& psi, const WeightSamples& ws, double r_w) {
    AtomHardyBound out;
    const double need = std::isinf(r_w) ? std::max(1.0, ws.p) : std::max(1.0, r_w * ws.p / (r_w - 1.0));
    out.hypothesis_met = atom.q > need;
    if (max_abs(atom.field) == 0.0) return out;
    out.value = hardy_quasinorm(atom.field.to_field(ws.grid()), psi, ws);
    return out;
}

Atom random_atom(const WeightSamples& ws, int s, AtomFlavor flavor, std::uint64_t seed, double min_edge,
                 double max_edge) {
    const Grid& g = ws.grid();
    const int n = g.n, m = ws.m();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double edge = min_edge + (max_edge - min_edge) * unit(rng);
    if (!(edge < 2.0 * g.L)) throw PreconditionError("random atom: edge exceeds the domain");
    Point c{0.0, 0.0};
    for (int i = 0; i < n; ++i) c[i] = (-g.L + 0.5 * edge) + (2.0 * g.L - edge) * unit(rng);
    const Cube q{n, c, edge};

    struct Wave {
        std::vector<cplx> v;
        std::array<double, 2> w;
        double phase;
    };
    std::vector<Wave> waves(3);
    for (auto& wave : waves) {
        for (int k = 0; k < m; ++k) wave.v.emplace_back(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
        wave.w = {12.0 * unit(rng) - 6.0, n == 2 ? 12.0 * unit(rng) - 6.0 : 0.0};
        wave.phase = 6.283185307179586 * unit(rng);
    }

    const auto ex = exponents(n, s);
    std::vector<std::size_t> samples;
    std::vector<double> window;
    std::vector<Point> scaled;
    for (auto x : g.indices_in(q)) {
        const auto p = g.point(x);
        const Point u{(p[0] - c[0]) / edge, n == 2 ? (p[1] - c[1]) / edge : 0.0};
        const double r2 = 4.0 * (u[0] * u[0] + u[1] * u[1]);
        if (r2 >= 1.0) continue;
        samples.push_back(x);
        window.push_back(std::exp(-1.0 / (1.0 - r2)));
        scaled.push_back(u);
    }
    const std::size_t S = samples.size(), M = ex.size();
    if (S < 2 * M) throw PreconditionError("random atom: cube too small for the grid");
    Eigen::MatrixXd V(S, M);
    Eigen::MatrixXcd U(S, m);
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < M; ++j) V(i, j) = power(ex[j], scaled[i]);
        for (int k = 0; k < m; ++k) {
            cplx acc(0.0);
            for (const auto& wave : waves)
                acc += wave.v[k] * std::cos(wave.w[0] * scaled[i][0] + wave.w[1] * scaled[i][1] + wave.phase);
            U(i, k) = acc;
        }
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(window.data(), S);
    const Eigen::MatrixXd G = V.transpose() * w.asDiagonal() * V;
    const Eigen::MatrixXcd coef = G.cast<cplx>().ldlt().solve(V.transpose().cast<cplx>() * w.asDiagonal() * U);
    const Eigen::MatrixXcd R = U - V.cast<cplx>() * coef;

    LocalField field;
    field.m = m;
    field.samples = samples;
    for (std::size_t i = 0; i < S; ++i)
        for (int k = 0; k < m; ++k) field.values.push_back(window[i] * R(i, k));
    return normalize_to_atom(field, q, ws, kInfinity, s, flavor).first;
}

// ---------------------------------------------------------------------------

double AtomicDecomposition::coefficient_norm() const {
    return std::pow(coefficient_sum + std::pow(tail_lambda, p), 1.0 / p);
}

AtomicDecomposition atomic_decompose(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family,
                                     const AtomicOptions& opt) {
    const Grid& g = f.grid;
    const int m = f.m;
    if (opt.levels < 1) throw PreconditionError("atomic: need at least one level");
    AtomicDecomposition out;
    out.m = m;
    out.p = ws.p;
    out.s = opt.s;
    const double fmax = f.max_abs();
    if (fmax == 0.0) return out;

    const auto dict = SchwartzDictionary::standard(g.n, opt.N, static_cast<std::size_t>(opt.dictionary_size));
    const auto proxy = grand_proxy(f, dict, WeightMode::reducing(family));
    out.alpha0 = proxy.max();
    {
        std::vector<double> pv(proxy.values.size());
        for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = std::pow(proxy.values[i], ws.p);
        out.hardy_proxy = pairwise_sum(pv) * g.cell_volume();
    }
    CZOptions cz;
    cz.s = opt.s;
    cz.N = opt.N;
    cz.dictionary_size = opt.dictionary_size;
    cz.strategy = opt.strategy;
    cz.bad_energy = false;
    // walk down from alpha0; a level whose cover needs scales beyond the largest
    // dyadic scale, or whose level set reaches the domain edge, ends the ladder
    const double t_max = dyadic_scales(g).back();
    std::vector<CZDecomposition> down;
    for (int j = 0; j >= -opt.levels; --j) {
        auto d = cz_decompose(f, ws, proxy, std::ldexp(out.alpha0, j), cz);
        double edge = 0.0;
        for (const auto& q : d.partition.cubes) edge = std::max(edge, q.edge);
        if (d.domain_truncated || edge * (1.0 + 4.0 * std::sqrt(static_cast<double>(g.n))) > t_max) {
            out.ladder_cut = true;
            break;
        }
        down.push_back(std::move(d));
    }
    const int J = static_cast<int>(down.size()) - 1;
    out.levels_used = J;
    std::vector<CZDecomposition> D(down.rbegin(), down.rend());
    for (int i = 0; i <= J; ++i) out.alphas.push_back(D[i].alpha);

    struct Raw {
        int j;
        std::size_t k;
        LocalField a;
        Cube cube;
        HermitianMatrix a_q;
        double base, need, c0, moments;
    };
    std::vector<Raw> raw;
    out.c_per_level.assign(J, 0.0);

    for (int i = 0; i < J; ++i) {
        const auto& lo = D[i];
        const auto& hi = D[i + 1];
        if (lo.b.empty()) continue;
        const std::size_t K = lo.b.size(), I = hi.b.size();
        std::vector<PolynomialProjector> pr(I);
        std::vector<LocalField> c_hi(I);
        parallel_for(I, [&](std::size_t idx) {
            pr[idx] = build_projector(hi.partition, idx, opt.s);
            c_hi[idx] = project_polynomial(f, pr[idx]).field;
        });
        std::vector<std::vector<std::uint32_t>> owner(g.size());
        for (std::size_t idx = 0; idx < I; ++idx)
            for (auto x : hi.partition.eta[idx].samples) owner[x].push_back(static_cast<std::uint32_t>(idx));
        const VectorField b_hi = f - hi.g;

        std::vector<LocalField> A(K);
        parallel_for(K, [&](std::size_t k) {
            const auto& eta = lo.partition.eta[k];
            std::map<std::size_t, std::vector<cplx>> acc;
            auto add = [&](std::size_t x, int c, cplx v) {
                auto& slot = acc[x];
                if (slot.empty()) slot.assign(m, cplx(0.0));
                slot[c] += v;
            };
            const auto& bk = lo.b[k];
            for (std::size_t t = 0; t < bk.samples.size(); ++t)
                for (int c = 0; c < m; ++c) add(bk.samples[t], c, bk.values[t * m + c]);
            std::vector<std::uint32_t> touched;
            for (std::size_t t = 0; t < eta.samples.size(); ++t) {
                const auto x = eta.samples[t];
                for (int c = 0; c < m; ++c) add(x, c, -b_hi.data[x * m + c] * eta.values[t].real());
                touched.insert(touched.end(), owner[x].begin(), owner[x].end());
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (auto idx : touched) {
                const auto& P = pr[idx];
                LocalField h;
                h.m = m;
                h.samples = P.samples;
                h.values.resize(P.samples.size() * m);
                for (std::size_t t = 0; t < P.samples.size(); ++t) {
                    const double e = eta_at(eta, P.samples[t]);
                    for (int c = 0; c < m; ++c)
                        h.values[t * m + c] = (f.data[P.samples[t] * m + c] - c_hi[idx].values[t * m + c]) * e;
                }
                const auto cki = project_polynomial(h, P).field;
                const auto& eta_hi = hi.partition.eta[idx];
                for (std::size_t t = 0; t < P.samples.size(); ++t)
                    for (int c = 0; c < m; ++c)
                        add(P.samples[t], c, cki.values[t * m + c] * eta_hi.values[t].real());
            }
            A[k] = from_map(acc, m);
        });

        VectorField sum(g, m);
        for (const auto& a : A)
            for (std::size_t t = 0; t < a.samples.size(); ++t)
                for (int c = 0; c < m; ++c) sum.data[a.samples[t] * m + c] += a.values[t * m + c];
        out.identity_residual = std::max(out.identity_residual, (sum - (hi.g - lo.g)).max_abs() / fmax);

        const int j = i - J;
        std::vector<Raw> level(K);
        parallel_for(K, [&](std::size_t k) {
            Raw& r = level[k];
            r.j = j;
            r.k = k;
            r.a = std::move(A[k]);
            const Cube& qk = lo.partition.cubes[k];
            r.cube = enclosing_cube(r.a, g, qk.center, qk.edge * 9.0 / 8.0);
            r.c0 = r.cube.edge / qk.edge;
            r.a_q = reducing_operator(ws, r.cube, opt.strategy, k).a;
            const auto sz = atom_size(r.a, r.cube, ws, opt.q, AtomFlavor::A, &r.a_q);
            r.base = out.alphas[i] * std::pow(qk.volume(), 1.0 / ws.p);
            r.need = sz.size / sz.bound;
            r.moments = moment_residual(r.a, g, r.cube, opt.s);
        });
        for (auto& r : level) {
            // rounding-level pieces carry no atom
            if (max_abs(r.a) <= 1e-13 * fmax) continue;
            out.c_per_level[i] = std::max(out.c_per_level[i], r.need / r.base);
            raw.push_back(std::move(r));
        }
    }
    for (double c : out.c_per_level) out.c = std::max(out.c, c);

    out.atoms.resize(raw.size());
    parallel_for(raw.size(), [&](std::size_t t) {
        Raw& r = raw[t];
        LadderAtom& la = out.atoms[t];
        la.j = r.j;
        la.k = r.k;
        la.lambda = out.c * r.base;
        la.c0 = r.c0;
        la.moment_residual = r.moments;
        la.atom.field = std::move(r.a);
        for (auto& v : la.atom.field.values) v /= la.lambda;
        la.atom.cube = r.cube;
        la.atom.p = ws.p;
        la.atom.q = opt.q;
        la.atom.s = opt.s;
        la.atom.flavor = AtomFlavor::A;
        if (opt.validate)
            la.atom.validation = validate_atom(la.atom.field, r.cube, ws, opt.q, opt.s, AtomFlavor::A, r.a_q);
    });
    std::vector<double> lp;
    for (const auto& la : out.atoms) {
        lp.push_back(std::pow(la.lambda, ws.p));
        if (opt.validate) out.all_valid = out.all_valid && la.atom.validation.valid();
    }
    out.coefficient_sum = pairwise_sum(lp);

    const VectorField& tail = D[0].g;
    out.tail_residual = tail.max_abs() / fmax;
    out.truncation_warning = out.tail_residual > 0.1;
    if (!tail.is_zero()) {
        const LocalField t = nonzero_part(tail);
        const auto box = tail.support_box();
        const Cube q = enclosing_cube(t, g, box.center, box.edge);
        try {
            auto [atom, factor] = normalize_to_atom(t, q, ws, opt.q, opt.s, AtomFlavor::A, opt.strategy);
            out.tail = std::move(atom);
            out.tail_lambda = 1.0 / factor;
            out.tail_is_atom = out.tail->validation.valid();
        } catch (const PreconditionError&) {
            const auto a_q = reducing_operator(ws, q, opt.strategy).a;
            const auto sz = atom_size(t, q, ws, opt.q, AtomFlavor::A, &a_q);
            Atom atom;
            atom.field = t;
            for (auto& v : atom.field.values) v *= sz.bound / sz.size;
            atom.cube = q;
            atom.p = ws.p;
            atom.q = opt.q;
            atom.s = opt.s;
            atom.validation = validate_atom(atom.field, q, ws, opt.q, opt.s, AtomFlavor::A, a_q);
            out.tail = std::move(atom);
            out.tail_lambda = sz.size / sz.bound;
            out.tail_is_atom = false;
        }
    }
    return out;
}

std::vector<TestFunction> pairing_profiles(int n) {
    const auto psi = TestFunction::bump(n);
    auto make = [&](const std::string& name, Point c, double r, bool moment) {
        return TestFunction(n, name, [psi, c, r, moment, n](const Point& x) {
            const Point u{(x[0] - c[0]) / r, n == 2 ? (x[1] - c[1]) / r : 0.0};
            return psi(u) * (moment ? u[0] : 1.0);
        });
    };
    return {make("bump", {0.0, 0.0}, 1.0, false),       make("half", {0.0, 0.0}, 0.5, false),
            make("shifted", {0.3, -0.2}, 0.5, false),    make("wide", {0.0, 0.0}, 2.0, false),
            make("moment", {0.0, 0.0}, 1.0, true),       make("narrow", {-0.1, 0.1}, 0.25, false)};
}

ReconstructionReport reconstruct(const AtomicDecomposition& d, const VectorField& f,
                                 const std::vector<TestFunction>& profiles, bool include_tail) {
    const Grid& g = f.grid;
    const int m = f.m, J = static_cast<int>(d.alphas.empty() ? 0 : d.alphas.size() - 1);
    const double hn = g.cell_volume();
    ReconstructionReport rep;
    rep.residual.assign(std::max(J, 1), std::vector<double>(profiles.size(), 0.0));
    rep.worst.assign(std::max(J, 1), 0.0);
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        std::vector<double> phi(g.size());
        for (std::size_t x = 0; x < g.size(); ++x) phi[x] = profiles[pi](g.point(x));
        auto pair = [&](const LocalField& a) {
            std::vector<cplx> s(m, cplx(0.0));
            for (std::size_t t = 0; t < a.samples.size(); ++t)
                for (int c = 0; c < m; ++c) s[c] += a.values[t * m + c] * phi[a.samples[t]] * hn;
            return s;
        };
        std::vector<cplx> F(m, cplx(0.0));
        std::vector<double> abs_f(g.size());
        double phi_max = 0.0;
        for (std::size_t x = 0; x < g.size(); ++x) {
            for (int c = 0; c < m; ++c) F[c] += f.data[x * m + c] * phi[x] * hn;
            abs_f[x] = norm1(&f.data[x * m], m);
            phi_max = std::max(phi_max, std::abs(phi[x]));
        }
        const double scale = pairwise_sum(abs_f) * hn * phi_max;
        // per-level pairings, then windows widening downward from j = -1
        std::vector<std::vector<cplx>> level(std::max(J, 1), std::vector<cplx>(m, cplx(0.0)));
        for (const auto& la : d.atoms) {
            const auto s = pair(la.atom.field);
            auto& slot = level[static_cast<std::size_t>(-la.j - 1)];
            for (int c = 0; c < m; ++c) slot[c] += la.lambda * s[c];
        }
        std::vector<cplx> acc(m, cplx(0.0));
        for (int w = 1; w <= std::max(J, 1); ++w) {
            for (int c = 0; c < m; ++c) acc[c] += level[w - 1][c];
            std::vector<cplx> r(m);
            for (int c = 0; c < m; ++c) r[c] = F[c] - acc[c];
            if (include_tail && w == J && d.tail) {
                const auto s = pair(d.tail->field);
                for (int c = 0; c < m; ++c) r[c] -= d.tail_lambda * s[c];
            }
            const double res = norm1(r.data(), m);
            rep.residual[w - 1][pi] = scale > 0.0 ? res / scale : res;
        }
    }
    for (std::size_t w = 0; w < rep.residual.size(); ++w)
        for (double v : rep.residual[w]) rep.worst[w] = std::max(rep.worst[w], v);
    return rep;
}

double finite_atomic_norm_upper(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family,
                                const AtomicOptions& options) {
    if (f.is_zero()) return 0.0;
    return atomic_decompose(f, ws, family, options).coefficient_norm();
}

} // namespace mwhardy
