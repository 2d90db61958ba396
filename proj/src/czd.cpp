#include "mwhardy/czd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

namespace {

double smootherstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

std::vector<std::array<int, 2>> monomials(int n, int s) {
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

double monomial(const std::array<int, 2>& e, double u0, double u1) {
    double v = 1.0;
    for (int i = 0; i < e[0]; ++i) v *= u0;
    for (int i = 0; i < e[1]; ++i) v *= u1;
    return v;
}

double value_at(const LocalField& f, std::size_t sample) {
    const auto it = std::lower_bound(f.samples.begin(), f.samples.end(), sample);
    if (it == f.samples.end() || *it != sample) return 0.0;
    return f.values[static_cast<std::size_t>(it - f.samples.begin())].real();
}

int exponent_of_two(double v) {
    int e = 0;
    const double mant = std::frexp(v, &e);
    if (mant != 0.5) throw AlignmentError("czd: grid spacing must be a power of two");
    return e - 1;
}

} // namespace

VectorField LocalField::to_field(const Grid& g) const {
    VectorField out(g, m);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int k = 0; k < m; ++k) out.data[samples[i] * m + k] = values[i * m + k];
    return out;
}

double LocalField::l1_norm(const Grid& g) const {
    std::vector<double> v(samples.size(), 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int k = 0; k < m; ++k) v[i] += std::abs(values[i * m + k]);
    return pairwise_sum(v) * g.cell_volume();
}

std::size_t LevelSet::count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

bool LevelSet::touches_boundary() const {
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto c = grid.cell(i);
        if (c[0] == 0 || c[0] == grid.cells - 1) return true;
        if (grid.n == 2 && (c[1] == 0 || c[1] == grid.cells - 1)) return true;
    }
    return false;
}

ScalarField grand_proxy(const VectorField& f, const SchwartzDictionary& dict, const WeightMode& mode) {
    return grand_maximal(f, dict, GrandVariant::Radial, 0.0, mode);
}

LevelSet level_set(const ScalarField& proxy, double alpha) {
    if (!(alpha > 0.0)) throw PreconditionError("level set: alpha must be positive");
    LevelSet out{proxy.grid, alpha, std::vector<std::uint8_t>(proxy.values.size(), 0)};
    for (std::size_t i = 0; i < proxy.values.size(); ++i) out.mask[i] = proxy.values[i] > alpha ? 1 : 0;
    return out;
}

OpenSet mask_to_open_set(const LevelSet& level, int block) {
    const Grid& g = level.grid;
    if (block < 1 || (block & (block - 1)) != 0) throw PreconditionError("czd: block must be a power of two");
    const double origin = g.L / (block * g.h);
    if (g.cells % block != 0 || std::abs(origin - std::round(origin)) > 1e-9)
        throw AlignmentError("czd: blocks of " + std::to_string(block) + " cells do not tile the domain");
    const auto o = static_cast<std::int64_t>(std::llround(origin));
    OpenSet out;
    out.n = g.n;
    out.unit_exp = exponent_of_two(block * g.h);
    const int nb = g.cells / block;
    auto hit = [&](int bi, int bj) {
        for (int j = 0; j < (g.n == 2 ? block : 1); ++j)
            for (int i = 0; i < block; ++i)
                if (level.mask[g.index(bi * block + i, g.n == 2 ? bj * block + j : 0)]) return true;
        return false;
    };
    for (int bj = 0; bj < (g.n == 2 ? nb : 1); ++bj) {
        int run = -1;
        for (int bi = 0; bi <= nb; ++bi) {
            const bool on = bi < nb && hit(bi, bj);
            if (on && run < 0) run = bi;
            if (!on && run >= 0) {
                IntBox box;
                box.lo = {run - o, g.n == 2 ? bj - o : 0};
                box.hi = {bi - o, g.n == 2 ? bj + 1 - o : 1};
                out.boxes.push_back(box);
                run = -1;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

PartitionOfUnity build_partition(const Grid& g, const std::vector<Cube>& cubes, double a_tilde) {
    if (cubes.empty()) throw DomainError("partition: empty cover");
    if (!(a_tilde > 1.0)) throw PreconditionError("partition: dilation must exceed 1");
    PartitionOfUnity pu;
    pu.grid = g;
    pu.cubes = cubes;
    pu.a_tilde = a_tilde;
    const std::size_t K = cubes.size();
    std::vector<LocalField> plateau(K);
    parallel_for(K, [&](std::size_t k) {
        const Cube& q = cubes[k];
        const double half = 0.5 * q.edge, ramp = 0.5 * (a_tilde - 1.0) * q.edge;
        LocalField& f = plateau[k];
        for (auto x : g.indices_in(q.scaled(a_tilde))) {
            const auto px = g.point(x);
            double v = 1.0;
            for (int i = 0; i < g.n; ++i) v *= smootherstep((half + ramp - std::abs(px[i] - q.center[i])) / ramp);
            if (v > 0.0) {
                f.samples.push_back(x);
                f.values.push_back(v);
            }
        }
    });
    pu.covered.assign(g.size(), 0);
    for (const auto& q : cubes)
        for (auto x : g.indices_in(q)) pu.covered[x] = 1;
    std::vector<double> total(g.size(), 0.0);
    for (const auto& f : plateau)
        for (std::size_t i = 0; i < f.samples.size(); ++i) total[f.samples[i]] += f.values[i].real();

    pu.eta.resize(K);
    pu.mass.resize(K);
    parallel_for(K, [&](std::size_t k) {
        LocalField& e = pu.eta[k];
        for (std::size_t i = 0; i < plateau[k].samples.size(); ++i) {
            const auto x = plateau[k].samples[i];
            if (!pu.covered[x]) continue;
            e.samples.push_back(x);
            e.values.push_back(plateau[k].values[i].real() / total[x]);
        }
        std::vector<double> v(e.values.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = e.values[i].real();
        pu.mass[k] = pairwise_sum(v) * g.cell_volume();
    });

    std::vector<double> sum(g.size(), 0.0);
    for (const auto& e : pu.eta)
        for (std::size_t i = 0; i < e.samples.size(); ++i) sum[e.samples[i]] += e.values[i].real();
    for (std::size_t x = 0; x < g.size(); ++x)
        if (pu.covered[x]) pu.sum_error = std::max(pu.sum_error, std::abs(sum[x] - 1.0));

    pu.mass_low = 1e300;
    for (std::size_t k = 0; k < K; ++k) {
        const double r = pu.mass[k] / cubes[k].volume();
        pu.mass_low = std::min(pu.mass_low, r);
        pu.mass_high = std::max(pu.mass_high, r);
        const auto& e = pu.eta[k];
        for (std::size_t i = 0; i < e.samples.size(); ++i) {
            const auto c = g.cell(e.samples[i]);
            for (int a = 0; a < g.n; ++a) {
                auto nb = c;
                ++nb[a];
                const double next = nb[a] < g.cells ? value_at(e, g.index(nb[0], nb[1])) : 0.0;
                --nb[a];
                --nb[a];
                const double prev = nb[a] >= 0 ? value_at(e, g.index(nb[0], nb[1])) : 0.0;
                const double here = e.values[i].real();
                const double d = std::max(std::abs(next - here), std::abs(here - prev)) / g.h * cubes[k].edge;
                pu.derivative_constant = std::max(pu.derivative_constant, d);
            }
        }
    }
    return pu;
}

// ---------------------------------------------------------------------------

PolynomialProjector build_projector(const PartitionOfUnity& pu, std::size_t k, int s) {
    if (s < 0) throw PreconditionError("projector: s must be nonnegative");
    const Grid& g = pu.grid;
    const Cube& q = pu.cubes[k];
    PolynomialProjector pr;
    pr.n = g.n;
    pr.s = s;
    pr.cube = q;
    pr.exponents = monomials(g.n, s);
    const auto& e = pu.eta[k];
    pr.samples = e.samples;
    const std::size_t S = pr.samples.size(), M = pr.exponents.size();
    if (S == 0 || pu.mass[k] <= 0.0) throw DegenerateMeasureError("projector: empty measure");
    pr.weights.resize(S);
    for (std::size_t i = 0; i < S; ++i) pr.weights[i] = e.values[i].real() / pu.mass[k] * g.cell_volume();

    auto scaled = [&](std::size_t x) {
        const auto p = g.point(x);
        return std::array<double, 2>{(p[0] - q.center[0]) / q.edge, g.n == 2 ? (p[1] - q.center[1]) / q.edge : 0.0};
    };
    Eigen::MatrixXd V(S, M);
    for (std::size_t i = 0; i < S; ++i) {
        const auto u = scaled(pr.samples[i]);
        for (std::size_t j = 0; j < M; ++j) V(i, j) = monomial(pr.exponents[j], u[0], u[1]);
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(pr.weights.data(), S);
    const Eigen::MatrixXd G = V.transpose() * w.asDiagonal() * V;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    pr.gram_condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(pr.gram_condition <= 1e10))
        throw DegenerateMeasureError("projector: Gram condition " + std::to_string(pr.gram_condition) + " exceeds 1e10");

    auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a.array() * b.array() * w.array()).sum(); };
    Eigen::MatrixXd E = V, C = Eigen::MatrixXd::Identity(M, M);
    for (std::size_t j = 0; j < M; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            double loss = 0.0;
            for (std::size_t i = 0; i < j; ++i) {
                const double r = inner(E.col(j), E.col(i));
                loss = std::max(loss, std::abs(r));
                E.col(j) -= r * E.col(i);
                C.col(j) -= r * C.col(i);
            }
            if (pass == 0) {
                const double nrm = std::sqrt(inner(E.col(j), E.col(j)));
                if (loss / std::max(nrm, 1e-300) <= 1e-10) break;
            }
        }
        const double nrm = std::sqrt(inner(E.col(j), E.col(j)));
        E.col(j) /= nrm;
        C.col(j) /= nrm;
    }
    pr.values = E;
    pr.coefficients = C.transpose();
    const Eigen::MatrixXd O = E.transpose() * w.asDiagonal() * E - Eigen::MatrixXd::Identity(M, M);
    pr.orthogonality_error = O.cwiseAbs().maxCoeff();

    for (auto x : g.indices_in(q.scaled(9.0 / 8.0))) {
        const auto u = scaled(x);
        for (std::size_t j = 0; j < M; ++j) {
            double v = 0.0, d0 = 0.0, d1 = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                const auto& ex = pr.exponents[i];
                const double c = pr.coefficients(j, i);
                v += c * monomial(ex, u[0], u[1]);
                if (ex[0] > 0) d0 += c * ex[0] * monomial({ex[0] - 1, ex[1]}, u[0], u[1]);
                if (ex[1] > 0) d1 += c * ex[1] * monomial({ex[0], ex[1] - 1}, u[0], u[1]);
            }
            pr.sup_bound = std::max(pr.sup_bound, std::abs(v));
            pr.gradient_bound = std::max(pr.gradient_bound, std::sqrt(d0 * d0 + d1 * d1));
        }
    }
    return pr;
}

Projection project_polynomial(const LocalField& f, const PolynomialProjector& pr) {
    const std::size_t S = pr.samples.size(), M = pr.size();
    if (f.samples != pr.samples) throw PreconditionError("projection: field is not given on the projector samples");
    const int m = f.m;
    Projection out;
    out.coefficients = Eigen::MatrixXcd::Zero(M, m);
    for (std::size_t j = 0; j < M; ++j)
        for (int c = 0; c < m; ++c) {
            cplx acc(0.0);
            for (std::size_t i = 0; i < S; ++i) acc += pr.weights[i] * pr.values(i, j) * f.values[i * m + c];
            out.coefficients(j, c) = acc;
        }
    out.field.m = m;
    out.field.samples = pr.samples;
    out.field.values.assign(S * m, cplx(0.0));
    for (std::size_t i = 0; i < S; ++i)
        for (int c = 0; c < m; ++c) {
            cplx acc(0.0);
            for (std::size_t j = 0; j < M; ++j) acc += out.coefficients(j, c) * pr.values(i, j);
            out.field.values[i * m + c] = acc;
        }
    return out;
}

Projection project_polynomial(const VectorField& f, const PolynomialProjector& pr) {
    LocalField local;
    local.m = f.m;
    local.samples = pr.samples;
    for (auto x : pr.samples)
        for (int c = 0; c < f.m; ++c) local.values.push_back(f.data[x * f.m + c]);
    return project_polynomial(local, pr);
}

// ---------------------------------------------------------------------------

CZDecomposition cz_decompose(const VectorField& f, const WeightSamples& ws, const ScalarField& proxy, double alpha,
                             const CZOptions& opt) {
    const Grid& g = f.grid;
    if (!(ws.grid() == g) || !(proxy.grid == g)) throw PreconditionError("czd: grids disagree");
    if (ws.m() != f.m) throw PreconditionError("czd: weight and field dimensions disagree");
    const double p = ws.p;
    const int m = f.m;
    CZDecomposition out;
    out.alpha = alpha;
    out.s = opt.s;
    out.hypothesis_met = opt.s > static_cast<int>(std::floor(g.n * (1.0 / p - 1.0) + opt.d_upper + 1e-12));
    out.level = level_set(proxy, alpha);
    out.g = f;
    if (out.level.empty()) return out;
    out.domain_truncated = out.level.touches_boundary();

    while (out.block < opt.s + 1) out.block *= 2;
    const auto cover = whitney_decompose(mask_to_open_set(out.level, out.block));
    out.partition = build_partition(g, cover.all_cubes(), cover.a_tilde);
    const auto& pu = out.partition;
    const std::size_t K = pu.cubes.size();
    for (const auto& q : pu.cubes) out.stars.push_back(q.scaled(cover.a_star));
    out.b.resize(K);
    out.gk.resize(K);
    out.cubes.resize(K);

    const auto psi = TestFunction::bump(g.n);
    const auto scales = dyadic_scales(g);
    const auto exps = monomials(g.n, opt.s);
    parallel_for(K, [&](std::size_t k) {
        const auto proj = build_projector(pu, k, opt.s);
        const auto P = project_polynomial(f, proj);
        const auto& eta = pu.eta[k];
        LocalField& b = out.b[k];
        LocalField& gk = out.gk[k];
        b.m = gk.m = m;
        b.samples = gk.samples = eta.samples;
        b.values.resize(eta.samples.size() * m);
        gk.values.resize(eta.samples.size() * m);
        for (std::size_t i = 0; i < eta.samples.size(); ++i) {
            const double e = eta.values[i].real();
            for (int c = 0; c < m; ++c) {
                const cplx pf = P.field.values[i * m + c];
                b.values[i * m + c] = (f.data[eta.samples[i] * m + c] - pf) * e;
                gk.values[i * m + c] = pf * e;
            }
        }

        CubeDiagnostics& d = out.cubes[k];
        d.cube = pu.cubes[k];
        LocalField feta = b;
        for (std::size_t i = 0; i < b.samples.size(); ++i)
            for (int c = 0; c < m; ++c) feta.values[i * m + c] = f.data[b.samples[i] * m + c] * eta.values[i].real();
        // b_k is pure rounding when P_k f interpolates f; the floor keeps the ratio meaningful there
        const double l1 = b.l1_norm(g) + 1e-8 * feta.l1_norm(g);
        const double reach = d.cube.edge + std::sqrt(d.cube.center[0] * d.cube.center[0] + d.cube.center[1] * d.cube.center[1]);
        // below this the moments are lost to subnormal rounding
        if (l1 > 1e-250)
            for (const auto& ex : exps)
                for (int c = 0; c < m; ++c) {
                    std::vector<double> re(b.samples.size()), im(b.samples.size());
                    for (std::size_t i = 0; i < b.samples.size(); ++i) {
                        const auto px = g.point(b.samples[i]);
                        const cplx v = b.values[i * m + c] * monomial(ex, px[0], px[1]);
                        re[i] = v.real();
                        im[i] = v.imag();
                    }
                    const double mom = std::hypot(pairwise_sum(re), pairwise_sum(im)) * g.cell_volume();
                    d.moment_residual = std::max(d.moment_residual, mom / (l1 * std::pow(reach, ex[0] + ex[1])));
                }

        const auto star = out.stars[k];
        const auto a = reducing_operator(ws, star, opt.strategy, k).a;
        for (std::size_t i = 0; i < gk.samples.size(); ++i) {
            CVector v(m);
            for (int c = 0; c < m; ++c) v(c) = gk.values[i * m + c];
            d.good_bound = std::max(d.good_bound, (a.matrix() * v).norm() / alpha);
        }

        if (opt.bad_energy) {
            const auto mb = radial_maximal(convolve_stack(b.to_field(g), psi, scales), WeightMode::pointwise(ws));
            const double num = std::pow(lp_quasinorm(mb, p), p);
            std::vector<double> pv;
            for (auto x : g.indices_in(star)) pv.push_back(std::pow(proxy.values[x], p));
            const double den = pairwise_sum(pv) * g.cell_volume();
            d.bad_energy_ratio = den > 0.0 ? num / den : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        }
    });

    // g = f off O plus the local polynomial pieces, assembled independently of b
    VectorField bsum(g, m);
    out.g = f;
    for (const auto& q : pu.cubes)
        for (auto x : g.indices_in(q))
            for (int c = 0; c < m; ++c) out.g.data[x * m + c] = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& b = out.b[k];
        const auto& gk = out.gk[k];
        for (std::size_t i = 0; i < b.samples.size(); ++i)
            for (int c = 0; c < m; ++c) {
                bsum.data[b.samples[i] * m + c] += b.values[i * m + c];
                out.g.data[gk.samples[i] * m + c] += gk.values[i * m + c];
            }
    }
    const double fmax = f.max_abs();
    const auto rest = f - out.g - bsum;
    out.reconstruction_residual = fmax > 0.0 ? rest.max_abs() / fmax : rest.max_abs();
    for (const auto& d : out.cubes) {
        out.moment_residual = std::max(out.moment_residual, d.moment_residual);
        out.good_constant = std::max(out.good_constant, d.good_bound);
        out.bad_energy_max = std::max(out.bad_energy_max, d.bad_energy_ratio);
    }
    return out;
}

CZDecomposition cz_decompose(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family, double alpha,
                             const CZOptions& opt) {
    const auto dict = SchwartzDictionary::standard(f.grid.n, opt.N, static_cast<std::size_t>(opt.dictionary_size));
    const auto proxy = grand_proxy(f, dict, WeightMode::reducing(family));
    return cz_decompose(f, ws, proxy, alpha, opt);
}

} // namespace mwhardy
