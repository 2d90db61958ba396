#include "mwhardy/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

namespace {

double radius(const Point& x, int n) { return n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

HermitianMatrix scalar(double v) {
    RVector d(1);
    d(0) = v;
    return HermitianMatrix::diagonal(d);
}

HermitianMatrix power_of(const HermitianMatrix& a, double beta) { return beta == 1.0 ? a : frac_power(a, beta); }

double mean(std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

} // namespace

MatrixWeight::MatrixWeight(Grid grid, int m, std::string family, PowerFn power, bool analytic)
    : grid_(grid), m_(m), family_(std::move(family)), power_(std::move(power)), analytic_(analytic) {
    if (m < 1 || m > kMaxDim) throw PreconditionError("weight: m must be in [1, 8]");
}

MatrixWeight MatrixWeight::identity(const Grid& g, int m) {
    const HermitianMatrix id = HermitianMatrix::identity(m);
    return MatrixWeight(g, m, "identity", [id](const Point&, double) { return id; });
}

MatrixWeight MatrixWeight::constant(const Grid& g, const HermitianMatrix& value) {
    if (!is_positive_definite(value)) throw SingularWeightError("constant weight is not positive definite");
    return MatrixWeight(g, value.dim(), "constant", [value](const Point&, double beta) { return power_of(value, beta); });
}

MatrixWeight MatrixWeight::scalar_power(const Grid& g, double alpha) {
    const int n = g.n;
    return MatrixWeight(g, 1, "scalar-power", [n, alpha](const Point& x, double beta) {
        const double r = radius(x, n);
        if (r == 0.0) throw SingularWeightError("scalar-power weight evaluated at the origin");
        return scalar(std::pow(r, alpha * beta));
    });
}

MatrixWeight MatrixWeight::rotating(const Grid& g, double alpha1, double alpha2, ThetaProfile profile, double theta0) {
    const int n = g.n;
    return MatrixWeight(g, 2, "rotating-2x2", [=](const Point& x, double beta) {
        const double r = radius(x, n);
        if (r == 0.0) throw SingularWeightError("rotating weight evaluated at the origin");
        double theta = theta0;
        if (profile == ThetaProfile::Linear) theta += x[0];
        if (profile == ThetaProfile::Angular) theta += std::atan2(n == 2 ? x[1] : 0.0, x[0]);
        const double c = std::cos(theta), s = std::sin(theta);
        const double d1 = std::pow(r, alpha1 * beta), d2 = std::pow(r, alpha2 * beta);
        CMatrix w(2, 2);
        w(0, 0) = c * c * d1 + s * s * d2;
        w(1, 1) = s * s * d1 + c * c * d2;
        w(0, 1) = w(1, 0) = c * s * (d1 - d2);
        return HermitianMatrix(w);
    });
}

MatrixWeight MatrixWeight::step(const Grid& g, const Cube& box, const HermitianMatrix& inside,
                                const HermitianMatrix& outside) {
    if (inside.dim() != outside.dim()) throw PreconditionError("step weight: dimension mismatch");
    if (!is_positive_definite(inside) || !is_positive_definite(outside))
        throw SingularWeightError("step weight values must be positive definite");
    return MatrixWeight(g, inside.dim(), "step", [=](const Point& x, double beta) {
        return power_of(box.contains(x) ? inside : outside, beta);
    });
}

MatrixWeight MatrixWeight::affine(const Grid& g, const HermitianMatrix& a0, const std::vector<HermitianMatrix>& slopes) {
    if (static_cast<int>(slopes.size()) > g.n) throw PreconditionError("affine weight: more slopes than dimensions");
    for (const auto& s : slopes)
        if (s.dim() != a0.dim()) throw PreconditionError("affine weight: dimension mismatch");
    MatrixWeight w(g, a0.dim(), "affine", [=](const Point& x, double beta) {
        CMatrix v = a0.matrix();
        for (std::size_t i = 0; i < slopes.size(); ++i) v += x[i] * slopes[i].matrix();
        return power_of(HermitianMatrix(v), beta);
    });
    w.validate();
    return w;
}

MatrixWeight MatrixWeight::user_grid(const Grid& g, const MatrixField& samples) {
    if (samples.size() != g.size()) throw PreconditionError("user-grid weight: sample count does not match the grid");
    std::vector<HermitianMatrix> table;
    table.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) table.emplace_back(CMatrix(samples.at(i)));
    auto shared = std::make_shared<std::vector<HermitianMatrix>>(std::move(table));
    MatrixWeight w(
        g, samples.m, "user-grid",
        [g, shared](const Point& x, double beta) {
            const int i = std::clamp(g.axis_cell(x[0]), 0, g.cells - 1);
            const int j = g.n == 2 ? std::clamp(g.axis_cell(x[1]), 0, g.cells - 1) : 0;
            return power_of((*shared)[g.index(i, j)], beta);
        },
        false);
    w.validate();
    return w;
}

MatrixField MatrixWeight::power_field(double beta) const {
    MatrixField out{m_, std::vector<cplx>(grid_.size() * m_ * m_)};
    parallel_for(grid_.size(), [&](std::size_t i) { out.at(i) = power_(grid_.point(i), beta).matrix(); });
    return out;
}

MatrixWeight MatrixWeight::on_grid(const Grid& g) const {
    if (!analytic_) throw PreconditionError("weight: tabulated weights cannot be resampled");
    return MatrixWeight(g, m_, family_, power_, analytic_);
}

double MatrixWeight::validate() const {
    std::vector<double> mins(grid_.size());
    parallel_for(grid_.size(), [&](std::size_t i) { mins[i] = min_eigenvalue(power_(grid_.point(i), 1.0)); });
    const double lo = *std::min_element(mins.begin(), mins.end());
    if (!(lo > 0.0)) throw SingularWeightError("weight is not positive definite on the grid");
    return lo;
}

WeightSamples::WeightSamples(const MatrixWeight& weight_, double p_) : weight(weight_), p(p_) {
    if (!(p > 0.0)) throw PreconditionError("p must be positive");
    w = weight.power_field(1.0);
    root = weight.power_field(1.0 / p);
    inv_root = weight.power_field(-1.0 / p);
}

// ---------------------------------------------------------------------------

const char* to_string(ReducingStrategy s) {
    switch (s) {
    case ReducingStrategy::Auto: return "auto";
    case ReducingStrategy::ExactScalar: return "exact-scalar";
    case ReducingStrategy::ExactP2: return "exact-p2";
    case ReducingStrategy::DirectionFit: return "direction-fit";
    }
    return "auto";
}

ReducingStrategy reducing_strategy_from_string(const std::string& s) {
    if (s == "auto") return ReducingStrategy::Auto;
    if (s == "exact-scalar") return ReducingStrategy::ExactScalar;
    if (s == "exact-p2") return ReducingStrategy::ExactP2;
    if (s == "direction-fit") return ReducingStrategy::DirectionFit;
    throw SchemaError("unknown reducing strategy '" + s + "'");
}

double reducing_rho(const WeightSamples& ws, const std::vector<std::size_t>& cells, const CVector& z) {
    std::vector<double> v(cells.size());
    const int m = ws.m();
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const Eigen::VectorXcd wz = ws.root.at(cells[k]) * Eigen::Map<const Eigen::VectorXcd>(z.data(), m);
        v[k] = ws.p == 2.0 ? wz.squaredNorm() : std::pow(wz.norm(), ws.p);
    }
    return std::pow(mean(v), 1.0 / ws.p);
}

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

constexpr unsigned kPrimes[16] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

} // namespace

std::vector<CVector> sphere_directions(int m, std::size_t count, std::uint64_t offset) {
    std::vector<CVector> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t idx = offset + k + 1;
        CVector z(m);
        for (int c = 0; c < m; ++c) {
            const double u1 = radical_inverse(idx, kPrimes[2 * c]);
            const double u2 = radical_inverse(idx, kPrimes[2 * c + 1]);
            const double rad = std::sqrt(-2.0 * std::log(u1));
            z(c) = cplx(rad * std::cos(2.0 * M_PI * u2), rad * std::sin(2.0 * M_PI * u2));
        }
        out.push_back(z / z.norm());
    }
    return out;
}

namespace {

HermitianMatrix average_matrix(const MatrixField& f, const std::vector<std::size_t>& cells) {
    const int m = f.m;
    CMatrix avg(m, m);
    std::vector<double> re(cells.size()), im(cells.size());
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                const cplx v = f.at(cells[k])(i, j);
                re[k] = v.real();
                im[k] = v.imag();
            }
            avg(i, j) = cplx(mean(re), mean(im));
        }
    return HermitianMatrix(CMatrix((avg + avg.adjoint()) * 0.5));
}

HermitianMatrix fit_directions(const WeightSamples& ws, const std::vector<std::size_t>& cells,
                               const std::vector<CVector>& dirs) {
    const int m = ws.m();
    const int params = m * m;
    Eigen::MatrixXd design(dirs.size(), params);
    Eigen::VectorXd target(dirs.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const CVector& z = dirs[k];
        int col = 0;
        for (int i = 0; i < m; ++i) design(k, col++) = std::norm(z(i));
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const cplx c = std::conj(z(i)) * z(j);
                design(k, col++) = 2.0 * c.real();
                design(k, col++) = -2.0 * c.imag();
            }
        const double rho = reducing_rho(ws, cells, z);
        target(k) = rho * rho;
    }
    const Eigen::VectorXd x = design.colPivHouseholderQr().solve(target);
    CMatrix h = CMatrix::Zero(m, m);
    int col = 0;
    for (int i = 0; i < m; ++i) h(i, i) = x(col++);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            h(i, j) = cplx(x(col), x(col + 1));
            h(j, i) = std::conj(h(i, j));
            col += 2;
        }
    // Project to the PSD cone, then take the square root.
    auto dec = eig_decompose(HermitianMatrix(h));
    const double trace = std::max(0.0, dec.eigenvalues.sum());
    const double floor = std::max(1e-12 * trace, std::numeric_limits<double>::min());
    for (int i = 0; i < m; ++i) dec.eigenvalues(i) = std::max(dec.eigenvalues(i), floor);
    return frac_power(dec, 0.5);
}

} // namespace

ReducingOperator reducing_operator(const WeightSamples& ws, const Cube& e, ReducingStrategy strategy,
                                   std::uint64_t seed, bool validate) {
    const std::vector<std::size_t> cells = ws.grid().indices_in(e);
    if (cells.empty()) throw PreconditionError("reducing_operator: cube holds no grid samples");
    const int m = ws.m();
    if (strategy == ReducingStrategy::Auto)
        strategy = m == 1 ? ReducingStrategy::ExactScalar
                          : (ws.p == 2.0 ? ReducingStrategy::ExactP2 : ReducingStrategy::DirectionFit);
    ReducingOperator out;
    out.strategy = strategy;
    const std::size_t k = 64 * static_cast<std::size_t>(m * m);
    switch (strategy) {
    case ReducingStrategy::ExactScalar: {
        if (m != 1) throw PreconditionError("exact-scalar reducing operator needs m = 1");
        std::vector<double> v(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) v[i] = ws.w.data[cells[i]].real();
        const double avg = mean(v);
        out.a = scalar(ws.p == 1.0 ? avg : std::pow(avg, 1.0 / ws.p));
        break;
    }
    case ReducingStrategy::ExactP2:
        if (ws.p != 2.0) throw PreconditionError("exact-p2 reducing operator needs p = 2");
        out.a = frac_power(average_matrix(ws.w, cells), 0.5);
        break;
    case ReducingStrategy::DirectionFit:
    case ReducingStrategy::Auto:
        out.a = fit_directions(ws, cells, sphere_directions(m, k, seed * 2 * k));
        validate = true;
        break;
    }
    if (validate) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const CVector& z : sphere_directions(m, k, seed * 2 * k + k)) {
            const double az = (out.a.matrix() * z).norm();
            const double ratio = reducing_rho(ws, cells, z) / az;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        out.c_low = lo;
        out.c_high = hi;
        if (!(hi / lo <= 100.0))
            throw ConstructionError("reducing_operator: validation ratio " + std::to_string(hi / lo) + " exceeds 100");
    }
    return out;
}

double reducing_matrix_equivalence(const WeightSamples& ws, const HermitianMatrix& a, const Cube& e, const CMatrix& mat) {
    const auto cells = ws.grid().indices_in(e);
    if (cells.empty()) throw PreconditionError("reducing_matrix_equivalence: cube holds no grid samples");
    std::vector<double> v(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) v[k] = std::pow(op_norm(CMatrix(ws.root.at(cells[k]) * mat)), ws.p);
    return op_norm(CMatrix(a.matrix() * mat)) / std::pow(mean(v), 1.0 / ws.p);
}

std::size_t ReducingFamily::scale_index(double t) const {
    for (std::size_t i = 0; i < scales.size(); ++i)
        if (scales[i] == t) return i;
    throw PreconditionError("reducing family: scale " + std::to_string(t) + " not available");
}

namespace {

void fill_owner(ReducingFamily& fam) {
    fam.dyadic.clear();
    fam.owner.clear();
    for (double t : fam.scales) {
        const auto dg = DyadicGrid::covering(fam.grid.n, t, fam.grid.L);
        std::vector<std::uint32_t> own(fam.grid.size());
        const std::int64_t w = dg.hi[0] - dg.lo[0];
        for (std::size_t i = 0; i < fam.grid.size(); ++i) {
            const auto k = dg.index_of(fam.grid.point(i));
            own[i] = static_cast<std::uint32_t>((k[0] - dg.lo[0]) + w * (fam.grid.n == 2 ? k[1] - dg.lo[1] : 0));
        }
        fam.dyadic.push_back(dg);
        fam.owner.push_back(std::move(own));
    }
}

} // namespace

ReducingFamily ReducingFamily::identity(const Grid& g, int m, const std::vector<double>& scales) {
    ReducingFamily fam;
    fam.grid = g;
    fam.m = m;
    fam.scales = scales;
    fill_owner(fam);
    for (const auto& dg : fam.dyadic)
        fam.ops.emplace_back(dg.size(), ReducingOperator{HermitianMatrix::identity(m), 1.0, 1.0, ReducingStrategy::Auto});
    return fam;
}

ReducingFamily build_reducing_family(const WeightSamples& ws, const std::vector<double>& scales,
                                     ReducingStrategy strategy, std::uint64_t seed) {
    ReducingFamily fam;
    fam.grid = ws.grid();
    fam.m = ws.m();
    fam.p = ws.p;
    fam.strategy = strategy;
    fam.scales = scales;
    fill_owner(fam);
    fam.c_low = std::numeric_limits<double>::infinity();
    fam.c_high = 0.0;
    for (const auto& dg : fam.dyadic) {
        const auto cubes = dg.cubes();
        std::vector<ReducingOperator> ops(cubes.size());
        parallel_for(cubes.size(), [&](std::size_t i) { ops[i] = reducing_operator(ws, cubes[i], strategy, seed); });
        for (const auto& op : ops) {
            fam.c_low = std::min(fam.c_low, op.c_low);
            fam.c_high = std::max(fam.c_high, op.c_high);
        }
        fam.ops.push_back(std::move(ops));
    }
    return fam;
}

// ---------------------------------------------------------------------------

CubeFamily grid_cube_family(const Grid& g, double min_edge, double max_edge, bool all_offsets) {
    CubeFamily fam;
    fam.description = std::string(all_offsets ? "grid-aligned" : "dyadic-aligned") + " cubes, edge in [" +
                      std::to_string(min_edge) + ", " + std::to_string(max_edge) + "]";
    for (int ec = 1; ec <= g.cells; ec *= 2) {
        const double e = ec * g.h;
        if (e < min_edge * (1 - 1e-12) || e > max_edge * (1 + 1e-12)) continue;
        const int stride = all_offsets ? 1 : ec;
        const int rows = g.n == 2 ? g.cells - ec : 0;
        for (int j = 0; j <= rows; j += stride)
            for (int i = 0; i + ec <= g.cells; i += stride) {
                Cube q{g.n, {-g.L + (i + 0.5 * ec) * g.h, g.n == 2 ? -g.L + (j + 0.5 * ec) * g.h : 0.0}, e};
                fam.cubes.push_back(q);
            }
    }
    return fam;
}

namespace {

double pair_norm(const WeightSamples& ws, std::size_t x, std::size_t y) {
    if (ws.m() == 1) return std::abs(ws.root.data[x] * ws.inv_root.data[y]);
    return op_norm(CMatrix(ws.root.at(x) * ws.inv_root.at(y)));
}

double powp(double v, double p) { return p == 1.0 ? v : std::pow(v, p); }

/// log of avg_{x in xs} ||W^{1/p}(x) W^{-1/p}(y)||^p
double log_inner(const WeightSamples& ws, const std::vector<std::size_t>& xs, std::size_t y, std::vector<double>& buf) {
    buf.resize(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) buf[k] = powp(pair_norm(ws, xs[k], y), ws.p);
    return std::log(mean(buf));
}

double ap_cube(const WeightSamples& ws, const std::vector<std::size_t>& cells) {
    std::vector<double> buf(cells.size());
    if (ws.p <= 1.0) {
        double best = 0.0;
        for (std::size_t y : cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) buf[k] = powp(pair_norm(ws, cells[k], y), ws.p);
            best = std::max(best, mean(buf));
        }
        return best;
    }
    const double pp = ws.p / (ws.p - 1.0);
    std::vector<double> outer(cells.size());
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t k = 0; k < cells.size(); ++k) buf[k] = std::pow(pair_norm(ws, cells[a], cells[k]), pp);
        outer[a] = std::pow(mean(buf), ws.p / pp);
    }
    return mean(outer);
}

double ap_infty_cube(const WeightSamples& ws, const std::vector<std::size_t>& xs, const std::vector<std::size_t>& ys) {
    std::vector<double> buf, logs(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) logs[k] = log_inner(ws, xs, ys[k], buf);
    return std::exp(mean(logs));
}

CharacteristicReport finish_report(double p, const CubeFamily& cubes, std::vector<double> values) {
    CharacteristicReport rep;
    rep.p = p;
    rep.family = cubes.description;
    for (std::size_t i = 0; i < values.size(); ++i) {
        rep.per_cube.push_back({cubes.cubes[i], values[i]});
        if (!std::isfinite(values[i]) || values[i] > rep.value) rep.value = values[i];
    }
    rep.infinite = !std::isfinite(rep.value) || rep.value > kInfiniteCharacteristic;
    if (rep.infinite) rep.value = std::numeric_limits<double>::infinity();
    rep.worst = rep.per_cube;
    std::stable_sort(rep.worst.begin(), rep.worst.end(), [](const CubeValue& a, const CubeValue& b) { return a.value > b.value; });
    if (rep.worst.size() > 5) rep.worst.resize(5);
    return rep;
}

} // namespace

CharacteristicReport ap_characteristic(const WeightSamples& ws, const CubeFamily& cubes) {
    std::vector<double> values(cubes.cubes.size());
    parallel_for(cubes.cubes.size(), [&](std::size_t i) { values[i] = ap_cube(ws, ws.grid().indices_in(cubes.cubes[i])); });
    return finish_report(ws.p, cubes, std::move(values));
}

CharacteristicReport ap_infty_characteristic(const WeightSamples& ws, const CubeFamily& cubes) {
    std::vector<double> values(cubes.cubes.size());
    parallel_for(cubes.cubes.size(), [&](std::size_t i) {
        const auto cells = ws.grid().indices_in(cubes.cubes[i]);
        values[i] = ap_infty_cube(ws, cells, cells);
    });
    return finish_report(ws.p, cubes, std::move(values));
}

namespace {

struct Fit {
    double slope = 0.0, residual = 0.0;
};

Fit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    Fit f;
    f.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + f.slope * (x[i] - mx));
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

} // namespace

DimensionEstimate dimension_estimates(const WeightSamples& ws, const CubeFamily& base, const std::vector<double>& lambdas) {
    if (base.cubes.empty()) throw PreconditionError("dimension_estimates: empty cube family");
    DimensionEstimate est;
    for (double lam : lambdas) {
        const bool fits = std::all_of(base.cubes.begin(), base.cubes.end(),
                                      [&](const Cube& q) { return ws.grid().contains(q.scaled(lam)); });
        if (fits && lam >= 1.0) est.lambdas.push_back(lam);
    }
    if (est.lambdas.size() < 4)
        throw PreconditionError("dimension_estimates: fewer than 4 dilation factors fit in the domain");
    for (double lam : est.lambdas) {
        std::vector<double> lo(base.cubes.size()), up(base.cubes.size());
        parallel_for(base.cubes.size(), [&](std::size_t i) {
            const auto q = ws.grid().indices_in(base.cubes[i]);
            const auto ql = ws.grid().indices_in(base.cubes[i].scaled(lam));
            lo[i] = ap_infty_cube(ws, q, ql);
            up[i] = ap_infty_cube(ws, ql, q);
        });
        est.lower_values.push_back(*std::max_element(lo.begin(), lo.end()));
        est.upper_values.push_back(*std::max_element(up.begin(), up.end()));
    }
    std::vector<double> lx, ll, lu;
    for (std::size_t i = 0; i < est.lambdas.size(); ++i) {
        lx.push_back(std::log(est.lambdas[i]));
        ll.push_back(std::log(est.lower_values[i]));
        lu.push_back(std::log(est.upper_values[i]));
    }
    const Fit fl = ols(lx, ll), fu = ols(lx, lu);
    est.slope_lower = fl.slope;
    est.slope_upper = fu.slope;
    est.residual_lower = fl.residual;
    est.residual_upper = fu.residual;
    est.d_lower = std::max(0.0, fl.slope);
    est.d_upper = std::max(0.0, fu.slope);
    return est;
}

ReverseHolderEstimate reverse_holder_exponent(const WeightSamples& ws, const CubeFamily& cubes,
                                              const std::vector<double>& r_grid, double threshold,
                                              ReducingStrategy strategy) {
    ReverseHolderEstimate est;
    est.r_grid = r_grid;
    std::sort(est.r_grid.begin(), est.r_grid.end());
    std::vector<std::vector<double>> per_cube(cubes.cubes.size());
    parallel_for(cubes.cubes.size(), [&](std::size_t c) {
        const auto cells = ws.grid().indices_in(cubes.cubes[c]);
        const auto op = reducing_operator(ws, cubes.cubes[c], strategy, 0, false);
        const CMatrix inv = frac_power(op.a, -1.0).matrix();
        std::vector<double> g(cells.size()), buf(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) g[k] = op_norm(CMatrix(ws.root.at(cells[k]) * inv));
        for (double r : est.r_grid) {
            const double e = r * ws.p;
            for (std::size_t k = 0; k < g.size(); ++k) buf[k] = std::pow(g[k], e);
            per_cube[c].push_back(std::pow(mean(buf), 1.0 / e));
        }
    });
    est.capped = true;
    est.r = 1.0;
    for (std::size_t i = 0; i < est.r_grid.size(); ++i) {
        double v = 0.0;
        for (const auto& pc : per_cube) v = std::max(v, pc[i]);
        est.values.push_back(v);
        if (v <= threshold)
            est.r = est.r_grid[i];
        else
            est.capped = false;
    }
    return est;
}

ScalarField gamma_field(const WeightSamples& ws, const ReducingFamily& family, std::size_t scale) {
    if (!(family.grid == ws.grid())) throw PreconditionError("gamma_field: grid mismatch");
    std::vector<CMatrix> inv;
    for (const auto& op : family.ops.at(scale)) inv.push_back(frac_power(op.a, -1.0).matrix());
    ScalarField out(ws.grid());
    parallel_for(ws.grid().size(), [&](std::size_t i) {
        out.values[i] = op_norm(CMatrix(ws.root.at(i) * inv[family.owner[scale][i]]));
    });
    return out;
}

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

} // namespace

ScalarField dyadic_average(const ScalarField& f, double t) {
    const Grid& g = f.grid;
    if (!(t > 0.0) || !is_integer(t / g.h) || t < g.h || !is_integer(g.L / g.h))
        throw AlignmentError("dyadic_average: scale " + std::to_string(t) + " is not aligned with the grid");
    ScalarField out(g);
    const auto dg = DyadicGrid::covering(g.n, t, g.L);
    const auto cubes = dg.cubes();
    parallel_for(cubes.size(), [&](std::size_t c) {
        const auto cells = g.indices_in(cubes[c]);
        if (cells.empty()) return;
        std::vector<double> v(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) v[k] = f.values[cells[k]];
        const double avg = mean(v);
        for (std::size_t idx : cells) out.values[idx] = avg;
    });
    return out;
}

DoublingResult doubling_order_check(const std::vector<std::pair<Cube, HermitianMatrix>>& family, double beta1,
                                    double beta2, double omega) {
    DoublingResult res;
    std::vector<CMatrix> inv;
    for (const auto& [q, a] : family) inv.push_back(frac_power(a, -1.0).matrix());
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j < family.size(); ++j) {
            const Cube& q = family[i].first;
            const Cube& r = family[j].first;
            const double lhs = op_norm(CMatrix(family[i].second.matrix() * inv[j]));
            const double sep = distance(q.center, r.center, q.n) / std::max(q.edge, r.edge);
            const double bound = std::max(std::pow(r.edge / q.edge, beta1), std::pow(q.edge / r.edge, beta2)) *
                                 std::pow(1.0 + sep, omega);
            const double c = lhs / bound;
            ++res.pairs;
            if (c > res.constant) {
                res.constant = c;
                res.q = q;
                res.r = r;
            }
        }
    return res;
}

double k_norm(const LevelSequence& omega, double p) {
    if (omega.levels.empty()) return 0.0;
    const Grid& g = omega.levels.front().grid;
    const int j_top = -static_cast<int>(std::floor(std::log2(g.L) + 1e-12));
    const int j_fine = static_cast<int>(std::floor(std::log2(1.0 / g.h) + 1e-12));
    double best = 0.0;
    for (int jq = j_top; jq <= j_fine; ++jq) {
        ScalarField s(g, 0.0);
        for (int j = std::max(jq, omega.j_lo); j <= omega.j_hi(); ++j) {
            const auto& lev = omega.levels[j - omega.j_lo].values;
            for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = std::max(s.values[i], powp(lev[i], p));
        }
        best = std::max(best, dyadic_average(s, std::ldexp(1.0, -jq)).max());
    }
    return std::pow(best, 1.0 / p);
}

SupEstimate dyadic_sup_estimate(const LevelSequence& omega, const LevelSequence& f, int k, const DyadicCube& cube,
                                double p) {
    if (f.levels.empty()) throw PreconditionError("dyadic_sup_estimate: no f levels");
    const Grid& g = f.levels.front().grid;
    const int n = g.n;
    SupEstimate est;
    est.omega_norm = k_norm(omega, p);
    if (est.omega_norm > 1.0 + 1e-12)
        throw PreconditionError("dyadic_sup_estimate: ||omega||_K = " + std::to_string(est.omega_norm) + " exceeds 1");
    for (int j = f.j_lo; j <= f.j_hi(); ++j) {
        const auto& lev = f.levels[j - f.j_lo];
        const auto avg = dyadic_average(lev, std::ldexp(1.0, -j));
        bool constant = true;
        for (std::size_t i = 0; i < avg.values.size() && constant; ++i)
            constant = std::abs(avg.values[i] - lev.values[i]) <= 1e-12 * std::max(1.0, std::abs(lev.values[i]));
        if (!constant)
            throw PreconditionError("dyadic_sup_estimate: f_j is not constant on dyadic cubes of level j");
    }
    const Cube pc = cube.cube();
    if (!g.contains(pc)) throw PreconditionError("dyadic_sup_estimate: cube P leaves the domain");
    const auto cells = g.indices_in(pc);
    const int j0 = cube.level + k;
    std::vector<double> a(cells.size(), 0.0), b(cells.size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int j = std::max(j0, f.j_lo); j <= f.j_hi(); ++j) {
            const double fv = std::abs(f.levels[j - f.j_lo].values[cells[c]]);
            const double wv = (j >= omega.j_lo && j <= omega.j_hi()) ? omega.levels[j - omega.j_lo].values[cells[c]] : 0.0;
            a[c] = std::max(a[c], wv * fv);
            b[c] = std::max(b[c], fv);
        }
        a[c] = powp(a[c], p);
        b[c] = powp(b[c], p);
    }
    est.lhs = std::pow(integrate(g, a), 1.0 / p);
    const double denom = std::pow(integrate(g, b), 1.0 / p);
    est.bound = std::pow(2.0, n / p) * std::max(1.0, std::pow(2.0, -k * n / p));
    est.rhs = est.bound * denom;
    est.ratio = denom > 0.0 ? est.lhs / denom : 1.0;
    return est;
}

} // namespace mwhardy
