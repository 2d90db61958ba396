#include <doctest.h>

#include <cmath>
#include <random>

#include "mwhardy/error.hpp"
#include "mwhardy/maximal.hpp"

using namespace mwhardy;

namespace {

VectorField random_field(const Grid& g, int m, std::mt19937_64& rng, double support = 0.75) {
    std::uniform_real_distribution<double> u(-1, 1);
    VectorField f(g, m);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        if (std::abs(x[0]) > support || std::abs(x[1]) > support) continue;
        for (int k = 0; k < m; ++k) f.at(i)(k) = cplx(u(rng), 0.5 * u(rng));
    }
    return f;
}

VectorField bump_field(const Grid& g, int m, double width, Point center = {0.0, 0.0}) {
    VectorField f(g, m);
    const auto psi = TestFunction::bump(g.n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        const double v = psi({(x[0] - center[0]) / width, (x[1] - center[1]) / width});
        for (int k = 0; k < m; ++k) f.at(i)(k) = v * (k % 2 ? -1.0 : 1.0);
    }
    return f;
}

// direct convolution at one point straight from the definition
cplx oracle_conv(const VectorField& f, const TestFunction& psi, double t, std::size_t x, int comp) {
    const Grid& g = f.grid;
    cplx s = 0.0;
    const auto px = g.point(x);
    for (std::size_t y = 0; y < g.size(); ++y) {
        const auto py = g.point(y);
        s += std::pow(t, -g.n) * psi({(px[0] - py[0]) / t, (px[1] - py[1]) / t}) * f.at(y)(comp) * g.cell_volume();
    }
    return s;
}

} // namespace

TEST_CASE("bump profile and seminorms") {
    for (int n : {1, 2}) {
        const auto psi = TestFunction::bump(n);
        CHECK(psi.integral() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(psi({1.0, 0.0}) == 0.0);
        const auto sn = psi.seminorms(3);
        for (int N = 0; N < 3; ++N) CHECK(sn[N] <= sn[N + 1]);
        CHECK(std::isfinite(sn[3]));
        CHECK(sn[0] >= psi({0.0, 0.0}));
        const TestFunction twice(n, "2psi", [psi](const Point& x) { return 2.0 * psi(x); });
        CHECK(twice.seminorm(1) == doctest::Approx(2.0 * psi.seminorm(1)).epsilon(1e-14));
    }
    // first derivative of the 1d bump peaks near |x| = 0.5: compare with the analytic maximum
    const auto psi = TestFunction::bump(1);
    double oracle = 0.0;
    for (int i = 1; i < 20000; ++i) {
        const double x = -1.0 + i * 1e-4;
        const double d = std::abs(-2 * x / std::pow(1 - x * x, 2) * psi({x, 0.0}));
        oracle = std::max(oracle, std::max(psi({x, 0.0}), d) * (1 + std::abs(x)) * (1 + std::abs(x)));
    }
    CHECK(psi.seminorm(0) == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(grand_parameter(1, 1.0, 0.5, 0.0) == 2);
    CHECK(grand_parameter(2, 0.5, 0.0, 0.25) == 6);
}

TEST_CASE("standard dictionary") {
    for (int n : {1, 2}) {
        const auto d = SchwartzDictionary::standard(n, 1);
        CHECK(d.members.size() == 12);
        CHECK(d.members.front().name() == "bump");
        for (std::size_t k = 0; k < d.members.size(); ++k) {
            CHECK(d.seminorms[k] > 0.0);
            const auto& phi = d.members[k];
            // support inside the unit ball
            CHECK(phi({1.0, 0.0}) == 0.0);
            CHECK(phi({-1.0, 0.0}) == 0.0);
        }
    }
    CHECK_THROWS_AS(SchwartzDictionary::standard(1, 1, 0), PreconditionError);
}

TEST_CASE("convolution at a scale") {
    const Grid g = Grid::make(1, 4.0, 1.0 / 16);
    const auto psi = TestFunction::bump(1);
    CHECK(convolve_scale(VectorField(g, 2), psi, 0.5).is_zero());
    CHECK_THROWS_AS(convolve_scale(VectorField(g, 1), psi, 1.0 / 16), ResolutionError);

    VectorField c(g, 1);
    for (auto& v : c.data) v = 3.0;
    // midpoint error of the bump shrinks fast as t/h grows
    const auto out = convolve_scale(c, psi, 0.5), wide = convolve_scale(c, psi, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.point(i)[0]) < 2.5) {
            CHECK(out.data[i].real() == doctest::Approx(3.0).epsilon(1e-3));
            CHECK(wide.data[i].real() == doctest::Approx(3.0).epsilon(1e-5));
        }

    VectorField delta(g, 1);
    const std::size_t k0 = 40;
    delta.data[k0] = 1.0;
    const double t = 0.25;
    const auto d = convolve_scale(delta, psi, t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double expect = g.h / t * psi({(g.point(i)[0] - g.point(k0)[0]) / t, 0.0});
        CHECK(d.data[i].real() == doctest::Approx(expect).epsilon(1e-13));
    }

    std::mt19937_64 rng(1);
    const Grid g2 = Grid::make(2, 1.0, 1.0 / 8);
    const auto f = random_field(g2, 2, rng);
    const auto psi2 = TestFunction::bump(2);
    const auto conv = convolve_scale(f, psi2, 0.5);
    for (std::size_t x : {0, 37, 100, 255})
        for (int comp = 0; comp < 2; ++comp)
            CHECK(std::abs(conv.at(x)(comp) - oracle_conv(f, psi2, 0.5, x, comp)) < 1e-13);
    const auto h = random_field(g2, 2, rng);
    const auto lin = convolve_scale(f + h, psi2, 0.5) - conv - convolve_scale(h, psi2, 0.5);
    CHECK(lin.max_abs() < 1e-14);
}

TEST_CASE("radial maximal function") {
    std::mt19937_64 rng(2);
    const Grid g = Grid::make(1, 2.0, 1.0 / 16);
    const auto psi = TestFunction::bump(1);
    const auto scales = dyadic_scales(g);
    const auto f = random_field(g, 1, rng);
    const auto mode = WeightMode::unweighted(1);
    CHECK(radial_maximal(convolve_stack(VectorField(g, 1), psi, scales), mode).max() == 0.0);
    const auto r = radial_maximal(convolve_stack(f, psi, scales), mode);
    for (std::size_t x = 0; x < g.size(); x += 7) {
        double oracle = 0.0;
        for (double t : scales) oracle = std::max(oracle, std::abs(oracle_conv(f, psi, t, x, 0)));
        CHECK(r.values[x] == doctest::Approx(oracle).epsilon(1e-12));
    }
    const auto r2 = radial_maximal(convolve_stack(cplx(2.0) * f, psi, scales), mode);
    for (std::size_t x = 0; x < g.size(); ++x) CHECK(r2.values[x] == 2.0 * r.values[x]);
}

TEST_CASE("nontangential and Peetre maximal functions against brute force") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2}) {
        const Grid g = n == 1 ? Grid::make(1, 2.0, 1.0 / 16) : Grid::make(2, 1.0, 1.0 / 8);
        const auto psi = TestFunction::bump(n);
        const auto scales = dyadic_scales(g);
        const auto f = random_field(g, 2, rng);
        const auto stack = convolve_stack(f, psi, scales);
        const WeightSamples ws(n == 1 ? MatrixWeight::rotating(g, -0.25, 0.5, ThetaProfile::Linear)
                                      : MatrixWeight::rotating(g, -0.25, 0.5, ThetaProfile::Angular),
                               1.0);
        const auto mode = WeightMode::pointwise(ws);
        const auto radial = radial_maximal(stack, mode);
        const auto tiny = nontangential_maximal(stack, mode, 1e-9);
        const auto half = nontangential_maximal(stack, mode, 0.5);
        const auto one = nontangential_maximal(stack, mode, 1.0);
        const auto p2 = peetre_maximal(stack, mode, 2.0);
        const auto p4 = peetre_maximal(stack, mode, 4.0);
        for (std::size_t x = 0; x < g.size(); ++x) {
            CHECK(tiny.values[x] == radial.values[x]);
            CHECK(half.values[x] <= one.values[x]);
            CHECK(p4.values[x] <= p2.values[x]);
        }
        for (std::size_t x = 0; x < g.size(); x += 5) {
            const Eigen::MatrixXcd wx = ws.root.at(x);
            double nt = 0.0, pe = 0.0;
            for (std::size_t k = 0; k < scales.size(); ++k)
                for (std::size_t y = 0; y < g.size(); ++y) {
                    const double d = distance(g.point(x), g.point(y), n);
                    const double v = (wx * Eigen::VectorXcd(stack.levels[k].at(y))).norm();
                    if (d < scales[k]) nt = std::max(nt, v);
                    pe = std::max(pe, v * std::pow(1 + d / scales[k], -2.0));
                }
            CHECK(one.values[x] == doctest::Approx(nt).epsilon(1e-12));
            CHECK(p2.values[x] == doctest::Approx(pe).epsilon(1e-12));
        }
    }
}

TEST_CASE("infimum maximal function") {
    const Grid g = Grid::make(1, 4.0, 1.0 / 16);
    const auto psi = TestFunction::bump(1);
    const auto scales = dyadic_scales(g);
    const auto mode = WeightMode::unweighted(1);
    CHECK(nontangential_infimum_maximal(convolve_stack(VectorField(g, 1), psi, scales), mode, 1.0, 0.25).max() == 0.0);

    VectorField c(g, 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.point(i)[0]) < 3.9) c.data[i] = 2.0;
    const std::vector<double> small{0.25, 0.5};
    const auto stack = convolve_stack(c, psi, small);
    const auto inf = nontangential_infimum_maximal(stack, mode, 1.0, 0.25);
    const auto rad = radial_maximal(stack, mode);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.point(i)[0]) < 2.0) CHECK(inf.values[i] == doctest::Approx(rad.values[i]).epsilon(1e-9));

    std::mt19937_64 rng(4);
    const auto f = random_field(g, 1, rng);
    const auto s = convolve_stack(f, psi, scales);
    const auto nt = nontangential_maximal(s, mode, 1.0);
    const auto in = nontangential_infimum_maximal(s, mode, 1.0, 0.25);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(in.values[i] <= nt.values[i]);

    // brute force: cubes of Q_{bt} holding a sample of B(x, at), min over each cube
    for (std::size_t x = 3; x < g.size(); x += 11) {
        double best = 0.0;
        for (std::size_t k = 0; k < scales.size(); ++k) {
            const double e = 0.25 * scales[k];
            for (const auto& q : DyadicGrid::covering(1, e, g.L).cubes()) {
                const Cube half_open{1, q.center, e * (1 - 1e-9)};
                bool meets = false;
                double low = 1e300;
                for (auto y : g.indices_in(half_open)) {
                    meets = meets || std::abs(g.point(x)[0] - g.point(y)[0]) < scales[k];
                    low = std::min(low, std::abs(s.levels[k].data[y]));
                }
                if (meets) best = std::max(best, low);
            }
        }
        CHECK(in.values[x] == doctest::Approx(best).epsilon(1e-13));
    }
    CHECK_THROWS_AS(nontangential_infimum_maximal(s, mode, 1.0, 0.1), AlignmentError);
}

TEST_CASE("grand maximal function") {
    std::mt19937_64 rng(5);
    const Grid g = Grid::make(1, 2.0, 1.0 / 16);
    const auto f = random_field(g, 1, rng);
    const auto psi = TestFunction::bump(1);
    const auto mode = WeightMode::unweighted(1);
    const auto single = SchwartzDictionary::from({psi}, 1);
    const auto rad = radial_maximal(convolve_stack(f, psi, dyadic_scales(g)), mode);
    const auto grand1 = grand_maximal(f, single, GrandVariant::Radial, 0.0, mode);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(grand1.values[i] == rad.values[i] / single.seminorms[0]);

    const auto d6 = SchwartzDictionary::standard(1, 1, 6), d12 = SchwartzDictionary::standard(1, 1, 12);
    for (auto v : {GrandVariant::Radial, GrandVariant::Nontangential, GrandVariant::Peetre}) {
        const double param = v == GrandVariant::Peetre ? 2.0 : 1.0;
        const auto a = grand_maximal(f, d6, v, param, mode), b = grand_maximal(f, d12, v, param, mode);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(a.values[i] <= b.values[i]);
    }
    CHECK_THROWS_AS(grand_maximal(f, SchwartzDictionary{}, GrandVariant::Radial, 0.0, mode), PreconditionError);
}

TEST_CASE("quasi-norms") {
    const Grid g = Grid::make(2, 1.0, 1.0 / 8);
    ScalarField one(g);
    one.values[17] = 1.0;
    CHECK(lp_quasinorm(one, 1.0) == g.cell_volume());
    ScalarField box(g);
    std::size_t cells = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.point(i)[0] > 0 && g.point(i)[1] > 0) {
            box.values[i] = 3.0;
            ++cells;
        }
    for (double p : {0.5, 1.0, 2.0}) {
        CHECK(lp_quasinorm(box, p) == doctest::Approx(3.0 * std::pow(cells * g.cell_volume(), 1.0 / p)).epsilon(1e-14));
        ScalarField twice = box;
        for (auto& v : twice.values) v *= 2.0;
        CHECK(lp_quasinorm(twice, p) == doctest::Approx(2.0 * lp_quasinorm(box, p)).epsilon(1e-12));
    }

    const Grid g1 = Grid::make(1, 2.0, 1.0 / 32);
    const auto psi = TestFunction::bump(1);
    const WeightSamples ws(MatrixWeight::identity(g1, 2), 1.0);
    CHECK(hardy_quasinorm(VectorField(g1, 2), psi, ws) == 0.0);
    const auto f = bump_field(g1, 2, 0.5);
    CHECK(hardy_quasinorm(cplx(-3.0) * f, psi, ws) == doctest::Approx(3.0 * hardy_quasinorm(f, psi, ws)).epsilon(1e-12));
}

TEST_CASE("H^2 proxy tracks the L^2 norm") {
    const Grid g = Grid::make(1, 4.0, 1.0 / 32);
    const auto psi = TestFunction::bump(1);
    const WeightSamples ws(MatrixWeight::identity(g, 1), 2.0);
    double lo = 1e300, hi = 0.0;
    for (double w : {0.25, 0.5, 1.0})
        for (double c : {-1.0, 0.0, 1.0}) {
            const auto f = bump_field(g, 1, w, {c, 0.0});
            const double r = hardy_quasinorm(f, psi, ws) / weighted_lp_norm(f, ws);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    MESSAGE("H^2/L^2 ratio in [" << lo << ", " << hi << "]");
    CHECK(lo > 0.1);
    CHECK(hi / lo < 10.0);
}

TEST_CASE("identity weight and identity reducing family agree bit for bit") {
    std::mt19937_64 rng(6);
    for (int n : {1, 2}) {
        const Grid g = n == 1 ? Grid::make(1, 2.0, 1.0 / 16) : Grid::make(2, 1.0, 1.0 / 8);
        const auto scales = dyadic_scales(g);
        const WeightSamples ws(MatrixWeight::identity(g, 2), 0.5);
        const auto fam = ReducingFamily::identity(g, 2, scales);
        const auto wm = WeightMode::pointwise(ws), am = WeightMode::reducing(fam);
        const auto s = convolve_stack(random_field(g, 2, rng), TestFunction::bump(n), scales);
        CHECK(radial_maximal(s, wm).values == radial_maximal(s, am).values);
        CHECK(nontangential_maximal(s, wm, 1.0).values == nontangential_maximal(s, am, 1.0).values);
        CHECK(nontangential_infimum_maximal(s, wm, 1.0, 0.5).values == nontangential_infimum_maximal(s, am, 1.0, 0.5).values);
        CHECK(peetre_maximal(s, wm, 3.0).values == peetre_maximal(s, am, 3.0).values);
    }
}

TEST_CASE("pointwise chain holds on a shared lattice") {
    std::mt19937_64 rng(7);
    for (int n : {1, 2}) {
        const Grid g = n == 1 ? Grid::make(1, 2.0, 1.0 / 16) : Grid::make(2, 1.0, 1.0 / 8);
        const auto scales = dyadic_scales(g);
        const WeightSamples ws(MatrixWeight::rotating(g, -0.25, 0.5, ThetaProfile::Linear), 1.0);
        const auto fam = build_reducing_family(ws, scales);
        const auto psi = TestFunction::bump(n);
        const MaximalConfig cfg{1.0, 0.5, n + 2.0, 1, 12};
        for (int trial = 0; trial < 2; ++trial) {
            const auto f = random_field(g, 2, rng);
            for (const auto& mode : {WeightMode::pointwise(ws), WeightMode::reducing(fam)}) {
                const auto rep = chain_check(f, psi, cfg, mode);
                CHECK(rep.comparisons == 9 * g.size());
                CHECK(rep.ok());
            }
        }
        const auto zero = chain_check(VectorField(g, 2), psi, cfg, WeightMode::pointwise(ws));
        CHECK(zero.ok());
    }
}
