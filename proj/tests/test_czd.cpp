#include <doctest.h>

#include <cmath>
#include <random>

#include "mwhardy/czd.hpp"
#include "mwhardy/error.hpp"

using namespace mwhardy;

namespace {

VectorField tall_bump(const Grid& g, int m, double height, double width) {
    VectorField f(g, m);
    const auto psi = TestFunction::bump(g.n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        const double v = height * psi({x[0] / width, x[1] / width}) / psi({0.0, 0.0});
        for (int k = 0; k < m; ++k) f.at(i)(k) = v * (k % 2 ? cplx(0.0, 1.0) : cplx(1.0, 0.0));
    }
    return f;
}

LevelSet mask_from(const Grid& g, const std::function<bool(const Point&)>& in) {
    LevelSet l{g, 1.0, std::vector<std::uint8_t>(g.size(), 0)};
    for (std::size_t i = 0; i < g.size(); ++i) l.mask[i] = in(g.point(i)) ? 1 : 0;
    return l;
}

} // namespace

TEST_CASE("partition of unity on a single cube and on two adjacent cubes") {
    const auto g = Grid::make(1, 1.0, 1.0 / 64);
    SUBCASE("single") {
        const auto pu = build_partition(g, {Cube{1, {0.0, 0.0}, 0.5}});
        CHECK(pu.sum_error < 1e-15);
        // only the cube's own samples are covered, where eta = 1
        CHECK(pu.mass[0] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("two") {
        const auto pu = build_partition(g, {Cube{1, {-0.25, 0.0}, 0.5}, Cube{1, {0.25, 0.0}, 0.5}});
        CHECK(pu.sum_error < 1e-14);
        CHECK(pu.mass[0] + pu.mass[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(pu.mass_low > 0.9);
        CHECK(pu.mass_high < 1.1);
        // samples of Q_1 near the shared face get part of eta_0
        const auto x = g.index(64);
        double e0 = 0.0;
        for (std::size_t i = 0; i < pu.eta[0].samples.size(); ++i)
            if (pu.eta[0].samples[i] == x) e0 = pu.eta[0].values[i].real();
        CHECK(e0 > 0.0);
        CHECK(e0 < 0.5);
    }
    CHECK_THROWS_AS(build_partition(g, {}), DomainError);
}

TEST_CASE("mask to open set covers the mask in blocks") {
    const auto g = Grid::make(2, 1.0, 1.0 / 32);
    const auto lvl = mask_from(g, [](const Point& x) { return std::hypot(x[0], x[1] - 0.1) < 0.3; });
    for (int block : {1, 2, 4}) {
        const auto omega = mask_to_open_set(lvl, block);
        const LatticeSet lat(omega);
        const double unit = block * g.h;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!lvl.mask[i]) continue;
            const auto p = g.point(i);
            CHECK(lat.contains_cell(static_cast<std::int64_t>(std::floor(p[0] / unit)),
                                    static_cast<std::int64_t>(std::floor(p[1] / unit))));
        }
    }
    CHECK_THROWS_AS(mask_to_open_set(lvl, 3), PreconditionError);
    CHECK_THROWS_AS(mask_to_open_set(lvl, 128), AlignmentError);
}

TEST_CASE("projector: orthonormal, idempotent, reproduces polynomials") {
    for (int n : {1, 2}) {
        const auto g = Grid::make(n, 1.0, 1.0 / 32);
        const auto pu = build_partition(g, {Cube{n, {0.25, -0.25}, 0.5}, Cube{n, {-0.25, -0.25}, 0.5}});
        for (int s : {0, 1, 2}) {
            const auto pr = build_projector(pu, 0, s);
            CHECK(pr.size() == static_cast<std::size_t>(n == 1 ? s + 1 : (s + 1) * (s + 2) / 2));
            CHECK(pr.orthogonality_error < 1e-12);
            CHECK((pr.gradient_bound > 0.0) == (s > 0));

            std::mt19937_64 rng(7 + s);
            std::normal_distribution<double> nd;
            VectorField f(g, 2);
            for (auto& v : f.data) v = cplx(nd(rng), nd(rng));
            const auto P = project_polynomial(f, pr);
            const auto PP = project_polynomial(P.field, pr);
            for (std::size_t i = 0; i < P.field.values.size(); ++i)
                CHECK(std::abs(PP.field.values[i] - P.field.values[i]) < 1e-11);

            // a polynomial of degree s is its own projection
            VectorField q(g, 2);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto x = g.point(i);
                const double v = 1.0 - 2.0 * x[0] + 3.0 * x[n - 1] + (s >= 2 ? x[0] * x[n - 1] : 0.0);
                const double w = 0.5 + (s >= 1 ? x[n - 1] : 0.0) - (s >= 2 ? 4.0 * x[n - 1] * x[n - 1] : 0.0);
                q.at(i)(0) = s == 0 ? 1.5 : v;
                q.at(i)(1) = cplx(0.0, s == 0 ? -2.0 : w);
            }
            const auto Q = project_polynomial(q, pr);
            for (std::size_t i = 0; i < pr.samples.size(); ++i)
                for (int c = 0; c < 2; ++c) CHECK(std::abs(Q.field.values[i * 2 + c] - q.data[pr.samples[i] * 2 + c]) < 1e-11);

            // oracle: weighted least squares through the normal equations on raw monomials
            const std::size_t S = pr.samples.size(), M = pr.size();
            Eigen::MatrixXd V(S, M);
            for (std::size_t i = 0; i < S; ++i) {
                const auto x = g.point(pr.samples[i]);
                for (std::size_t j = 0; j < M; ++j)
                    V(i, j) = std::pow(x[0], pr.exponents[j][0]) * std::pow(x[1], pr.exponents[j][1]);
            }
            Eigen::VectorXd w(S), y(S);
            for (std::size_t i = 0; i < S; ++i) {
                w(i) = pr.weights[i];
                y(i) = f.data[pr.samples[i] * 2].real();
            }
            const Eigen::MatrixXd G = V.transpose() * w.asDiagonal() * V;
            const Eigen::VectorXd c = G.ldlt().solve(V.transpose() * w.asDiagonal() * y);
            const Eigen::VectorXd fit = V * c;
            for (std::size_t i = 0; i < S; ++i) CHECK(std::abs(P.field.values[i * 2].real() - fit(i)) < 1e-9);
        }
    }
}

TEST_CASE("projector rejects a degenerate measure") {
    const auto g = Grid::make(1, 1.0, 1.0 / 32);
    // a one-sample cube cannot carry linear polynomials
    const auto pu = build_partition(g, {Cube{1, {g.point(20)[0], 0.0}, g.h}});
    CHECK(pu.eta[0].samples.size() == 1);
    CHECK_NOTHROW(build_projector(pu, 0, 0));
    CHECK_THROWS_AS(build_projector(pu, 0, 1), DegenerateMeasureError);
}

TEST_CASE("cz decomposition: trivial cases") {
    const auto g = Grid::make(1, 1.0, 1.0 / 64);
    const auto w = MatrixWeight::identity(g, 2);
    const WeightSamples ws(w, 1.0);
    const auto fam = ReducingFamily::identity(g, 2, dyadic_scales(g));
    const VectorField zero(g, 2);
    const auto d0 = cz_decompose(zero, ws, fam, 1.0);
    CHECK(d0.b.empty());
    CHECK(d0.g.is_zero());

    const auto f = tall_bump(g, 2, 1.0, 0.3);
    CZOptions opt;
    opt.bad_energy = false;
    const auto dict = SchwartzDictionary::standard(1, opt.N);
    const auto proxy = grand_proxy(f, dict, WeightMode::reducing(fam));
    const auto high = cz_decompose(f, ws, proxy, 2.0 * proxy.max(), opt);
    CHECK(high.b.empty());
    CHECK((high.g - f).max_abs() == 0.0);
}

TEST_CASE("cz decomposition of a tall bump") {
    for (int n : {1, 2}) {
        const auto g = Grid::make(n, n == 1 ? 4.0 : 2.0, n == 1 ? 1.0 / 64 : 1.0 / 32);
        const auto w = MatrixWeight::rotating(g, 0.3, -0.2, ThetaProfile::Angular);
        const WeightSamples ws(w, 1.0);
        const auto fam = build_reducing_family(ws, dyadic_scales(g));
        const auto f = tall_bump(g, 2, 50.0, 0.1);
        const auto dict = SchwartzDictionary::standard(n, 1);
        const auto proxy = grand_proxy(f, dict, WeightMode::reducing(fam));
        for (int s : {0, 1}) {
            CZOptions opt;
            opt.s = s;
            opt.bad_energy = n == 1;
            const double alpha = 0.5 * proxy.max();
            const auto d = cz_decompose(f, ws, proxy, alpha, opt);
            INFO("n=" << n << " s=" << s);
            REQUIRE(!d.b.empty());
            CHECK(d.moment_residual < 1e-6);
            CHECK(d.reconstruction_residual < 1e-8);
            CHECK(d.partition.sum_error < 1e-12);
            CHECK(!d.domain_truncated);
            CHECK(d.hypothesis_met == (s >= 1));
            CHECK(std::isfinite(d.good_constant));
            if (opt.bad_energy) CHECK(d.bad_energy_max < 1e3);
            // g = f off the covered samples
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!d.partition.covered[i]) CHECK(d.g.at(i) == f.at(i));
        }
    }
}

TEST_CASE("cz decomposition: O shrinks as alpha grows, good constant stays bounded") {
    const auto g = Grid::make(1, 4.0, 1.0 / 64);
    const auto w = MatrixWeight::rotating(g, 0.3, -0.2, ThetaProfile::Angular);
    const WeightSamples ws(w, 1.0);
    const auto fam = build_reducing_family(ws, dyadic_scales(g));
    const auto f = tall_bump(g, 2, 20.0, 0.1);
    const auto proxy = grand_proxy(f, SchwartzDictionary::standard(1, 1), WeightMode::reducing(fam));
    CZOptions opt;
    opt.bad_energy = false;
    std::vector<std::uint8_t> prev;
    std::vector<double> constants;
    for (double frac : {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}) {
        const auto d = cz_decompose(f, ws, proxy, frac * proxy.max(), opt);
        if (!prev.empty())
            for (std::size_t i = 0; i < prev.size(); ++i) CHECK(d.level.mask[i] <= prev[i]);
        prev = d.level.mask;
        constants.push_back(d.good_constant);
    }
    const double lo = *std::min_element(constants.begin(), constants.end());
    const double hi = *std::max_element(constants.begin(), constants.end());
    MESSAGE("good constants in [" << lo << ", " << hi << "]");
    CHECK(hi < 4.0 * lo);
}
