#include <doctest.h>

#include <cmath>

#include "mwhardy/error.hpp"
#include "mwhardy/oracle.hpp"

using namespace mwhardy;

namespace {

VectorField smooth(const Grid& g) {
    VectorField f(g, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        f.at(i)(0) = cplx(std::exp(-8.0 * (x[0] * x[0] + x[1] * x[1])), 0.5 * std::sin(3.0 * x[0]));
    }
    return f;
}

} // namespace

TEST_CASE("scalar oracle closed forms") {
    const auto g = Grid::make(1, 1.0, 1.0 / 64);
    const auto one = oracle::sample_weight(MatrixWeight::identity(g, 1));
    const Cube q{1, {0.5, 0.0}, 1.0};
    CHECK(oracle::ap(g, one, q, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(oracle::ap_infty(g, one, q) == doctest::Approx(1.0).epsilon(1e-15));
    // w = x + 1 on [0, 1]: the midpoint rule is exact for the mean 3/2
    const auto lin = oracle::sample_weight(
        MatrixWeight::affine(g, HermitianMatrix::identity(1), {HermitianMatrix::identity(1)}));
    CHECK(oracle::reducing_value(g, lin, q, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(oracle::reducing_value(g, lin, q, 2.0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(oracle::compare(MatrixWeight::identity(g, 2), VectorField(g, 2), {}), PreconditionError);
}

TEST_CASE("scalar oracle agrees with the matrix pipeline") {
    for (int n : {1, 2}) {
        const auto g = Grid::make(n, 1.0, n == 1 ? 1.0 / 64 : 1.0 / 16);
        std::vector<MatrixWeight> weights{MatrixWeight::identity(g, 1), MatrixWeight::scalar_power(g, 0.5),
                                          MatrixWeight::step(g, Cube{n, {0.25, 0.25}, 0.5}, HermitianMatrix::identity(1),
                                                             HermitianMatrix::diagonal(RVector::Constant(1, 4.0)))};
        for (const auto& w : weights)
            for (double p : {1.0, 2.0}) {
                oracle::Config cfg;
                cfg.p = p;
                for (const auto& c : oracle::compare(w, smooth(g), cfg)) {
                    INFO("n=" << n << " " << w.family() << " p=" << p << ": " << c.quantity << " differs by " << c.difference);
                    CHECK(c.ok);
                }
            }
    }
}
