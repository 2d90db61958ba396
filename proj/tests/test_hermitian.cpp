#include <doctest.h>

#include <random>

#include "mwhardy/error.hpp"
#include "mwhardy/hermitian.hpp"

using namespace mwhardy;

namespace {

CMatrix random_pd(std::mt19937_64& rng, int m) {
    std::normal_distribution<double> g;
    CMatrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = cplx(g(rng), g(rng));
    return b * b.adjoint() + 0.5 * CMatrix::Identity(m, m);
}

CMatrix mat2(double a, double b, double c, double d) {
    CMatrix x(2, 2);
    x << a, b, c, d;
    return x;
}

} // namespace

TEST_CASE("eig_decompose of a diagonal matrix is itself") {
    const auto dec = eig_decompose(HermitianMatrix(mat2(4, 0, 0, 9)));
    CHECK(dec.eigenvalues(0) == 4.0);
    CHECK(dec.eigenvalues(1) == 9.0);
    CHECK((dec.eigenvectors - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("eig_decompose of the identity") {
    const auto dec = eig_decompose(HermitianMatrix::identity(5));
    for (int i = 0; i < 5; ++i) CHECK(dec.eigenvalues(i) == 1.0);
    CHECK((dec.eigenvectors.adjoint() * dec.eigenvectors - CMatrix::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("eig_decompose matches the characteristic polynomial") {
    // lambda^2 - tr lambda + det = 0
    const double tr = 4.0, det = 3.0;
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const auto dec = eig_decompose(HermitianMatrix(mat2(2, 1, 1, 2)));
    CHECK(dec.eigenvalues(0) == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-14));
    CHECK(dec.eigenvalues(1) == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-14));
}

TEST_CASE("eig_decompose reconstructs random Hermitian matrices") {
    std::mt19937_64 rng(7);
    for (int m = 1; m <= 8; ++m) {
        const CMatrix a = random_pd(rng, m) - 3.0 * CMatrix::Identity(m, m);
        const auto dec = eig_decompose(HermitianMatrix(a));
        CMatrix lam = CMatrix::Zero(m, m);
        for (int i = 0; i < m; ++i) lam(i, i) = dec.eigenvalues(i);
        const CMatrix rec = dec.eigenvectors * lam * dec.eigenvectors.adjoint();
        CHECK((rec - a).norm() <= 1e-10 * (1.0 + op_norm(a)));
        CHECK((dec.eigenvectors.adjoint() * dec.eigenvectors - CMatrix::Identity(m, m)).norm() <= 1e-10);
        for (int i = 1; i < m; ++i) CHECK(dec.eigenvalues(i - 1) <= dec.eigenvalues(i));
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    CHECK_THROWS_AS(HermitianMatrix(mat2(1, 2, 0, 1)), InvariantError);
    CMatrix c(2, 2);
    c << cplx(1, 0), cplx(0, 1), cplx(0, 1), cplx(1, 0);
    CHECK_THROWS_AS(HermitianMatrix{c}, InvariantError);
    CHECK_THROWS_AS(HermitianMatrix(CMatrix::Zero(2, 3)), InvariantError);
}

TEST_CASE("frac_power examples") {
    const auto r = frac_power(HermitianMatrix(mat2(4, 0, 0, 9)), 0.5);
    CHECK((r.matrix() - mat2(2, 0, 0, 3)).norm() == 0.0);

    std::mt19937_64 rng(3);
    const HermitianMatrix a(random_pd(rng, 3));
    CHECK((frac_power(a, 0.0).matrix() - CMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((frac_power(a, 1.0).matrix() - a.matrix()).norm() < 1e-10 * op_norm(a));

    // 2x2 inverse via the adjugate
    const double a11 = 2, a12 = 1, a21 = 1, a22 = 2, det = a11 * a22 - a12 * a21;
    const CMatrix inv = mat2(a22 / det, -a12 / det, -a21 / det, a11 / det);
    CHECK((frac_power(HermitianMatrix(mat2(2, 1, 1, 2)), -1.0).matrix() - inv).norm() < 1e-12);
}

TEST_CASE("frac_power rejects singular input") {
    CHECK_THROWS_AS(frac_power(HermitianMatrix(mat2(1, 0, 0, 0)), 0.5), SingularWeightError);
    CHECK_THROWS_AS(frac_power(HermitianMatrix(mat2(1, 1, 1, 1)), -0.5), SingularWeightError);
    CHECK_THROWS_AS(frac_power(HermitianMatrix(mat2(-1, 0, 0, 2)), 0.5), SingularWeightError);
}

TEST_CASE("frac_power composes and inverts") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + trial % 5;
        const HermitianMatrix a(random_pd(rng, m));
        const double al = u(rng), be = u(rng);
        const CMatrix lhs = frac_power(frac_power(a, al), be).matrix();
        const CMatrix rhs = frac_power(a, al * be).matrix();
        CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
        const CMatrix prod = frac_power(a, al).matrix() * frac_power(a, -al).matrix();
        CHECK((prod - CMatrix::Identity(m, m)).norm() <= 1e-10);
    }
}

TEST_CASE("frac_power does not depend on eigenpair ordering") {
    std::mt19937_64 rng(5);
    for (int m = 2; m <= 6; ++m) {
        const HermitianMatrix a(random_pd(rng, m));
        auto dec = eig_decompose(a);
        const CMatrix base = frac_power(dec, 0.37).matrix();
        EigenDecomposition rev;
        rev.eigenvalues = dec.eigenvalues.reverse();
        rev.eigenvectors = dec.eigenvectors.rowwise().reverse();
        CHECK((frac_power(rev, 0.37).matrix() - base).norm() <= 1e-10);
    }
}

TEST_CASE("op_norm examples and submultiplicativity") {
    CHECK(op_norm(CMatrix::Identity(4, 4)) == doctest::Approx(1.0));
    CHECK(op_norm(mat2(2, 0, 0, 3)) == doctest::Approx(3.0));
    // singular values of [[0,1],[0,0]] from the eigenvalues of A*A = diag(0,1)
    CHECK(op_norm(mat2(0, 1, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));

    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 8;
        CMatrix a(m, m), b(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                a(i, j) = cplx(g(rng), g(rng));
                b(i, j) = cplx(g(rng), g(rng));
            }
        CHECK(op_norm(a * b) <= op_norm(a) * op_norm(b) * (1.0 + 1e-10));
        const CMatrix pd = random_pd(rng, m);
        CHECK(op_norm(pd) == doctest::Approx(eig_decompose(HermitianMatrix(pd)).eigenvalues(m - 1)).epsilon(1e-10));
    }
}
