#include "mwhardy/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mwhardy/error.hpp"

namespace mwhardy {

HermitianMatrix::HermitianMatrix(const CMatrix& entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 1 || entries.rows() > kMaxDim)
        throw InvariantError("hermitian: matrix must be square with 1 <= m <= 8");
    const int m = static_cast<int>(entries.rows());
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            if (std::abs(entries(i, j) - std::conj(entries(j, i))) > kHermitianTol)
                throw InvariantError("hermitian: entries (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") violate conjugate symmetry");
        }
    }
    data_ = (entries + entries.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::identity(int m) {
    return HermitianMatrix(CMatrix::Identity(m, m));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
    CMatrix a = CMatrix::Zero(d.size(), d.size());
    for (int i = 0; i < d.size(); ++i) a(i, i) = d(i);
    return HermitianMatrix(a);
}

namespace {

bool is_diagonal(const CMatrix& a) {
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            if (i != j && a(i, j) != cplx(0.0)) return false;
    return true;
}

void check_spectrum(const RVector& lambda) {
    double top = 0.0;
    for (int i = 0; i < lambda.size(); ++i) top = std::max(top, std::abs(lambda(i)));
    for (int i = 0; i < lambda.size(); ++i) {
        if (!(lambda(i) > 1e-13 * top))
            throw SingularWeightError("frac_power: eigenvalue " + std::to_string(lambda(i)) +
                                      " is not positive relative to norm " + std::to_string(top));
    }
}

} // namespace

EigenDecomposition eig_decompose(const HermitianMatrix& a) {
    const CMatrix& m = a.matrix();
    EigenDecomposition out;
    if (is_diagonal(m)) {
        // Sorted diagonal with the matching permutation as U keeps diagonal inputs exact.
        const int d = static_cast<int>(m.rows());
        std::vector<int> order(d);
        for (int i = 0; i < d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int x, int y) { return m(x, x).real() < m(y, y).real(); });
        out.eigenvalues.resize(d);
        out.eigenvectors = CMatrix::Zero(d, d);
        for (int k = 0; k < d; ++k) {
            out.eigenvalues(k) = m(order[k], order[k]).real();
            out.eigenvectors(order[k], k) = 1.0;
        }
        return out;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw ConstructionError("eig_decompose: eigensolver did not converge");
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    return out;
}

HermitianMatrix frac_power(const EigenDecomposition& dec, double alpha) {
    check_spectrum(dec.eigenvalues);
    const int d = static_cast<int>(dec.eigenvalues.size());
    CMatrix scaled = dec.eigenvectors;
    for (int k = 0; k < d; ++k) scaled.col(k) *= std::pow(dec.eigenvalues(k), alpha);
    return HermitianMatrix(CMatrix(scaled * dec.eigenvectors.adjoint()));
}

HermitianMatrix frac_power(const HermitianMatrix& a, double alpha) {
    const CMatrix& m = a.matrix();
    if (is_diagonal(m)) {
        RVector d(m.rows());
        for (int i = 0; i < m.rows(); ++i) d(i) = m(i, i).real();
        check_spectrum(d);
        for (int i = 0; i < d.size(); ++i) d(i) = alpha == 1.0 ? d(i) : std::pow(d(i), alpha);
        return HermitianMatrix::diagonal(d);
    }
    return frac_power(eig_decompose(a), alpha);
}

double op_norm(const CMatrix& a) {
    if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
    if (a.rows() == 2 && a.cols() == 2) {
        // Largest eigenvalue of the 2x2 Gram matrix A*A in closed form.
        const double p = std::norm(a(0, 0)) + std::norm(a(1, 0));
        const double q = std::norm(a(0, 1)) + std::norm(a(1, 1));
        const cplx r = std::conj(a(0, 0)) * a(0, 1) + std::conj(a(1, 0)) * a(1, 1);
        const double disc = std::sqrt((p - q) * (p - q) + 4.0 * std::norm(r));
        return std::sqrt(std::max(0.0, 0.5 * (p + q + disc)));
    }
    const CMatrix gram = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double min_eigenvalue(const HermitianMatrix& a) {
    return eig_decompose(a).eigenvalues(0);
}

bool is_positive_definite(const HermitianMatrix& a) {
    const RVector lambda = eig_decompose(a).eigenvalues;
    return lambda(0) > 0.0;
}

} // namespace mwhardy
