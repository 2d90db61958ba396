#pragma once

#include <complex>

#include <Eigen/Dense>

namespace mwhardy {

using cplx = std::complex<double>;

/// Largest supported matrix dimension m.
inline constexpr int kMaxDim = 8;

/// Small dense complex matrix with inline storage (no heap traffic in inner loops).
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Absolute tolerance on conjugate symmetry accepted at construction.
inline constexpr double kHermitianTol = 1e-12;

/// Conjugate-symmetric m x m matrix, m in [1, kMaxDim].
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    /// Validates conjugate symmetry (throws InvariantError) and symmetrizes
    /// away the sub-tolerance residue.
    explicit HermitianMatrix(const CMatrix& entries);

    static HermitianMatrix identity(int m);
    static HermitianMatrix diagonal(const RVector& d);

    int dim() const { return static_cast<int>(data_.rows()); }
    const CMatrix& matrix() const { return data_; }
    operator const CMatrix&() const { return data_; }

private:
    CMatrix data_;
};

struct EigenDecomposition {
    RVector eigenvalues;  // ascending
    CMatrix eigenvectors; // columns, unitary
};

EigenDecomposition eig_decompose(const HermitianMatrix& a);

/// A^alpha = U diag(lambda^alpha) U*. Throws SingularWeightError when an
/// eigenvalue is below 1e-13 * ||A||.
HermitianMatrix frac_power(const HermitianMatrix& a, double alpha);

/// Same power built from an explicit decomposition (any ordering of the pairs).
HermitianMatrix frac_power(const EigenDecomposition& decomposition, double alpha);

/// Largest singular value.
double op_norm(const CMatrix& a);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const HermitianMatrix& a);

bool is_positive_definite(const HermitianMatrix& a);

} // namespace mwhardy
