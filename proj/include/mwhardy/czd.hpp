#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mwhardy/geometry.hpp"
#include "mwhardy/grid.hpp"
#include "mwhardy/maximal.hpp"
#include "mwhardy/weights.hpp"

namespace mwhardy {

/// Sparse C^m-valued field: values at a sorted list of samples.
struct LocalField {
    int m = 1;
    std::vector<std::size_t> samples;
    std::vector<cplx> values; // samples.size() * m

    VectorField to_field(const Grid& g) const;
    /// sum |v|_1 h^n
    double l1_norm(const Grid& g) const;
};

/// O = { proxy > alpha } on the grid.
struct LevelSet {
    Grid grid;
    double alpha = 0.0;
    std::vector<std::uint8_t> mask;

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool full() const { return count() == mask.size(); }
    /// O holds a sample on the outer ring of the domain, so the true set may extend beyond it.
    bool touches_boundary() const;
};

/// (M_N)_A proxy: grand radial maximal function of the dictionary in the given mode.
ScalarField grand_proxy(const VectorField& f, const SchwartzDictionary& dict, const WeightMode& mode);

LevelSet level_set(const ScalarField& proxy, double alpha);

/// Union of closed blocks of `block` x ... cells meeting O, in units of block*h.
/// Requires h a power of two and L/(block h) integral.
OpenSet mask_to_open_set(const LevelSet& level, int block);

struct PartitionOfUnity {
    Grid grid;
    std::vector<Cube> cubes;                // Q_k
    double a_tilde = 17.0 / 16.0;
    std::vector<LocalField> eta;            // m = 1, real values
    std::vector<double> mass;               // integral of eta_k
    std::vector<std::uint8_t> covered;      // samples in some closed Q_k
    // diagnostics
    double sum_error = 0.0;                 // max |sum eta_k - 1| over covered samples
    double mass_low = 0.0, mass_high = 0.0; // range of mass / |Q_k|
    double derivative_constant = 0.0;       // max |grid gradient eta_k| l(Q_k)

    Cube tilde(std::size_t k) const { return cubes[k].scaled(a_tilde); }
};

/// Smootherstep plateaus (1 on Q_k, 0 outside a_tilde Q_k) normalized by their sum.
PartitionOfUnity build_partition(const Grid& g, const std::vector<Cube>& cubes, double a_tilde = 17.0 / 16.0);

/// Orthonormal basis of polynomials of degree <= s in L^2(eta_k~ dx), in the
/// scaled variable u = (x - c_k) / l(Q_k).
struct PolynomialProjector {
    int n = 1;
    int s = 0;
    Cube cube;                                // Q_k
    std::vector<std::array<int, 2>> exponents; // monomial order, by total degree
    std::vector<std::size_t> samples;         // support of eta_k
    std::vector<double> weights;              // eta_k~ h^n at the samples
    Eigen::MatrixXd coefficients;             // row j: e_j in the monomial basis
    Eigen::MatrixXd values;                   // samples x M, e_j at the samples
    double orthogonality_error = 0.0;
    double gram_condition = 1.0;
    double sup_bound = 0.0;      // max |e_j| on the samples
    double gradient_bound = 0.0; // max |grad e_j| l(Q_k)

    std::size_t size() const { return exponents.size(); }
};

/// Throws DegenerateMeasureError when the monomial Gram matrix has condition above 1e10.
PolynomialProjector build_projector(const PartitionOfUnity& pu, std::size_t k, int s);

struct Projection {
    Eigen::MatrixXcd coefficients; // M x m: <f, e_j eta_k~>
    LocalField field;              // P_k f on the projector samples
};

Projection project_polynomial(const VectorField& f, const PolynomialProjector& proj);
/// Same with f given on the projector samples only.
Projection project_polynomial(const LocalField& f, const PolynomialProjector& proj);

struct CZOptions {
    int s = 0;
    double d_upper = 0.0;   // for the hypothesis check on s
    int dictionary_size = 12;
    int N = 1;
    ReducingStrategy strategy = ReducingStrategy::Auto;
    bool bad_energy = true;
};

struct CubeDiagnostics {
    Cube cube;
    double moment_residual = 0.0;  // max_gamma |<b_k, x^gamma>| / ((||b_k||_1 + 1e-8 ||f eta_k||_1) (l + |c|)^|gamma|)
    double good_bound = 0.0;       // max_{Q*} |A_{Q*} g_k| / alpha
    double bad_energy_ratio = 0.0; // int M_W(b_k)^p / int_{Q*} proxy^p
};

struct CZDecomposition {
    double alpha = 0.0;
    int s = 0;
    int block = 1;
    LevelSet level;
    PartitionOfUnity partition;
    std::vector<Cube> stars; // Q*_k = (9/8) Q_k
    VectorField g;
    std::vector<LocalField> b, gk;
    std::vector<CubeDiagnostics> cubes;
    double reconstruction_residual = 0.0; // max |f - g - sum b_k| / max |f|
    double moment_residual = 0.0;
    double good_constant = 0.0;
    double bad_energy_max = 0.0;
    bool hypothesis_met = true;     // s > floor(n(1/p - 1) + d_upper)
    bool domain_truncated = false;  // O reaches the domain boundary
};

/// Matrix-weighted CZ decomposition of f at level alpha against a precomputed proxy.
CZDecomposition cz_decompose(const VectorField& f, const WeightSamples& ws, const ScalarField& proxy, double alpha,
                             const CZOptions& options = {});
/// Builds the proxy from the reducing family first.
CZDecomposition cz_decompose(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family, double alpha,
                             const CZOptions& options = {});

} // namespace mwhardy
