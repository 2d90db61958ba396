#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mwhardy/grid.hpp"
#include "mwhardy/hermitian.hpp"

namespace mwhardy {

enum class ThetaProfile { Constant, Linear, Angular };

/// Field of Hermitian positive-definite matrices over [-L, L]^n with an
/// analytic sampler. `power_at(x, beta)` returns W(x)^beta, using closed forms
/// where the family has them.
class MatrixWeight {
public:
    using PowerFn = std::function<HermitianMatrix(const Point&, double)>;

    MatrixWeight(Grid grid, int m, std::string family, PowerFn power, bool analytic = true);

    static MatrixWeight identity(const Grid& g, int m);
    static MatrixWeight constant(const Grid& g, const HermitianMatrix& value);
    /// w(x) = |x|^alpha (m = 1).
    static MatrixWeight scalar_power(const Grid& g, double alpha);
    /// R(theta(x)) diag(|x|^alpha1, |x|^alpha2) R(theta(x))^T.
    static MatrixWeight rotating(const Grid& g, double alpha1, double alpha2, ThetaProfile profile, double theta0 = 0.0);
    /// `inside` on the closed box, `outside` elsewhere.
    static MatrixWeight step(const Grid& g, const Cube& box, const HermitianMatrix& inside, const HermitianMatrix& outside);
    /// A0 + sum_i x_i A_i; must stay positive definite on the domain.
    static MatrixWeight affine(const Grid& g, const HermitianMatrix& a0, const std::vector<HermitianMatrix>& slopes);
    /// Tabulated values, one per grid sample; off-grid points use the containing cell.
    static MatrixWeight user_grid(const Grid& g, const MatrixField& samples);

    const Grid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    int m() const { return m_; }
    const std::string& family() const { return family_; }
    bool is_identity() const { return family_ == "identity"; }
    bool analytic() const { return analytic_; }

    HermitianMatrix at(const Point& x) const { return power_(x, 1.0); }
    HermitianMatrix power_at(const Point& x, double beta) const { return power_(x, beta); }
    /// W^beta at every grid sample.
    MatrixField power_field(double beta) const;
    /// Same analytic weight sampled on another grid.
    MatrixWeight on_grid(const Grid& g) const;
    /// Smallest eigenvalue over all samples (throws SingularWeightError when not positive).
    double validate() const;

private:
    Grid grid_;
    int m_;
    std::string family_;
    PowerFn power_;
    bool analytic_;
};

/// A weight sampled for a fixed exponent p: W, W^{1/p} and W^{-1/p} per sample.
struct WeightSamples {
    MatrixWeight weight;
    double p;
    MatrixField w, root, inv_root;

    WeightSamples(const MatrixWeight& weight, double p);
    const Grid& grid() const { return weight.grid(); }
    int m() const { return weight.m(); }
};

// ---------------------------------------------------------------------------
// Reducing operators

enum class ReducingStrategy { Auto, ExactScalar, ExactP2, DirectionFit };

const char* to_string(ReducingStrategy s);
ReducingStrategy reducing_strategy_from_string(const std::string& s);

struct ReducingOperator {
    HermitianMatrix a;
    double c_low = 1.0;
    double c_high = 1.0;
    ReducingStrategy strategy = ReducingStrategy::Auto;
};

/// rho_E(z) = (avg_E |W^{1/p} z|^p)^{1/p}.
double reducing_rho(const WeightSamples& ws, const std::vector<std::size_t>& cells, const CVector& z);

/// Unit directions of C^m from a Halton sequence pushed through Box-Muller.
std::vector<CVector> sphere_directions(int m, std::size_t count, std::uint64_t offset);

/// A_E for the cube E (samples with centers in E). Direction-fit uses
/// K = 64 m^2 directions and validates on a fresh batch of the same size.
ReducingOperator reducing_operator(const WeightSamples& ws, const Cube& e, ReducingStrategy strategy,
                                   std::uint64_t seed = 0, bool validate = true);

/// ||A M|| / (avg_E ||W^{1/p} M||^p)^{1/p}.
double reducing_matrix_equivalence(const WeightSamples& ws, const HermitianMatrix& a, const Cube& e, const CMatrix& mat);

/// Reducing operators A_Q for every Q in Q_t at each of the given scales.
struct ReducingFamily {
    Grid grid;
    int m = 1;
    double p = 1.0;
    ReducingStrategy strategy = ReducingStrategy::Auto;
    std::vector<double> scales;
    std::vector<DyadicGrid> dyadic;
    std::vector<std::vector<ReducingOperator>> ops;           // [scale][cube]
    std::vector<std::vector<std::uint32_t>> owner;            // [scale][sample] -> cube
    double c_low = 1.0, c_high = 1.0;

    const HermitianMatrix& at(std::size_t scale, std::size_t sample) const {
        return ops[scale][owner[scale][sample]].a;
    }
    std::size_t scale_index(double t) const;
    /// A_Q = I for every cube.
    static ReducingFamily identity(const Grid& g, int m, const std::vector<double>& scales);
};

ReducingFamily build_reducing_family(const WeightSamples& ws, const std::vector<double>& scales,
                                     ReducingStrategy strategy = ReducingStrategy::Auto, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Muckenhoupt characteristics

struct CubeFamily {
    std::vector<Cube> cubes;
    std::string description;
};

/// Cubes inside the domain with edges h 2^k in [min_edge, max_edge]; corners
/// on multiples of the edge, or on every grid line when `all_offsets`.
CubeFamily grid_cube_family(const Grid& g, double min_edge, double max_edge, bool all_offsets = false);

struct CubeValue {
    Cube cube;
    double value = 0.0;
};

inline constexpr double kInfiniteCharacteristic = 1e6;

struct CharacteristicReport {
    double p = 1.0;
    std::string family;
    double value = 0.0;
    bool infinite = false;
    std::vector<CubeValue> per_cube;
    std::vector<CubeValue> worst; // largest contributors, descending
};

CharacteristicReport ap_characteristic(const WeightSamples& ws, const CubeFamily& cubes);
CharacteristicReport ap_infty_characteristic(const WeightSamples& ws, const CubeFamily& cubes);

struct DimensionEstimate {
    double d_lower = 0.0, d_upper = 0.0;         // max(0, slope)
    double slope_lower = 0.0, slope_upper = 0.0; // raw fits
    double residual_lower = 0.0, residual_upper = 0.0;
    std::vector<double> lambdas;
    std::vector<double> lower_values, upper_values;
};

/// Log-log fits of the dilated log-averages over lambda in `lambdas` whose
/// dilates of every base cube stay inside the domain; needs at least four.
DimensionEstimate dimension_estimates(const WeightSamples& ws, const CubeFamily& base,
                                      const std::vector<double>& lambdas = {1.0, 2.0, 4.0, 8.0, 16.0});

struct ReverseHolderEstimate {
    double r = 1.0;      // largest passing grid value (1 when none passes)
    bool capped = false; // every grid value passed
    std::vector<double> r_grid;
    std::vector<double> values;
};

ReverseHolderEstimate reverse_holder_exponent(const WeightSamples& ws, const CubeFamily& cubes,
                                              const std::vector<double>& r_grid, double threshold,
                                              ReducingStrategy strategy = ReducingStrategy::Auto);

/// gamma_t(x) = ||W^{1/p}(x) A_Q^{-1}|| for the Q in Q_t containing x.
ScalarField gamma_field(const WeightSamples& ws, const ReducingFamily& family, std::size_t scale);

/// E_t f: per-cube mean over Q_t. Throws AlignmentError unless t/h and L/h are integers.
ScalarField dyadic_average(const ScalarField& f, double t);

struct DoublingResult {
    double constant = 0.0;
    Cube q, r; // maximizing pair
    std::size_t pairs = 0;
};

/// Smallest C with ||A_Q A_R^{-1}|| <= C max{(l_R/l_Q)^b1, (l_Q/l_R)^b2} (1 + |c_Q - c_R| / max l)^omega.
DoublingResult doubling_order_check(const std::vector<std::pair<Cube, HermitianMatrix>>& family, double beta1,
                                    double beta2, double omega);

/// Scalar fields f_j (or omega_j) for consecutive levels j_lo, j_lo + 1, ...
struct LevelSequence {
    int j_lo = 0;
    std::vector<ScalarField> levels;
    int j_hi() const { return j_lo + static_cast<int>(levels.size()) - 1; }
};

/// ||omega||_K over the dyadic cubes that fit in the domain.
double k_norm(const LevelSequence& omega, double p);

struct SupEstimate {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 1.0; // lhs / ||sup |f_j| ||_{L^p(P)}
    double bound = 1.0; // 2^{n/p} max{1, 2^{-kn/p}}
    double omega_norm = 0.0;
};

SupEstimate dyadic_sup_estimate(const LevelSequence& omega, const LevelSequence& f, int k, const DyadicCube& cube,
                                double p);

} // namespace mwhardy
