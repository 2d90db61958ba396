#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mwhardy/czd.hpp"

namespace mwhardy {

enum class AtomFlavor { W, A };

const char* to_string(AtomFlavor f);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct AtomValidation {
    bool support_ok = false;
    bool size_ok = false;
    bool moments_ok = false;
    double size = 0.0;       // measured size functional
    double size_bound = 0.0; // |Q|^{1/q} (W) or |Q|^{1/q - 1/p} (A)
    double margin = 0.0;     // size_bound / size, infinite for the zero field
    double moment_residual = 0.0;
    std::size_t outside_samples = 0;

    bool valid() const { return support_ok && size_ok && moments_ok; }
};

struct Atom {
    LocalField field;
    Cube cube;
    double p = 1.0, q = kInfinity;
    int s = 0;
    AtomFlavor flavor = AtomFlavor::A;
    AtomValidation validation;
};

/// Size functional of `a` on Q and the bound it must meet. |Q| is the
/// measure of the grid samples of Q. `a_q` is A_Q for the A flavor.
struct AtomSize {
    double size = 0.0;
    double bound = 0.0;
};
AtomSize atom_size(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, AtomFlavor flavor,
                   const HermitianMatrix* a_q = nullptr);

/// max over |gamma| <= s of |int x^gamma a| / (||a||_1 (l + |c|)^|gamma|); 0 for a = 0.
double moment_residual(const LocalField& a, const Grid& g, const Cube& q_cube, int s);

/// Support, size and moment conditions. Size passes up to a relative 1e-12.
AtomValidation validate_atom(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, int s,
                             AtomFlavor flavor, ReducingStrategy strategy = ReducingStrategy::Auto,
                             double moment_tol = 1e-6);
/// Same with a precomputed A_Q.
AtomValidation validate_atom(const LocalField& a, const Cube& q_cube, const WeightSamples& ws, double q, int s,
                             AtomFlavor flavor, const HermitianMatrix& a_q, double moment_tol = 1e-6);

/// Rescales a moment-correct field so the size bound holds with equality.
/// Returns the atom and the multiplier applied.
std::pair<Atom, double> normalize_to_atom(const LocalField& field, const Cube& q_cube, const WeightSamples& ws,
                                          double q, int s, AtomFlavor flavor,
                                          ReducingStrategy strategy = ReducingStrategy::Auto, double moment_tol = 1e-6);

struct AtomHardyBound {
    double value = 0.0;
    bool hypothesis_met = true; // q > max{1, r p / (r - 1)}
};
/// || M_W(a, psi) ||_{L^p}. `r_w` is a reverse Holder exponent estimate (> 1).
AtomHardyBound atom_hardy_bound(const Atom& atom, const TestFunction& psi, const WeightSamples& ws, double r_w = kInfinity);

/// A smooth atom on a random cube inside the domain: a window times a random
/// trigonometric field minus its weighted polynomial fit, normalized to the bound.
Atom random_atom(const WeightSamples& ws, int s, AtomFlavor flavor, std::uint64_t seed, double min_edge = 0.125,
                 double max_edge = 0.5);

struct AtomicOptions {
    int s = 0;
    int levels = 16;  // alpha_j = alpha_0 2^j for -levels <= j <= 0, fewer when the ladder is cut
    double q = kInfinity;
    int N = 1;
    int dictionary_size = 12;
    ReducingStrategy strategy = ReducingStrategy::Auto;
    bool validate = true;
};

struct LadderAtom {
    int j = 0;
    std::size_t k = 0;
    double lambda = 0.0;
    double c0 = 0.0; // edge of the atom cube over l(Q_{j,k})
    double moment_residual = 0.0;
    Atom atom;
};

struct AtomicDecomposition {
    int m = 1;
    double p = 1.0;
    int s = 0;
    double alpha0 = 0.0;             // largest proxy value; level j is alpha0 2^j
    std::vector<double> alphas;      // index 0 is the deepest level used, last is j = 0
    int levels_used = 0;
    bool ladder_cut = false;         // stopped early by the domain or the scale range
    std::vector<LadderAtom> atoms;
    double c = 0.0;                  // normalizing constant in lambda = c alpha_j |Q_{j,k}|^{1/p}
    std::vector<double> c_per_level; // before taking the max
    std::optional<Atom> tail;
    double tail_lambda = 0.0;
    bool tail_is_atom = false;
    double identity_residual = 0.0;  // max_j |sum_k A_{j,k} - (g_{j+1} - g_j)| / max|f|
    double coefficient_sum = 0.0;    // sum |lambda|^p over ladder atoms
    double hardy_proxy = 0.0;        // int proxy^p
    double tail_residual = 0.0;      // max|g_{j_lo}| / max|f|
    bool truncation_warning = false;
    bool all_valid = true;

    double ratio() const { return hardy_proxy > 0.0 ? coefficient_sum / hardy_proxy : 0.0; }
    /// (sum |lambda|^p + |tail lambda|^p)^{1/p}
    double coefficient_norm() const;
};

AtomicDecomposition atomic_decompose(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family,
                                     const AtomicOptions& options = {});

struct ReconstructionReport {
    /// residual[w][i]: |<f, phi_i> - sum lambda <a, phi_i>| over the levels
    /// -w..-1, divided by ||f||_1 sup|phi_i|. w runs 1..levels used.
    std::vector<std::vector<double>> residual;
    std::vector<double> worst; // max over profiles per window
};

ReconstructionReport reconstruct(const AtomicDecomposition& d, const VectorField& f,
                                 const std::vector<TestFunction>& profiles, bool include_tail = false);

/// Default pairing panel: bump dilates and translates.
std::vector<TestFunction> pairing_profiles(int n);

/// Upper bound for the finite atomic quasi-norm: coefficient norm of the
/// constructive decomposition, ladder plus tail atom.
double finite_atomic_norm_upper(const VectorField& f, const WeightSamples& ws, const ReducingFamily& family,
                                const AtomicOptions& options = {});

} // namespace mwhardy
