#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mwhardy/grid.hpp"
#include "mwhardy/weights.hpp"

namespace mwhardy {

/// Real profile on R^n supported in the closed unit ball.
class TestFunction {
public:
    using Profile = std::function<double(const Point&)>;

    TestFunction() = default;
    /// The integral is computed once by fine midpoint quadrature.
    TestFunction(int n, std::string name, Profile profile);

    /// exp(-1/(1-|x|^2)) on B(0,1), divided by its integral.
    static TestFunction bump(int n);

    int n() const { return n_; }
    const std::string& name() const { return name_; }
    double integral() const { return integral_; }
    double operator()(const Point& x) const { return profile_(x); }

    /// ||phi||_{S_N} for N = 0..n_max: sup over |alpha| <= N + 1 of
    /// (1 + |x|)^{N+n+1} |d^alpha phi(x)|, derivatives by finite differences.
    /// Exactly nondecreasing in N.
    std::vector<double> seminorms(int n_max) const;
    double seminorm(int N) const { return seminorms(N).back(); }

private:
    int n_ = 1;
    std::string name_;
    Profile profile_;
    double integral_ = 0.0;
};

/// Finite stand-in for S_N: raw members with their S_N seminorms. Member k
/// enters maximal functions as members[k] / seminorms[k].
struct SchwartzDictionary {
    int N = 0;
    std::vector<TestFunction> members;
    std::vector<double> seminorms;

    /// Bump, its dilates by 1/2 and 1/4, translates inside B(0,1) and
    /// first-moment bumps, truncated or padded to `size` members. A given
    /// `leading` profile replaces the bump in front.
    static SchwartzDictionary standard(int n, int N, std::size_t size = 12, const TestFunction* leading = nullptr);
    static SchwartzDictionary from(std::vector<TestFunction> members, int N);
};

/// floor(n/p + (d_lower + 2 d_upper)/p) + 1.
int grand_parameter(int n, double p, double d_lower, double d_upper);

/// psi_t * f at every grid sample; t >= 2h (ResolutionError otherwise).
VectorField convolve_scale(const VectorField& f, const TestFunction& psi, double t);

/// psi_t * f for each scale of a common scale set.
struct ConvolutionStack {
    std::vector<double> scales;
    std::vector<VectorField> levels;
};

ConvolutionStack convolve_stack(const VectorField& f, const TestFunction& psi, const std::vector<double>& scales);

/// Matrix applied at the evaluation point x: none, W^{1/p}(x), or A_t(x).
class WeightMode {
public:
    static WeightMode unweighted(int m);
    static WeightMode pointwise(const WeightSamples& ws);
    static WeightMode reducing(const ReducingFamily& family);

    int m() const { return m_; }
    bool is_reducing() const { return family_ != nullptr; }
    std::string name() const;

    /// Per-scale handle resolved against a scale set.
    struct Bound {
        const WeightMode* mode;
        std::size_t slot;
        /// Column-major m x m matrix, nullptr for the identity.
        const cplx* matrix(std::size_t x) const;
    };
    Bound bind(double t) const;

private:
    int m_ = 1;
    const WeightSamples* samples_ = nullptr;
    const ReducingFamily* family_ = nullptr;
};

/// sup_t |M(x) psi_t*f(x)|.
ScalarField radial_maximal(const ConvolutionStack& s, const WeightMode& mode);
/// sup_t sup_{|x-y| < a t} |M(x) psi_t*f(y)| over grid samples y.
ScalarField nontangential_maximal(const ConvolutionStack& s, const WeightMode& mode, double a);
/// sup_t max over Q in Q_{bt} meeting B(x, at) of min_{y in Q} |M(x) psi_t*f(y)|.
/// Q meets the ball when it holds a grid sample of the ball. Needs bt/h and
/// L/h integral at every scale (AlignmentError otherwise).
ScalarField nontangential_infimum_maximal(const ConvolutionStack& s, const WeightMode& mode, double a, double b);
/// sup_t sup_y |M(x) psi_t*f(x-y)| (1 + |y|/t)^{-l}.
ScalarField peetre_maximal(const ConvolutionStack& s, const WeightMode& mode, double l);

enum class GrandVariant { Radial, Nontangential, Peetre };

/// max_k variant(member_k) / seminorm_k; a lower bound for the sup over S_N.
/// `param` is the aperture a or the exponent l.
ScalarField grand_maximal(const std::vector<ConvolutionStack>& member_stacks, const SchwartzDictionary& dict,
                          GrandVariant variant, double param, const WeightMode& mode);
ScalarField grand_maximal(const VectorField& f, const SchwartzDictionary& dict, GrandVariant variant, double param,
                          const WeightMode& mode);

/// (sum g^p h^n)^{1/p}.
double lp_quasinorm(const ScalarField& g, double p);
/// (sum |W^{1/p} f|^p h^n)^{1/p}.
double weighted_lp_norm(const VectorField& f, const WeightSamples& ws);
/// || M_W(f, psi) ||_{L^p} over dyadic_scales(grid).
double hardy_quasinorm(const VectorField& f, const TestFunction& psi, const WeightSamples& ws);

struct MaximalConfig {
    double a = 1.0;
    double b = 0.25;
    double l = 2.0;
    int N = 1;
    std::size_t dictionary_size = 12;
};

struct ChainViolation {
    std::string inequality;
    std::size_t sample = 0;
    double lhs = 0.0, rhs = 0.0;
};

struct ChainReport {
    std::size_t comparisons = 0;
    std::vector<ChainViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Pointwise chain on one shared lattice:
///   radial <= nontangential, nontangential (1+a)^{-l} <= Peetre,
///   infimum <= nontangential, single / ||psi||_{S_N} <= grand (each variant),
///   grand at N + 1 <= grand at N.
ChainReport chain_check(const VectorField& f, const TestFunction& psi, const MaximalConfig& config,
                        const WeightMode& mode);

} // namespace mwhardy
