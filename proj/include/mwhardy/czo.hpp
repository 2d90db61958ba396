#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mwhardy/atoms.hpp"

namespace mwhardy {

/// One monomial coef * u^powers of the numerator, u = x - y.
struct KernelTerm {
    double coef = 0.0;
    std::array<int, 2> powers{};
};

/// Convolution-type kernel K(x, y) = k(x - y) with
/// k(u) = (sum_i coef_i u^powers_i) / |u|^radial_power, acting componentwise on C^m.
class Kernel {
public:
    static Kernel rational(int n, std::string name, std::vector<KernelTerm> terms, double radial_power, int order = 2,
                           double delta = 1.0);
    /// 1 / (pi (x - y)).
    static Kernel hilbert();
    /// First Riesz kernel (x_1 - y_1) / (2 pi |x - y|^3).
    static Kernel riesz2d();
    /// Control case T = Id, not a kernel: truncated_apply returns its input.
    static Kernel identity(int n);

    int n() const { return n_; }
    int order() const { return order_; }
    double delta() const { return delta_; }
    const std::string& name() const { return name_; }
    bool is_identity() const { return identity_; }
    const std::vector<KernelTerm>& terms() const { return terms_; }
    double radial_power() const { return radial_power_; }

    double at_offset(const Point& u) const;
    double operator()(const Point& x, const Point& y) const { return at_offset({x[0] - y[0], x[1] - y[1]}); }

private:
    int n_ = 1;
    std::string name_;
    std::vector<KernelTerm> terms_;
    double radial_power_ = 0.0;
    int order_ = 0;
    double delta_ = 1.0;
    bool identity_ = false;
};

struct KernelReport {
    double c_k = 0.0;                      // smallest constant meeting every sampled condition
    bool finite = false;                   // no condition grows across the sampled distance bands
    std::vector<double> size_constant;     // per order |gamma|, both variables
    std::vector<double> regularity_constant;
    std::vector<std::string> failures;
    std::size_t samples = 0;
};

/// Samples the size and regularity conditions for |gamma| <= order in both
/// variables, |x - y| log-uniform over [1e-3, 1e3]. Derivatives are central
/// differences. A condition fails when its largest ratio in the outer or
/// inner distance decade exceeds 10 times the largest in the middle decades.
KernelReport kernel_validate(const Kernel& k, std::size_t budget = 2000, std::uint64_t seed = 0);

/// T_eta f(x) = sum over |x - y| >= eta of K(x, y) f(y) h^n. Needs eta >= 2h.
VectorField truncated_apply(const Kernel& k, double eta, const VectorField& f);

/// Principal value from the ladder (eta, eta/2) by Richardson extrapolation
/// in eta - h, the truncation radius the symmetric stencil actually removes.
/// Needs eta >= 4h.
VectorField principal_value_apply(const Kernel& k, double eta, const VectorField& f);

/// T a(x) at an arbitrary point by direct quadrature over the samples of a.
CVector apply_at(const Kernel& k, const Grid& g, const LocalField& a, const Point& x);

/// Gauss-Legendre integral of g over the square annulus
/// {r_in < |x - c|_inf <= r_out} (an interval pair for n = 1).
double annulus_integral(int n, const Point& c, double r_in, double r_out, const std::function<double(const Point&)>& g,
                        int panels = 4, int nodes = 8);

struct MomentEntry {
    std::size_t atom = 0;
    std::array<int, 2> gamma{};
    std::vector<double> etas;
    std::vector<double> domain_values; // int over [-L, L]^n of T_eta(a) x^gamma, real part
    double domain_limit = 0.0;         // Richardson limit eta -> 0
    double far_field = 0.0;            // same integrand over the complement of the domain
    double tail_estimate = 0.0;        // C_K ||a||_1 r^{s+1} bound on the far-field part
    double residual = 0.0;             // |domain_limit + far_field| / (||a||_1 (l + |c|)^|gamma|)
};

struct MomentReport {
    std::vector<MomentEntry> entries;
    double worst = 0.0;
    bool ok(double tol = 1e-3) const { return worst < tol; }
};

/// T*(x^gamma) for |gamma| <= s on each atom, component 0 and the componentwise
/// maximum over the others. `c_k` feeds the tail estimate.
MomentReport vanishing_moment_check(const Kernel& k, const std::vector<Atom>& atoms, const Grid& g, int s,
                                    double c_k = 1.0 / 3.141592653589793);

struct AtomOperatorBound {
    double lp_bound = 0.0;            // ||T a||_{L^p_W}: near region plus annuli
    double hardy_bound = 0.0;         // hardy_quasinorm of T a on the grid
    double near = 0.0;                // int over 2 sqrt(n) Q, p-th power
    std::vector<double> annuli;       // p-th power per annulus 2^{i+1} sqrt(n) Q \ 2^i sqrt(n) Q
    double tail_fraction = 0.0;       // annuli beyond the eighth over the total
    double decay_rate = 0.0;          // geometric mean ratio of consecutive annuli
    bool hypothesis_met = true;       // s >= floor(n (1/p - 1))
};

struct BoundednessOptions {
    double eta = 0.0; // ladder base for principal_value_apply, 0 selects 4h
    int annuli = 12;
    bool hardy = true;
};

struct BoundednessReport {
    std::vector<AtomOperatorBound> per_atom;
    double max_lp = 0.0;
    double max_hardy = 0.0;
    bool finite() const;
};

/// Mean-zero atoms only (PreconditionError otherwise).
BoundednessReport boundedness_harness(const Kernel& k, const std::vector<Atom>& atoms, const WeightSamples& ws,
                                      const TestFunction& psi, const BoundednessOptions& options = {});

} // namespace mwhardy
