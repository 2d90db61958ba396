#pragma once

#include <string>
#include <vector>

#include "mwhardy/maximal.hpp"
#include "mwhardy/weights.hpp"

namespace mwhardy::oracle {

/// Classical scalar formulas on plain arrays, independent of the matrix code.
/// `w` holds one weight value per grid sample.

std::vector<double> sample_weight(const MatrixWeight& weight);

/// avg w (avg w^{-1/(p-1)})^{p-1}, or avg w / min w for p <= 1, over the cube's samples.
double ap(const Grid& g, const std::vector<double>& w, const Cube& q, double p);
/// avg w exp(-avg log w).
double ap_infty(const Grid& g, const std::vector<double>& w, const Cube& q);
/// (avg_Q w)^{1/p}.
double reducing_value(const Grid& g, const std::vector<double>& w, const Cube& q, double p);

/// psi_t * f by direct summation over all sample pairs.
std::vector<cplx> convolve(const Grid& g, const std::vector<cplx>& f, const TestFunction& psi, double t);

/// Per-scale weight factor at each sample: w^{1/p} or the reducing value of
/// the dyadic cube of edge t holding the sample; all ones when unweighted.
enum class Mode { None, Pointwise, Reducing };
std::vector<double> weight_factor(const Grid& g, const std::vector<double>& w, double p, Mode mode, double t);

std::vector<double> radial(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                           const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales);
std::vector<double> nontangential(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                                  const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double a);
std::vector<double> infimum(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                            const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double a,
                            double b);
std::vector<double> peetre(const Grid& g, const std::vector<double>& w, double p, Mode mode,
                           const std::vector<std::vector<cplx>>& conv, const std::vector<double>& scales, double l);

/// (sum |v|^p h^n)^{1/p}.
double lp(const Grid& g, const std::vector<double>& v, double p);

struct Comparison {
    std::string quantity;
    double toolkit = 0.0; // largest toolkit value involved
    double oracle = 0.0;
    double difference = 0.0; // max relative difference
    bool ok = false;
};

struct Config {
    double p = 1.0;
    double a = 1.0, b = 0.25, l = 2.0;
    int N = 1;
    std::size_t dictionary_size = 4;
    double min_edge = 0.125, max_edge = 0.5;
    double tol = 1e-8;
};

/// Every m = 1 quantity of the toolkit against its scalar counterpart:
/// characteristics, reducing values per strategy, reducing families, maximal
/// functions in both modes, grand maximal, Hardy and weighted norms.
/// Throws PreconditionError for m > 1.
std::vector<Comparison> compare(const MatrixWeight& weight, const VectorField& f, const Config& config);

} // namespace mwhardy::oracle
