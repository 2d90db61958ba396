#pragma once

#include <vector>

#include "mwhardy/grid.hpp"

namespace mwhardy {

/// Built-in test functions f(x) = profile(x) v with v in C^m (all ones when empty).
struct FunctionSpec {
    enum class Profile { Zero, Bump, Hat, Gaussian, Indicator, Haar };
    Profile profile = Profile::Bump;
    Point center{};
    double radius = 0.25; // bump / hat inner radius, gaussian sigma, indicator and haar edge
    double height = 1.0;
    std::vector<cplx> vector;
};

/// Bump: height at the center, support radius. Hat: unit-mass bump at
/// radius r minus unit-mass bump at 2r (mean zero), times height. Haar: +1 / -1
/// on the halves of the cube split across the first axis.
VectorField make_function(const Grid& g, int m, const FunctionSpec& spec);

} // namespace mwhardy
