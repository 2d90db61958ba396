#include "mwhardy/library.hpp"

#include <cmath>

#include "mwhardy/error.hpp"
#include "mwhardy/maximal.hpp"

namespace mwhardy {

VectorField make_function(const Grid& g, int m, const FunctionSpec& spec) {
    if (!spec.vector.empty() && static_cast<int>(spec.vector.size()) != m)
        throw PreconditionError("function vector length differs from m");
    if (!(spec.radius > 0.0)) throw PreconditionError("function radius must be positive");
    const auto psi = TestFunction::bump(g.n);
    const double peak = psi({0.0, 0.0});
    const double r = spec.radius;
    VectorField f(g, m);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        const Point u{x[0] - spec.center[0], g.n == 2 ? x[1] - spec.center[1] : 0.0};
        double v = 0.0;
        switch (spec.profile) {
        case FunctionSpec::Profile::Zero: break;
        case FunctionSpec::Profile::Bump: v = psi({u[0] / r, u[1] / r}) / peak; break;
        case FunctionSpec::Profile::Hat:
            v = psi({u[0] / r, u[1] / r}) / std::pow(r, g.n) - psi({u[0] / (2 * r), u[1] / (2 * r)}) / std::pow(2 * r, g.n);
            break;
        case FunctionSpec::Profile::Gaussian: v = std::exp(-0.5 * (u[0] * u[0] + u[1] * u[1]) / (r * r)); break;
        case FunctionSpec::Profile::Indicator:
        case FunctionSpec::Profile::Haar: {
            const Cube q{g.n, spec.center, r};
            if (!q.contains(x)) break;
            v = spec.profile == FunctionSpec::Profile::Indicator ? 1.0 : (u[0] < 0.0 ? 1.0 : -1.0);
            break;
        }
        }
        v *= spec.height;
        for (int k = 0; k < m; ++k) f.at(i)(k) = spec.vector.empty() ? cplx(v) : v * spec.vector[k];
    }
    return f;
}

} // namespace mwhardy
