#include "core/fit.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace igchaos {

LinearFit slope_fit(std::span<const double> tau, std::span<const double> value, Window window) {
    if (tau.size() != value.size())
        throw DomainError("slope_fit needs equally long tau and value series");
    if (!(window.hi >= window.lo))
        throw DomainError("slope_fit window must satisfy lo <= hi");
    // two passes: means first, then centered sums
    double st = 0.0, sv = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < window.lo || tau[i] > window.hi)
            continue;
        st += tau[i];
        sv += value[i];
        ++n;
    }
    if (n < 3)
        throw DomainError("slope_fit needs at least 3 points in the window");
    const double mt = st / n;
    const double mv = sv / n;
    double stt = 0.0, stv = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < window.lo || tau[i] > window.hi)
            continue;
        const double dt = tau[i] - mt;
        const double dv = value[i] - mv;
        stt += dt * dt;
        stv += dt * dv;
        svv += dv * dv;
    }
    if (!(stt > 0.0))
        throw DomainError("slope_fit window is degenerate: all tau equal");
    LinearFit fit;
    fit.slope = stv / stt;
    fit.intercept = mv - fit.slope * mt;
    fit.r_squared = svv > 0.0 ? (stv * stv) / (stt * svv) : 1.0;
    fit.points = n;
    return fit;
}

}  // namespace igchaos
