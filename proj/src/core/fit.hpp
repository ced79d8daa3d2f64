#pragma once

#include <span>

namespace igchaos {

struct Window {
    double lo;
    double hi;
};

struct LinearFit {
    double slope;
    double intercept;
    double r_squared;
    int points;
};

/// Ordinary least squares of value against tau over samples with tau in [lo, hi].
LinearFit slope_fit(std::span<const double> tau, std::span<const double> value, Window window);

}  // namespace igchaos
