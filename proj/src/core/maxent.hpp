#pragma once

// Discrete maximum-relative-entropy solver on a bounded uniform grid.
//
// With a uniform prior and mean/variance constraints the maximizer has the
// exponential-family form p_i ~ exp(alpha x_i + beta x_i^2); the two Lagrange
// multipliers are found by damped Newton iteration on the dual.

#include <vector>

#include "core/errors.hpp"

namespace igchaos::maxent {

struct GridSpec {
    double lo = -10.0;
    double hi = 10.0;
    int nodes = 2001;

    void validate() const;
    std::vector<double> abscissae() const;
    double spacing() const { return (hi - lo) / (nodes - 1); }
};

struct DiscreteDistribution {
    std::vector<double> grid;
    std::vector<double> weights;

    /// Throws DomainError on negative weights, bad normalization or a
    /// non-uniform grid.
    void validate() const;
};

struct MomentConstraints {
    double mean = 0.0;
    double stddev = 1.0;
};

struct SolveOptions {
    double tolerance = 1e-10;
    int max_iterations = 100;
};

struct MaxEntSolution {
    DiscreteDistribution distribution;
    double alpha = 0.0;  // multiplier of x
    double beta = 0.0;   // multiplier of x^2, negative at the solution
    int iterations = 0;
    std::vector<double> residual_history;  // max-norm moment residual per iterate
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, double last_residual)
        : NumericalError(what), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

DiscreteDistribution uniform_distribution(const GridSpec& grid);

/// -sum p_i log(p_i / m_i) with 0 log 0 = 0.
double relative_entropy(const DiscreteDistribution& p, const DiscreteDistribution& m);

MaxEntSolution maxent_solve(const GridSpec& grid, const MomentConstraints& constraints,
                            const SolveOptions& options = {});

/// Gaussian density evaluated on the grid nodes and renormalized to unit mass.
std::vector<double> gaussian_reference(const std::vector<double>& grid, const MomentConstraints& c);

struct Moments {
    double mean;
    double variance;
};
Moments discrete_moments(const DiscreteDistribution& p);

}  // namespace igchaos::maxent
