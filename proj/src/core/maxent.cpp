#include "core/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace igchaos::maxent {

void GridSpec::validate() const {
    if (nodes < 3)
        throw DomainError("grid needs at least 3 nodes");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("grid needs finite bounds with hi > lo");
}

std::vector<double> GridSpec::abscissae() const {
    validate();
    std::vector<double> x(static_cast<std::size_t>(nodes));
    const double h = spacing();
    for (int i = 0; i < nodes; ++i)
        x[i] = lo + h * i;
    x.back() = hi;
    return x;
}

void DiscreteDistribution::validate() const {
    if (grid.size() < 2 || grid.size() != weights.size())
        throw DomainError("distribution needs matching grid and weights of size >= 2");
    const double h = grid[1] - grid[0];
    if (!(h > 0.0))
        throw DomainError("grid must be strictly increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = grid[i] - grid[i - 1];
        if (!(d > 0.0) || std::abs(d - h) > 1e-9 * h)
            throw DomainError("grid must have uniform spacing");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw DomainError("weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("weights must sum to 1, got " + std::to_string(total));
}

DiscreteDistribution uniform_distribution(const GridSpec& grid) {
    auto x = grid.abscissae();
    std::vector<double> w(x.size(), 1.0 / static_cast<double>(x.size()));
    return {std::move(x), std::move(w)};
}

double relative_entropy(const DiscreteDistribution& p, const DiscreteDistribution& m) {
    if (p.grid.size() != m.grid.size() || p.weights.size() != p.grid.size() ||
        m.weights.size() != m.grid.size())
        throw DomainError("relative entropy needs identical grids");
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        if (std::abs(p.grid[i] - m.grid[i]) > 1e-12 * std::max(1.0, std::abs(p.grid[i])))
            throw DomainError("relative entropy needs identical grids");
    double s = 0.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        const double pi = p.weights[i];
        if (pi == 0.0)
            continue;
        if (!(m.weights[i] > 0.0))
            throw DomainError("prior vanishes where p is positive (node " + std::to_string(i) + ")");
        s -= pi * std::log(pi / m.weights[i]);
    }
    return s;
}

Moments discrete_moments(const DiscreteDistribution& p) {
    double mean = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        mean += p.weights[i] * p.grid[i];
    double var = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const double d = p.grid[i] - mean;
        var += p.weights[i] * d * d;
    }
    return {mean, var};
}

std::vector<double> gaussian_reference(const std::vector<double>& grid, const MomentConstraints& c) {
    std::vector<double> w(grid.size());
    double total = 0.0;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * c.stddev * c.stddev);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double z = (grid[i] - c.mean) / c.stddev;
        w[i] = norm * std::exp(-0.5 * z * z);
        total += w[i];
    }
    for (auto& v : w)
        v /= total;
    return w;
}

namespace {

// Exponential-family state in standardized features t = (x - mean) / stddev:
// p_i ~ exp(a t_i + b t_i^2).
struct DualState {
    double a;
    double b;
    std::vector<double> weights;
    double e_t = 0, e_t2 = 0, e_t3 = 0, e_t4 = 0;
};

void evaluate(DualState& s, const std::vector<double>& t) {
    s.weights.resize(t.size());
    double max_logit = -INFINITY;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double l = s.a * t[i] + s.b * t[i] * t[i];
        s.weights[i] = l;
        max_logit = std::max(max_logit, l);
    }
    double z = 0.0;
    for (auto& w : s.weights) {
        w = std::exp(w - max_logit);
        z += w;
    }
    s.e_t = s.e_t2 = s.e_t3 = s.e_t4 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto& w = s.weights[i];
        w /= z;
        const double t2 = t[i] * t[i];
        s.e_t += w * t[i];
        s.e_t2 += w * t2;
        s.e_t3 += w * t2 * t[i];
        s.e_t4 += w * t2 * t2;
    }
}

// moment residual in the original units: (mean error, variance error)
double residual_norm(const DualState& s, double stddev) {
    return std::max(std::abs(stddev * s.e_t), std::abs(stddev * stddev * (s.e_t2 - 1.0)));
}

}  // namespace

MaxEntSolution maxent_solve(const GridSpec& grid, const MomentConstraints& c, const SolveOptions& options) {
    grid.validate();
    if (!(c.stddev > 0.0) || !std::isfinite(c.stddev) || !std::isfinite(c.mean))
        throw DomainError("constraints need finite mean and stddev > 0");
    if (grid.lo > c.mean - 8.0 * c.stddev || grid.hi < c.mean + 8.0 * c.stddev)
        throw DomainError("grid must span mean +/- 8 stddev; constraints are infeasible on this grid");
    if (!(options.tolerance > 0.0) || options.max_iterations < 1)
        throw DomainError("solver needs tolerance > 0 and max_iterations >= 1");

    const auto x = grid.abscissae();
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        t[i] = (x[i] - c.mean) / c.stddev;

    // start from a density as wide as the grid so the damping actually engages
    const double half_width = 0.5 * (grid.hi - grid.lo) / c.stddev;
    DualState state{0.0, -0.5 / (half_width * half_width), {}};
    evaluate(state, t);

    MaxEntSolution sol;
    double res = residual_norm(state, c.stddev);
    sol.residual_history.push_back(res);
    int it = 0;
    while (res > options.tolerance) {
        if (it >= options.max_iterations)
            throw NonConvergence("maxent Newton iteration did not converge; last residual " +
                                     std::to_string(res),
                                 res);
        ++it;
        // gradient of the dual is (E[t], E[t^2] - 1); its Jacobian is the feature covariance
        const double r1 = state.e_t;
        const double r2 = state.e_t2 - 1.0;
        const double h11 = state.e_t2 - state.e_t * state.e_t;
        const double h12 = state.e_t3 - state.e_t * state.e_t2;
        const double h22 = state.e_t4 - state.e_t2 * state.e_t2;
        const double det = h11 * h22 - h12 * h12;
        if (!(det > 0.0) || !std::isfinite(det))
            throw NonConvergence("maxent dual Hessian is singular", res);
        const double da = -(h22 * r1 - h12 * r2) / det;
        const double db = -(h11 * r2 - h12 * r1) / det;

        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            DualState trial{state.a + step * da, state.b + step * db, {}};
            if (!(trial.b < 0.0))
                continue;
            evaluate(trial, t);
            const double trial_res = residual_norm(trial, c.stddev);
            if (trial_res < (1.0 - 1e-4 * step) * res) {
                state = std::move(trial);
                res = trial_res;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NonConvergence("maxent line search failed; last residual " + std::to_string(res), res);
        sol.residual_history.push_back(res);
    }

    sol.iterations = it;
    const double s = c.stddev;
    sol.beta = state.b / (s * s);
    sol.alpha = state.a / s - 2.0 * state.b * c.mean / (s * s);
    sol.distribution = {x, std::move(state.weights)};
    return sol;
}

}  // namespace igchaos::maxent
