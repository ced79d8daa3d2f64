#pragma once

// Adaptive explicit Runge-Kutta integration: Dormand-Prince 8(5,3) with a
// 7th-order continuous extension for sampling between accepted steps.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace igchaos::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called after every accepted step; a non-empty return halts integration
/// with that message.
using StepGuard = std::function<std::string(double t, std::span<const double> y)>;

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-300;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
    double max_error_estimate = 0.0;  // largest normalized local error of an accepted step
};

enum class Status { Ok, StepUnderflow, NonFinite, Halted };

const char* status_name(Status s);

class Dop853 {
public:
    Dop853(Rhs rhs, std::size_t dim, Tolerances tol);

    void init(double t0, std::span<const double> y0);

    /// Advance by one accepted step without passing t_limit (> current time).
    Status step(double t_limit);

    double time() const { return t_; }
    double previous_time() const { return t_prev_; }
    std::span<const double> state() const { return y_; }
    const Stats& stats() const { return stats_; }

    /// Continuous extension on [previous_time(), time()].
    void dense(double t, std::span<double> out) const;

private:
    double initial_step(double t_limit);

    Rhs rhs_;
    std::size_t dim_;
    Tolerances tol_;
    double t_ = 0.0;
    double t_prev_ = 0.0;
    double h_ = 0.0;
    bool last_rejected_ = false;
    std::vector<double> y_, f_;
    std::vector<double> k_;      // 12 stage buffers, dim each
    std::vector<double> rcont_;  // 8 interpolation coefficient buffers
    std::vector<double> ynew_, fnew_, tmp_;
    Stats stats_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    Status status = Status::Ok;
    std::string message;
    Stats stats;
};

/// Integrate from sample_times.front() and record the state at every sample
/// time (strictly increasing). On failure the trajectory holds the samples
/// reached so far.
Trajectory integrate(const Rhs& rhs, std::span<const double> y0, std::span<const double> sample_times,
                     Tolerances tol, const StepGuard& guard = {});

}  // namespace igchaos::ode
