#pragma once

// Independent numeric oracles for the closed-form geometry: the Fisher metric
// by quadrature of the score outer product, and connection/curvature by
// central finite differences of the metric.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/manifold.hpp"

namespace igchaos::oracle {

enum class QuadratureMethod { GaussHermite, MonteCarlo };

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::GaussHermite;
    int node_count = 40;
    std::int64_t sample_count = 1'000'000;
    std::uint64_t rng_seed = 12345;
    /// Monte Carlo estimates whose relative standard error exceeds this are
    /// flagged as not converged.
    double max_relative_stderr = 1e-2;

    void validate() const;
};

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // for the weight function exp(-t^2)
};

/// Nodes and weights by Newton iteration on the Hermite recurrence.
GaussHermiteRule gauss_hermite_rule(int node_count);

struct FisherQuadratureResult {
    std::vector<BlockMetric> blocks;
    std::vector<BlockMetric> standard_errors;  // Monte Carlo only; zero for Gauss-Hermite
    double max_in_block_offdiag = 0.0;         // |g_{mu sigma}| estimated per block
    double max_cross_block = 0.0;              // |E[s_a] E[s_b]| over blocks a != b
    bool converged = true;
    std::string diagnostic;
};

FisherQuadratureResult fisher_metric_quadrature(const ThetaPoint& point, const QuadratureSpec& spec);

/// 1e-5 times the smallest sigma of the point.
double default_fd_step(const ThetaPoint& point);

/// All eight components Gamma^a_{bc} of one block, index order [a][b][c]
/// with 0 = mu and 1 = sigma.
struct BlockConnectionFd {
    double gamma[2][2][2];
};

std::vector<BlockConnectionFd> fd_block_connection(const ThetaPoint& point, double step);
ChristoffelSet fd_christoffel(const ThetaPoint& point, double step);
double fd_ricci_scalar(const ThetaPoint& point, double step);

/// Lowered Riemann tensor R_{abcd} on the full dense coordinate system, from
/// nested finite differences of the dense metric. Restricted to N <= 2.
class DenseRiemann {
public:
    DenseRiemann(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {}
    std::size_t dimension() const { return dim_; }
    double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return data_[((a * dim_ + b) * dim_ + c) * dim_ + d];
    }

private:
    std::size_t dim_;
    std::vector<double> data_;
};

DenseRiemann fd_riemann_dense(const ThetaPoint& point, double step);

/// Dense Christoffel symbols Gamma^a_{bc} (flat [a][b][c]) by finite differences.
std::vector<double> fd_christoffel_dense(const ThetaPoint& point, double step);

/// K(a, b) = R_abab / (g_aa g_bb - g_ab^2) from the dense brute-force tensor.
double fd_sectional_dense(const ThetaPoint& point, Plane plane, double step);
/// Several planes from one brute-force tensor.
std::vector<double> fd_sectional_dense(const ThetaPoint& point, std::span<const Plane> planes, double step);

struct SymmetryDefects {
    double antisym_first_pair = 0.0;   // max |R_abcd + R_bacd|
    double antisym_second_pair = 0.0;  // max |R_abcd + R_abdc|
    double first_bianchi = 0.0;        // max |R_abcd + R_acdb + R_adbc|
};

SymmetryDefects riemann_symmetry_defects(const DenseRiemann& r);

/// Adaptive Simpson quadrature to a relative tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol, int max_depth = 50);

/// log of the extended-region volume by quadrature: the mean extent as the
/// integral of the exact velocity over [0, tau] and the sigma factor as the
/// integral of sqrt(2)/sigma^2 between the endpoint sigmas.
double region_volume_quadrature(const GeodesicParams& params, double tau, double rel_tol = 1e-10);

}  // namespace igchaos::oracle

#include "core/oracle_quadrature.tpp"
