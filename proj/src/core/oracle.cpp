#include "core/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "core/errors.hpp"

namespace igchaos::oracle {

void QuadratureSpec::validate() const {
    if (node_count < 2)
        throw DomainError("quadrature node_count must be >= 2");
    if (method == QuadratureMethod::MonteCarlo && sample_count < 1)
        throw DomainError("Monte Carlo sample_count must be >= 1");
    if (!(max_relative_stderr > 0.0))
        throw DomainError("max_relative_stderr must be > 0");
}

GaussHermiteRule gauss_hermite_rule(int n) {
    if (n < 2)
        throw DomainError("Gauss-Hermite rule needs at least 2 nodes");
    constexpr double kEps = 1e-15;
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    GaussHermiteRule rule{std::vector<double>(n), std::vector<double>(n)};
    auto& x = rule.nodes;
    auto& w = rule.weights;
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        // initial guesses for the largest roots, then extrapolation from the previous two
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z)))
                break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
    std::reverse(x.begin(), x.end());
    std::reverse(w.begin(), w.end());
    return rule;
}

namespace {

struct ScoreMoments {
    double mumu = 0, sigsig = 0, musig = 0;
    double mean_mu = 0, mean_sig = 0;
    double se_mumu = 0, se_sigsig = 0;
};

// score of the Gaussian log-density with respect to (mu, sigma)
inline void gaussian_score(double x, double mu, double sigma, double& s_mu, double& s_sigma) {
    const double d = x - mu;
    s_mu = d / (sigma * sigma);
    s_sigma = -1.0 / sigma + d * d / (sigma * sigma * sigma);
}

ScoreMoments gh_moments(const Block& b, const GaussHermiteRule& rule) {
    ScoreMoments m;
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = b.mu + std::numbers::sqrt2 * b.sigma * rule.nodes[i];
        double sm, ss;
        gaussian_score(x, b.mu, b.sigma, sm, ss);
        const double w = rule.weights[i] * norm;
        m.mumu += w * sm * sm;
        m.sigsig += w * ss * ss;
        m.musig += w * sm * ss;
        m.mean_mu += w * sm;
        m.mean_sig += w * ss;
    }
    return m;
}

ScoreMoments mc_moments(const Block& b, std::int64_t samples, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double s_mm = 0, s_ss = 0, s_ms = 0, s_m = 0, s_s = 0;
    double q_mm = 0, q_ss = 0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double x = b.mu + b.sigma * normal(rng);
        double sm, ss;
        gaussian_score(x, b.mu, b.sigma, sm, ss);
        const double mm = sm * sm;
        const double sq = ss * ss;
        s_mm += mm;
        s_ss += sq;
        s_ms += sm * ss;
        s_m += sm;
        s_s += ss;
        q_mm += mm * mm;
        q_ss += sq * sq;
    }
    const double n = static_cast<double>(samples);
    ScoreMoments m;
    m.mumu = s_mm / n;
    m.sigsig = s_ss / n;
    m.musig = s_ms / n;
    m.mean_mu = s_m / n;
    m.mean_sig = s_s / n;
    if (samples > 1) {
        m.se_mumu = std::sqrt(std::max(0.0, q_mm / n - m.mumu * m.mumu) / (n - 1));
        m.se_sigsig = std::sqrt(std::max(0.0, q_ss / n - m.sigsig * m.sigsig) / (n - 1));
    }
    return m;
}

}  // namespace

FisherQuadratureResult fisher_metric_quadrature(const ThetaPoint& point, const QuadratureSpec& spec) {
    spec.validate();
    FisherQuadratureResult out;
    std::vector<ScoreMoments> moments;
    moments.reserve(point.block_count());
    if (spec.method == QuadratureMethod::GaussHermite) {
        const auto rule = gauss_hermite_rule(spec.node_count);
        for (const auto& b : point.blocks())
            moments.push_back(gh_moments(b, rule));
    } else {
        std::mt19937_64 rng(spec.rng_seed);
        for (const auto& b : point.blocks())
            moments.push_back(mc_moments(b, spec.sample_count, rng));
    }
    for (std::size_t k = 0; k < moments.size(); ++k) {
        const auto& m = moments[k];
        out.blocks.push_back({m.mumu, m.sigsig});
        out.standard_errors.push_back({m.se_mumu, m.se_sigsig});
        out.max_in_block_offdiag = std::max(out.max_in_block_offdiag, std::abs(m.musig));
        if (spec.method == QuadratureMethod::MonteCarlo) {
            const double rel = std::max(m.se_mumu / m.mumu, m.se_sigsig / m.sigsig);
            if (!(rel <= spec.max_relative_stderr)) {
                out.converged = false;
                out.diagnostic = "block " + std::to_string(k) + ": relative standard error " +
                                 std::to_string(rel) + " exceeds " +
                                 std::to_string(spec.max_relative_stderr);
            }
        }
    }
    // blocks are independent under the product density, so a cross-block entry
    // factorizes into a product of expected scores
    double first = 0.0, second = 0.0;
    for (const auto& m : moments) {
        const double e = std::max(std::abs(m.mean_mu), std::abs(m.mean_sig));
        if (e > first) {
            second = first;
            first = e;
        } else if (e > second) {
            second = e;
        }
    }
    out.max_cross_block = first * second;
    return out;
}

double default_fd_step(const ThetaPoint& point) { return 1e-5 * point.min_sigma(); }

namespace {

void check_step(const ThetaPoint& point, double step) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw DomainError("finite-difference step must be > 0");
    if (step >= point.min_sigma() / 10.0)
        throw DomainError("finite-difference step must be < min sigma / 10");
}

using Metric2 = std::array<std::array<double, 2>, 2>;

Metric2 block_metric(const ThetaPoint& point, std::size_t k) {
    const auto g = metric_at(point)[k];
    return {{{g.g_mumu, 0.0}, {0.0, g.g_sigmasigma}}};
}

Metric2 invert2(const Metric2& g) {
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    return {{{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}}};
}

BlockConnectionFd connection_of_block(const ThetaPoint& point, std::size_t k, double h) {
    double dg[2][2][2];  // dg[e][a][b] = d_e g_ab
    for (int e = 0; e < 2; ++e) {
        const std::size_t flat = 2 * k + e;
        const auto gp = block_metric(point.shifted(flat, h), k);
        const auto gm = block_metric(point.shifted(flat, -h), k);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                dg[e][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
    }
    const auto ginv = invert2(block_metric(point, k));
    BlockConnectionFd c{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int cc = 0; cc < 2; ++cc) {
                double s = 0.0;
                for (int d = 0; d < 2; ++d)
                    s += ginv[a][d] * (dg[b][d][cc] + dg[cc][b][d] - dg[d][b][cc]);
                c.gamma[a][b][cc] = 0.5 * s;
            }
    return c;
}

}  // namespace

std::vector<BlockConnectionFd> fd_block_connection(const ThetaPoint& point, double step) {
    check_step(point, step);
    std::vector<BlockConnectionFd> out;
    out.reserve(point.block_count());
    for (std::size_t k = 0; k < point.block_count(); ++k)
        out.push_back(connection_of_block(point, k, step));
    return out;
}

ChristoffelSet fd_christoffel(const ThetaPoint& point, double step) {
    ChristoffelSet out;
    for (const auto& c : fd_block_connection(point, step))
        out.push_back({c.gamma[0][0][1], c.gamma[1][0][0], c.gamma[1][1][1]});
    return out;
}

double fd_ricci_scalar(const ThetaPoint& point, double step) {
    check_step(point, step);
    double total = 0.0;
    for (std::size_t k = 0; k < point.block_count(); ++k) {
        const auto c = connection_of_block(point, k, step);
        double dgamma[2][2][2][2];  // [e][a][b][c]
        for (int e = 0; e < 2; ++e) {
            const auto cp = connection_of_block(point.shifted(2 * k + e, step), k, step);
            const auto cm = connection_of_block(point.shifted(2 * k + e, -step), k, step);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int cc = 0; cc < 2; ++cc)
                        dgamma[e][a][b][cc] = (cp.gamma[a][b][cc] - cm.gamma[a][b][cc]) / (2.0 * step);
        }
        const auto ginv = invert2(block_metric(point, k));
        for (int mu = 0; mu < 2; ++mu)
            for (int nu = 0; nu < 2; ++nu) {
                double r = 0.0;
                for (int e = 0; e < 2; ++e) {
                    r += dgamma[e][e][mu][nu] - dgamma[nu][e][mu][e];
                    for (int h = 0; h < 2; ++h)
                        r += c.gamma[e][mu][nu] * c.gamma[h][e][h] - c.gamma[h][mu][e] * c.gamma[e][nu][h];
                }
                total += ginv[mu][nu] * r;
            }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Dense path

namespace {

Eigen::MatrixXd dense_metric(const ThetaPoint& point) {
    const auto dim = static_cast<Eigen::Index>(point.dimension());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    const auto blocks = metric_at(point);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        g(2 * k, 2 * k) = blocks[k].g_mumu;
        g(2 * k + 1, 2 * k + 1) = blocks[k].g_sigmasigma;
    }
    return g;
}

void check_dense(const ThetaPoint& point, double step) {
    if (point.n() > 2)
        throw DomainError("dense curvature path is restricted to N <= 2");
    check_step(point, step);
}

std::vector<double> dense_christoffel_impl(const ThetaPoint& point, double h) {
    const std::size_t dim = point.dimension();
    std::vector<Eigen::MatrixXd> dg(dim);
    for (std::size_t e = 0; e < dim; ++e)
        dg[e] = (dense_metric(point.shifted(e, h)) - dense_metric(point.shifted(e, -h))) / (2.0 * h);
    const Eigen::MatrixXd ginv = dense_metric(point).inverse();
    std::vector<double> gamma(dim * dim * dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t c = 0; c < dim; ++c) {
                double s = 0.0;
                for (std::size_t d = 0; d < dim; ++d)
                    s += ginv(a, d) * (dg[b](d, c) + dg[c](b, d) - dg[d](b, c));
                gamma[(a * dim + b) * dim + c] = 0.5 * s;
            }
    return gamma;
}

}  // namespace

std::vector<double> fd_christoffel_dense(const ThetaPoint& point, double step) {
    check_dense(point, step);
    return dense_christoffel_impl(point, step);
}

DenseRiemann fd_riemann_dense(const ThetaPoint& point, double step) {
    check_dense(point, step);
    const std::size_t dim = point.dimension();
    auto G = [dim](const std::vector<double>& g, std::size_t a, std::size_t b, std::size_t c) {
        return g[(a * dim + b) * dim + c];
    };
    const auto gamma = dense_christoffel_impl(point, step);
    std::vector<std::vector<double>> dgamma(dim);  // dgamma[e] = d_e Gamma
    for (std::size_t e = 0; e < dim; ++e) {
        const auto gp = dense_christoffel_impl(point.shifted(e, step), step);
        const auto gm = dense_christoffel_impl(point.shifted(e, -step), step);
        dgamma[e].resize(gp.size());
        for (std::size_t i = 0; i < gp.size(); ++i)
            dgamma[e][i] = (gp[i] - gm[i]) / (2.0 * step);
    }
    // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    std::vector<double> up(dim * dim * dim * dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t c = 0; c < dim; ++c)
                for (std::size_t d = 0; d < dim; ++d) {
                    double r = G(dgamma[c], a, d, b) - G(dgamma[d], a, c, b);
                    for (std::size_t e = 0; e < dim; ++e)
                        r += G(gamma, a, c, e) * G(gamma, e, d, b) - G(gamma, a, d, e) * G(gamma, e, c, b);
                    up[((a * dim + b) * dim + c) * dim + d] = r;
                }
    const Eigen::MatrixXd g = dense_metric(point);
    std::vector<double> low(up.size(), 0.0);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t c = 0; c < dim; ++c)
                for (std::size_t d = 0; d < dim; ++d) {
                    double s = 0.0;
                    for (std::size_t e = 0; e < dim; ++e)
                        s += g(a, e) * up[((e * dim + b) * dim + c) * dim + d];
                    low[((a * dim + b) * dim + c) * dim + d] = s;
                }
    return DenseRiemann(dim, std::move(low));
}

double fd_sectional_dense(const ThetaPoint& point, Plane plane, double step) {
    const auto [a, b] = plane;
    if (a == b || a >= point.dimension() || b >= point.dimension())
        throw DomainError("sectional plane needs two distinct in-range indices");
    const auto r = fd_riemann_dense(point, step);
    const Eigen::MatrixXd g = dense_metric(point);
    return r(a, b, a, b) / (g(a, a) * g(b, b) - g(a, b) * g(a, b));
}

std::vector<double> fd_sectional_dense(const ThetaPoint& point, std::span<const Plane> planes, double step) {
    for (const auto& [a, b] : planes)
        if (a == b || a >= point.dimension() || b >= point.dimension())
            throw DomainError("sectional plane needs two distinct in-range indices");
    const auto r = fd_riemann_dense(point, step);
    const Eigen::MatrixXd g = dense_metric(point);
    std::vector<double> out;
    out.reserve(planes.size());
    for (const auto& [a, b] : planes)
        out.push_back(r(a, b, a, b) / (g(a, a) * g(b, b) - g(a, b) * g(a, b)));
    return out;
}

SymmetryDefects riemann_symmetry_defects(const DenseRiemann& r) {
    SymmetryDefects out;
    const std::size_t dim = r.dimension();
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t c = 0; c < dim; ++c)
                for (std::size_t d = 0; d < dim; ++d) {
                    const double v = r(a, b, c, d);
                    out.antisym_first_pair = std::max(out.antisym_first_pair, std::abs(v + r(b, a, c, d)));
                    out.antisym_second_pair = std::max(out.antisym_second_pair, std::abs(v + r(a, b, d, c)));
                    out.first_bianchi =
                        std::max(out.first_bianchi, std::abs(v + r(a, c, d, b) + r(a, d, b, c)));
                }
    return out;
}

double region_volume_quadrature(const GeodesicParams& params, double tau, double rel_tol) {
    if (!(tau > 0.0))
        throw DomainError("region volume needs tau > 0");
    double log_volume = 0.0;
    for (const auto& c : params.block_constants()) {
        const double mean_extent = adaptive_simpson(
            [&](double t) { return analytic_block(c, t).second.dmu; }, 0.0, tau, rel_tol);
        const double s0 = analytic_block(c, 0.0).first.sigma;
        const double st = analytic_block(c, tau).first.sigma;
        // substitute sigma = e^u so the integrand sqrt(2) e^{-u} stays smooth as sigma -> 0
        const double sigma_factor = adaptive_simpson(
            [](double u) { return std::numbers::sqrt2 * std::exp(-u); }, std::log(std::min(s0, st)),
            std::log(std::max(s0, st)), rel_tol);
        log_volume += std::log(std::abs(mean_extent)) + std::log(std::abs(sigma_factor));
    }
    return log_volume;
}

}  // namespace igchaos::oracle
