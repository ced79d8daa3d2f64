#include "core/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace igchaos {

namespace {

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("sigma must be finite and > 0, got " + std::to_string(sigma));
}

// Connection of one 2-d block in (mu, sigma) coordinates: gamma[a][b][c] is
// Gamma^a_{bc} and dgamma[e][a][b][c] its partial derivative along coordinate e.
struct BlockConnection {
    double gamma[2][2][2] = {};
    double dgamma[2][2][2][2] = {};
};

BlockConnection closed_form_connection(double sigma) {
    const double inv = 1.0 / sigma;
    const double inv2 = inv * inv;
    BlockConnection c;
    c.gamma[0][0][1] = c.gamma[0][1][0] = -inv;
    c.gamma[1][0][0] = 0.5 * inv;
    c.gamma[1][1][1] = -inv;
    // metric has no mu dependence: only sigma derivatives survive
    c.dgamma[1][0][0][1] = c.dgamma[1][0][1][0] = inv2;
    c.dgamma[1][1][0][0] = -0.5 * inv2;
    c.dgamma[1][1][1][1] = inv2;
    return c;
}

// R_{bc} = d_a G^a_{bc} - d_c G^a_{ba} + G^a_{bc} G^e_{ae} - G^e_{ba} G^a_{ce}
void block_ricci(const BlockConnection& c, double out[2][2]) {
    for (int b = 0; b < 2; ++b) {
        for (int cc = 0; cc < 2; ++cc) {
            double r = 0.0;
            for (int a = 0; a < 2; ++a) {
                r += c.dgamma[a][a][b][cc];
                r -= c.dgamma[cc][a][b][a];
                for (int e = 0; e < 2; ++e) {
                    r += c.gamma[a][b][cc] * c.gamma[e][a][e];
                    r -= c.gamma[e][b][a] * c.gamma[a][cc][e];
                }
            }
            out[b][cc] = r;
        }
    }
}

}  // namespace

ThetaPoint::ThetaPoint(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty() || blocks_.size() % 3 != 0)
        throw DomainError("block count must be 3N with N >= 1, got " + std::to_string(blocks_.size()));
    for (const auto& b : blocks_) {
        if (!std::isfinite(b.mu))
            throw DomainError("mu must be finite");
        require_sigma(b.sigma);
    }
}

ThetaPoint ThetaPoint::uniform(int n, Block block) {
    if (n < 1)
        throw DomainError("N must be >= 1");
    return ThetaPoint(std::vector<Block>(static_cast<std::size_t>(3 * n), block));
}

double ThetaPoint::coordinate(std::size_t flat) const {
    if (flat >= dimension())
        throw DomainError("coordinate index out of range");
    const auto& b = blocks_[flat / 2];
    return flat % 2 ? b.sigma : b.mu;
}

ThetaPoint ThetaPoint::shifted(std::size_t flat, double delta) const {
    if (flat >= dimension())
        throw DomainError("coordinate index out of range");
    auto blocks = blocks_;
    auto& b = blocks[flat / 2];
    (flat % 2 ? b.sigma : b.mu) += delta;
    return ThetaPoint(std::move(blocks));
}

double ThetaPoint::min_sigma() const {
    double m = blocks_.front().sigma;
    for (const auto& b : blocks_)
        m = std::min(m, b.sigma);
    return m;
}

TangentVector TangentVector::scaled(double c) const {
    auto out = blocks_;
    for (auto& b : out) {
        b.dmu *= c;
        b.dsigma *= c;
    }
    return TangentVector(std::move(out));
}

BlockMetric block_metric(double sigma) {
    const double inv2 = 1.0 / (sigma * sigma);
    return {inv2, 2.0 * inv2};
}

BlockChristoffel block_christoffel(double sigma) {
    const double inv = 1.0 / sigma;
    return {-inv, 0.5 * inv, -inv};
}

BlockRiemann block_riemann(double sigma) {
    const double s2 = sigma * sigma;
    return {-1.0 / (s2 * s2)};
}

std::vector<BlockMetric> metric_at(const ThetaPoint& point) {
    std::vector<BlockMetric> out;
    out.reserve(point.block_count());
    for (const auto& b : point.blocks())
        out.push_back(block_metric(b.sigma));
    return out;
}

std::vector<BlockMetric> inverse_metric_at(const ThetaPoint& point) {
    std::vector<BlockMetric> out;
    out.reserve(point.block_count());
    for (const auto& b : point.blocks()) {
        const double s2 = b.sigma * b.sigma;
        out.push_back({s2, 0.5 * s2});
    }
    return out;
}

ChristoffelSet christoffel_at(const ThetaPoint& point) {
    ChristoffelSet out;
    out.reserve(point.block_count());
    for (const auto& b : point.blocks())
        out.push_back(block_christoffel(b.sigma));
    return out;
}

double christoffel_component(const ChristoffelSet& set, std::size_t upper, std::size_t lower_a,
                             std::size_t lower_b) {
    const std::size_t k = upper / 2;
    if (k >= set.size() || lower_a / 2 != k || lower_b / 2 != k)
        return 0.0;
    const bool up_sigma = upper % 2;
    const int sigma_count = static_cast<int>(lower_a % 2) + static_cast<int>(lower_b % 2);
    const auto& g = set[k];
    if (!up_sigma)
        return sigma_count == 1 ? g.mu_musigma : 0.0;
    if (sigma_count == 0)
        return g.sigma_mumu;
    if (sigma_count == 2)
        return g.sigma_sigmasigma;
    return 0.0;
}

std::vector<BlockRiemann> riemann_at(const ThetaPoint& point) {
    std::vector<BlockRiemann> out;
    out.reserve(point.block_count());
    for (const auto& b : point.blocks())
        out.push_back(block_riemann(b.sigma));
    return out;
}

double riemann_component(const ThetaPoint& point, std::size_t a, std::size_t b, std::size_t c,
                         std::size_t d) {
    const std::size_t dim = point.dimension();
    if (a >= dim || b >= dim || c >= dim || d >= dim)
        throw DomainError("Riemann index out of range");
    const std::size_t k = a / 2;
    if (b / 2 != k || c / 2 != k || d / 2 != k)
        return 0.0;
    auto eps = [](std::size_t i, std::size_t j) -> double {
        if (i % 2 == j % 2)
            return 0.0;
        return (i % 2 == 0) ? 1.0 : -1.0;
    };
    const double s2 = point[k].sigma * point[k].sigma;
    return (-1.0 / (s2 * s2)) * eps(a, b) * eps(c, d);
}

std::vector<BlockRicci> ricci_tensor_at(const ThetaPoint& point) {
    std::vector<BlockRicci> out;
    out.reserve(point.block_count());
    for (const auto& b : point.blocks()) {
        double r[2][2];
        block_ricci(closed_form_connection(b.sigma), r);
        out.push_back({r[0][0], r[0][1], r[1][1]});
    }
    return out;
}

double ricci_scalar_at(const ThetaPoint& point) {
    // Connection scales as 1/sigma and its derivatives as 1/sigma^2, so each
    // block's contraction g^{ab} R_ab is sigma-independent. Evaluating the
    // unit-sigma coefficients keeps every intermediate a dyadic rational.
    double unit_ricci[2][2];
    block_ricci(closed_form_connection(1.0), unit_ricci);
    const double per_block = 1.0 * unit_ricci[0][0] + 0.5 * unit_ricci[1][1];
    double total = 0.0;
    for (const auto& b : point.blocks()) {
        require_sigma(b.sigma);
        total += per_block;
    }
    return total;
}

double sectional_curvature_at(const ThetaPoint& point, Plane plane) {
    const auto [a, b] = plane;
    if (a == b)
        throw DomainError("sectional curvature needs two distinct coordinate indices");
    if (a >= point.dimension() || b >= point.dimension())
        throw DomainError("coordinate index out of range");
    // coordinate planes are g-orthogonal, so no g_ab^2 term in the denominator
    const double sigma_a = point[a / 2].sigma;
    const double sigma_b = point[b / 2].sigma;
    const double g_aa = (a % 2 ? 2.0 : 1.0) / (sigma_a * sigma_a);
    const double g_bb = (b % 2 ? 2.0 : 1.0) / (sigma_b * sigma_b);
    return riemann_component(point, a, b, a, b) / (g_aa * g_bb);
}

CurvatureReport curvature_report(const ThetaPoint& point, std::span<const Plane> planes) {
    CurvatureReport report{ricci_scalar_at(point), {}};
    for (const auto& p : planes) {
        const Plane key{std::min(p.first, p.second), std::max(p.first, p.second)};
        report.sectional[key] = sectional_curvature_at(point, key);
    }
    return report;
}

CurvatureReport curvature_report(const ThetaPoint& point) {
    std::vector<Plane> planes;
    const std::size_t dim = point.dimension();
    planes.reserve(dim * (dim - 1) / 2);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a + 1; b < dim; ++b)
            planes.emplace_back(a, b);
    return curvature_report(point, planes);
}

double metric_norm_sq(const ThetaPoint& point, const TangentVector& v) {
    if (v.block_count() != point.block_count())
        throw DomainError("tangent vector block count does not match point");
    double s = 0.0;
    for (std::size_t k = 0; k < point.block_count(); ++k) {
        const double inv2 = 1.0 / (point[k].sigma * point[k].sigma);
        s += inv2 * (v[k].dmu * v[k].dmu + 2.0 * v[k].dsigma * v[k].dsigma);
    }
    return s;
}

// ---------------------------------------------------------------------------

void GeodesicParams::validate() const {
    if (n < 1)
        throw DomainError("N must be >= 1");
    if (!(Lambda > 0.0) || !std::isfinite(Lambda))
        throw DomainError("Lambda must be finite and > 0");
    if (!(lambda_rate > 0.0) || !std::isfinite(lambda_rate))
        throw DomainError("lambda_rate must be finite and > 0");
    if (!std::isfinite(C))
        throw DomainError("C must be finite");
}

std::vector<BlockConstants> GeodesicParams::block_constants() const {
    validate();
    return std::vector<BlockConstants>(static_cast<std::size_t>(3 * n), {Lambda, lambda_rate, C});
}

std::pair<Block, TangentBlock> analytic_block(const BlockConstants& c, double tau) {
    if (!(c.B > 0.0) || !(c.beta > 0.0))
        throw DomainError("block constants need B > 0 and beta > 0");
    const double bt = c.beta * tau;
    if (!(std::abs(bt) <= 700.0))
        throw DomainError("|beta * tau| exceeds the representable range of the closed form");
    const double k = c.B * c.B / (8.0 * c.beta * c.beta);
    const double w = std::exp(-bt);
    const double ew = std::exp(bt);
    // q = w + k/w and r = w - k/w keep every expression finite for |beta tau| <= 700
    const double q = w + k * ew;
    const double r = w - k * ew;
    Block block;
    block.mu = (c.B * c.B / (2.0 * c.beta)) * (ew / q) + c.C;
    block.sigma = c.B / q;
    TangentBlock vel;
    vel.dmu = c.B * c.B / (q * q);
    vel.dsigma = c.B * c.beta * r / (q * q);
    return {block, vel};
}

GeodesicSample analytic_geodesic_eval(std::span<const BlockConstants> constants, double tau) {
    std::vector<Block> blocks;
    std::vector<TangentBlock> vel;
    blocks.reserve(constants.size());
    vel.reserve(constants.size());
    for (const auto& c : constants) {
        auto [b, v] = analytic_block(c, tau);
        blocks.push_back(b);
        vel.push_back(v);
    }
    return {ThetaPoint(std::move(blocks)), TangentVector(std::move(vel))};
}

GeodesicSample analytic_geodesic_eval(const GeodesicParams& params, double tau) {
    const auto constants = params.block_constants();
    return analytic_geodesic_eval(constants, tau);
}

double geodesic_ode_residual(const GeodesicParams& params, double tau, double step) {
    if (!(step > 0.0))
        throw DomainError("step must be > 0");
    double worst = 0.0;
    for (const auto& c : params.block_constants()) {
        const auto [b, v] = analytic_block(c, tau);
        const auto vp = analytic_block(c, tau + step).second;
        const auto vm = analytic_block(c, tau - step).second;
        const double mu_dd = (vp.dmu - vm.dmu) / (2.0 * step);
        const double sigma_dd = (vp.dsigma - vm.dsigma) / (2.0 * step);
        const double r_mu = mu_dd - (2.0 / b.sigma) * v.dmu * v.dsigma;
        const double r_sigma =
            sigma_dd - v.dsigma * v.dsigma / b.sigma + v.dmu * v.dmu / (2.0 * b.sigma);
        worst = std::max({worst, std::abs(r_mu), std::abs(r_sigma)});
    }
    return worst;
}

}  // namespace igchaos
