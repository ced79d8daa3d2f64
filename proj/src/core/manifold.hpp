#pragma once

// Closed-form geometry of the product-Gaussian statistical manifold.
//
// A point carries 3N blocks (mu, sigma), one per Gaussian microvariable. The
// Fisher-Rao metric is block diagonal with per-block entries diag(1, 2)/sigma^2,
// so every geometric object below is stored per block; cross-block components
// vanish identically and are never materialized.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace igchaos {

struct Block {
    double mu = 0.0;
    double sigma = 1.0;
};

struct TangentBlock {
    double dmu = 0.0;
    double dsigma = 0.0;
};

/// Flat coordinate index: 2k is mu of block k, 2k+1 is sigma of block k.
struct CoordinateIndex {
    std::size_t block;
    bool is_sigma;

    static CoordinateIndex from_flat(std::size_t flat) { return {flat / 2, (flat % 2) == 1}; }
    std::size_t flat() const { return 2 * block + (is_sigma ? 1 : 0); }
};

/// A macrostate: 3N blocks with strictly positive sigma.
class ThetaPoint {
public:
    explicit ThetaPoint(std::vector<Block> blocks);
    static ThetaPoint uniform(int n, Block block);

    int n() const { return static_cast<int>(blocks_.size() / 3); }
    std::size_t block_count() const { return blocks_.size(); }
    std::size_t dimension() const { return 2 * blocks_.size(); }
    std::span<const Block> blocks() const { return blocks_; }
    const Block& operator[](std::size_t k) const { return blocks_[k]; }

    double coordinate(std::size_t flat) const;
    /// Copy with one coordinate shifted; throws if sigma would become non-positive.
    ThetaPoint shifted(std::size_t flat, double delta) const;
    double min_sigma() const;

private:
    std::vector<Block> blocks_;
};

class TangentVector {
public:
    TangentVector() = default;
    explicit TangentVector(std::vector<TangentBlock> blocks) : blocks_(std::move(blocks)) {}
    static TangentVector zero(std::size_t block_count) {
        return TangentVector(std::vector<TangentBlock>(block_count));
    }

    std::size_t block_count() const { return blocks_.size(); }
    std::span<const TangentBlock> blocks() const { return blocks_; }
    const TangentBlock& operator[](std::size_t k) const { return blocks_[k]; }
    TangentBlock& operator[](std::size_t k) { return blocks_[k]; }
    double component(std::size_t flat) const {
        const auto& b = blocks_[flat / 2];
        return flat % 2 ? b.dsigma : b.dmu;
    }

    TangentVector scaled(double c) const;

private:
    std::vector<TangentBlock> blocks_;
};

struct BlockMetric {
    double g_mumu;
    double g_sigmasigma;
};

/// Non-zero connection coefficients of one block; the rest vanish.
struct BlockChristoffel {
    double mu_musigma;        // Gamma^mu_{mu sigma} = Gamma^mu_{sigma mu}
    double sigma_mumu;        // Gamma^sigma_{mu mu}
    double sigma_sigmasigma;  // Gamma^sigma_{sigma sigma}
};

using ChristoffelSet = std::vector<BlockChristoffel>;

/// Component Gamma^upper_{lower_a lower_b} addressed by flat coordinate indices.
double christoffel_component(const ChristoffelSet& set, std::size_t upper, std::size_t lower_a,
                             std::size_t lower_b);

/// The single independent Riemann component of a 2-dimensional block.
struct BlockRiemann {
    double r_musigmamusigma;  // R_{mu sigma mu sigma}
};

using Plane = std::pair<std::size_t, std::size_t>;

struct CurvatureReport {
    double ricci_scalar;
    std::map<Plane, double> sectional;
};

/// Single-block forms used by the integrators; sigma must be > 0.
BlockMetric block_metric(double sigma);
BlockChristoffel block_christoffel(double sigma);
BlockRiemann block_riemann(double sigma);

std::vector<BlockMetric> metric_at(const ThetaPoint& point);
std::vector<BlockMetric> inverse_metric_at(const ThetaPoint& point);
ChristoffelSet christoffel_at(const ThetaPoint& point);
std::vector<BlockRiemann> riemann_at(const ThetaPoint& point);

/// Lowered Riemann component R_{abcd}; identically zero unless all four
/// indices lie in one block.
double riemann_component(const ThetaPoint& point, std::size_t a, std::size_t b, std::size_t c,
                         std::size_t d);

/// Ricci scalar obtained by contracting the Ricci tensor built from the
/// closed-form connection. Returns -3N exactly.
double ricci_scalar_at(const ThetaPoint& point);

/// Per-block Ricci tensor entries (R_mumu, R_musigma, R_sigmasigma) at the
/// block's actual sigma, without the scale-free shortcut used by ricci_scalar_at.
struct BlockRicci {
    double mumu;
    double musigma;
    double sigmasigma;
};
std::vector<BlockRicci> ricci_tensor_at(const ThetaPoint& point);

/// Sectional curvature of the coordinate plane spanned by two flat indices.
double sectional_curvature_at(const ThetaPoint& point, Plane plane);

CurvatureReport curvature_report(const ThetaPoint& point, std::span<const Plane> planes);
/// Report over every coordinate plane (dimension choose 2 entries).
CurvatureReport curvature_report(const ThetaPoint& point);

/// g(v, v) at the given point.
double metric_norm_sq(const ThetaPoint& point, const TangentVector& v);

// ---------------------------------------------------------------------------
// Analytic geodesics

/// Integration constants of one block's closed-form geodesic.
struct BlockConstants {
    double B;
    double beta;
    double C;
};

/// Shared constants for all 3N blocks.
struct GeodesicParams {
    int n = 1;
    double Lambda = 2.8284271247461903;  // sqrt(8)
    double lambda_rate = 1.0;
    double C = 0.0;

    void validate() const;
    std::vector<BlockConstants> block_constants() const;
};

struct GeodesicSample {
    ThetaPoint point;
    TangentVector velocity;
};

/// Closed-form (mu, sigma) and exact tau-derivative of one block.
std::pair<Block, TangentBlock> analytic_block(const BlockConstants& constants, double tau);

GeodesicSample analytic_geodesic_eval(const GeodesicParams& params, double tau);
GeodesicSample analytic_geodesic_eval(std::span<const BlockConstants> constants, double tau);

/// Max absolute residual of the geodesic equations along the closed form,
/// second derivatives by central differences of the exact velocity.
double geodesic_ode_residual(const GeodesicParams& params, double tau, double step = 1e-5);

}  // namespace igchaos
