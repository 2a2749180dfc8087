#pragma once

#include "ptl/errors.hpp"

namespace ptl {

/// Where (r/sigma) * width^2 sits relative to 1. Only the first two
/// regimes admit a real-valued transmission coefficient.
enum class Regime {
    Tunneling,       ///< (r/sigma) * width^2 < 1: barrier present, 0 < T < 1
    AtTurningPoint,  ///< (r/sigma) * width^2 == 1 within tolerance: T = 1, d = 0
    NoBarrier,       ///< (r/sigma) * width^2 > 1: no real barrier, evaluation refused
};

const char* to_string(Regime regime) noexcept;

/// Equality band on (r/sigma) * width^2 for the AtTurningPoint regime.
inline constexpr double kTurningPointTol = 1e-12;

/// Annualized risk-free rate and implied volatility, both strictly
/// positive and finite. r == 0 is rejected: it collapses the rate/vol
/// ratio and the turning point sqrt(sigma/r) diverges.
class MarketParams {
public:
    MarketParams(double r, double sigma);

    double r() const noexcept { return r_; }
    double sigma() const noexcept { return sigma_; }

    friend bool operator==(const MarketParams&, const MarketParams&) = default;

private:
    double r_;
    double sigma_;
};

/// A bounded price region. Width is always derived from the levels so
/// the three quantities cannot drift apart.
class RangeBound {
public:
    RangeBound(double support, double resistance);

    double support() const noexcept { return support_; }
    double resistance() const noexcept { return resistance_; }
    double width() const noexcept { return resistance_ - support_; }
    double midpoint() const noexcept { return (support_ + resistance_) / 2.0; }

    friend bool operator==(const RangeBound&, const RangeBound&) = default;

private:
    double support_;
    double resistance_;
};

/// Full closed-form evaluation for one (r, sigma, width) triple.
/// t == exp(-exponent) by construction.
struct TunnelEvaluation {
    double lambda = 0.0;    ///< r / sigma
    double u = 0.0;         ///< sqrt(1 - lambda * width^2), in [0, 1)
    double exponent = 0.0;  ///< full argument of exp before negation, >= 0
    double t = 1.0;         ///< transmission coefficient, in (0, 1]
    double d = 0.0;         ///< penetration distance sqrt(sigma/r) - width
    Regime regime = Regime::AtTurningPoint;

    friend bool operator==(const TunnelEvaluation&, const TunnelEvaluation&) = default;
};

/// Rate/vol ratio r / sigma. Scale-invariant: lambda(c*r, c*sigma) == lambda(r, sigma).
double lambda(const MarketParams& params) noexcept;

/// Classify (r/sigma) * width^2 against 1 with the kTurningPointTol band.
/// width must be positive and finite.
Regime classify_regime(const MarketParams& params, double width);

/// u = sqrt(1 - (r/sigma) * width^2). Exactly 0 in the AtTurningPoint
/// regime. Throws NoBarrierError when the regime is NoBarrier.
double barrier_parameter(const MarketParams& params, double width);

/// d = sqrt(sigma/r) - width, the minimum magnitude by which price
/// clears the broken level. Exactly 0 at the turning point; throws
/// NoBarrierError when it would be negative.
double penetration_distance(const MarketParams& params, double width);

/// Evaluate the closed form:
///   T = exp(-2 * sqrt(r (sigma^2 + r) / sigma^4) * (artanh(u) - u))
/// and return the full evaluation. Throws NoBarrierError outside the
/// tunneling/turning-point regimes.
///
/// Note the deliberate unit mix: r/sigma is a ratio of annualized
/// quantities while width is in raw price units, so the result depends
/// on the quote scale. That is how the quantities are defined here;
/// callers must keep width in the same units as their price series.
TunnelEvaluation transmission_coefficient(const MarketParams& params, double width);

namespace detail {

/// artanh(u) - u for u in [0, 1). Series u^3/3 + u^5/5 below
/// kArtanhSeriesThreshold to dodge the cancellation of two nearly
/// equal terms; truncation error there is < 1e-18.
inline constexpr double kArtanhSeriesThreshold = 1e-4;
double artanh_minus_u(double u) noexcept;

/// C = r (sigma^2 + r) / sigma^4, the squared scale of the local decay rate.
double barrier_prefactor(const MarketParams& params) noexcept;

}  // namespace detail

}  // namespace ptl
