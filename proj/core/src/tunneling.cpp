#include "ptl/tunneling.hpp"

#include <cmath>
#include <string>

namespace ptl {

namespace {

void require_positive_finite(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

const char* to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Tunneling: return "tunneling";
        case Regime::AtTurningPoint: return "at_turning_point";
        case Regime::NoBarrier: return "no_barrier";
    }
    return "unknown";
}

MarketParams::MarketParams(double r, double sigma) : r_(r), sigma_(sigma) {
    require_positive_finite(r, "r");
    require_positive_finite(sigma, "sigma");
}

RangeBound::RangeBound(double support, double resistance)
    : support_(support), resistance_(resistance) {
    require_positive_finite(support, "support");
    if (!std::isfinite(resistance) || resistance <= support) {
        throw std::invalid_argument("resistance must be finite and > support");
    }
}

double lambda(const MarketParams& params) noexcept {
    return params.r() / params.sigma();
}

Regime classify_regime(const MarketParams& params, double width) {
    require_positive_finite(width, "width");
    const double x = lambda(params) * width * width;
    if (std::abs(x - 1.0) <= kTurningPointTol) {
        return Regime::AtTurningPoint;
    }
    return x < 1.0 ? Regime::Tunneling : Regime::NoBarrier;
}

double barrier_parameter(const MarketParams& params, double width) {
    const Regime regime = classify_regime(params, width);
    if (regime == Regime::NoBarrier) {
        throw NoBarrierError(params.r(), params.sigma(), width);
    }
    if (regime == Regime::AtTurningPoint) {
        return 0.0;
    }
    return std::sqrt(1.0 - lambda(params) * width * width);
}

double penetration_distance(const MarketParams& params, double width) {
    const Regime regime = classify_regime(params, width);
    if (regime == Regime::NoBarrier) {
        throw NoBarrierError(params.r(), params.sigma(), width);
    }
    if (regime == Regime::AtTurningPoint) {
        return 0.0;
    }
    return std::sqrt(params.sigma() / params.r()) - width;
}

TunnelEvaluation transmission_coefficient(const MarketParams& params, double width) {
    const Regime regime = classify_regime(params, width);
    if (regime == Regime::NoBarrier) {
        throw NoBarrierError(params.r(), params.sigma(), width);
    }

    TunnelEvaluation eval;
    eval.lambda = lambda(params);
    eval.regime = regime;
    if (regime == Regime::Tunneling) {
        eval.u = std::sqrt(1.0 - eval.lambda * width * width);
        eval.exponent = 2.0 * std::sqrt(detail::barrier_prefactor(params)) *
                        detail::artanh_minus_u(eval.u);
        eval.t = std::exp(-eval.exponent);
        eval.d = std::sqrt(params.sigma() / params.r()) - width;
    }
    return eval;
}

namespace detail {

double artanh_minus_u(double u) noexcept {
    if (u < kArtanhSeriesThreshold) {
        const double u2 = u * u;
        return u * u2 * (1.0 / 3.0 + u2 * (1.0 / 5.0));
    }
    return std::atanh(u) - u;
}

double barrier_prefactor(const MarketParams& params) noexcept {
    const double s2 = params.sigma() * params.sigma();
    return params.r() * (s2 + params.r()) / (s2 * s2);
}

}  // namespace detail

}  // namespace ptl
