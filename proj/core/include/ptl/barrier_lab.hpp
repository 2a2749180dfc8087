#pragma once

#include "ptl/tunneling.hpp"

#include <iosfwd>
#include <vector>

namespace ptl {

/// The price where the barrier term 1/s^2 equals r/sigma: sqrt(sigma/r).
/// penetration_distance(params, width) == turning_point(params) - width,
/// same expression, same rounding.
double turning_point(const MarketParams& params) noexcept;

/// Frozen barrier geometry for one tunneling-regime (r, sigma, width).
/// Gives the re-derivation routines everything they need without
/// re-checking the regime on every call.
class BarrierSpec {
public:
    /// Throws NoBarrierError (or propagates AtTurningPoint as a
    /// zero-width barrier rejection) unless classify_regime says Tunneling.
    BarrierSpec(const MarketParams& params, double width);

    const MarketParams& params() const noexcept { return params_; }
    double width() const noexcept { return width_; }
    double s_star() const noexcept { return s_star_; }        ///< turning point
    double prefactor() const noexcept { return prefactor_; }  ///< C = r(sigma^2+r)/sigma^4

private:
    MarketParams params_;
    double width_;
    double s_star_;
    double prefactor_;
};

/// Local decay rate sqrt(C * (1/s^2 - r/sigma)) inside the barrier.
/// Zero at s == s_star. Throws std::out_of_range for s outside
/// [width, s_star].
double kappa(const BarrierSpec& spec, double s);

/// Re-derive the closed-form exponent as 2 * integral of kappa over
/// [width, s_star] by adaptive quadrature. The integrand has a
/// sqrt(s_star - s) endpoint zero with unbounded derivative, so the
/// whole integral is transformed with s = s_star - t^2, which makes it
/// smooth, before Simpson refinement. rel_tol must lie in (1e-14, 1e-3).
/// Throws QuadratureError (with the best estimate attached) if the
/// refinement-depth cap is hit first.
double wkb_exponent_numeric(const BarrierSpec& spec, double rel_tol);

/// Sampled solution of psi'' = C (1/s^2 - r/sigma) psi on [width, s_star].
struct WavefunctionProfile {
    std::vector<double> s;      ///< ascending, s.front() == width, s.back() == s_star
    std::vector<double> psi;    ///< psi(s_star) == 1 (normalization), grows toward width
    std::vector<double> kappa;  ///< local decay rate at each sample
};

/// Fixed-step classical 4th-order integration from s_star down to width
/// with psi(s_star) = 1, psi'(s_star) = 0. n_steps >= 100 so the profile
/// actually resolves the barrier; throws std::invalid_argument below that.
WavefunctionProfile integrate_wavefunction(const BarrierSpec& spec, int n_steps);

/// Growth exponent of the profile: arcosh(psi(width) / psi(s_star)).
/// The zero-slope start condition splits psi evenly between the growing
/// and decaying branches, so the barrier exponent is recovered through
/// arcosh of the amplification, not a plain log.
double growth_exponent(const WavefunctionProfile& profile);

/// CSV emission, columns "s,psi,kappa", shortest round-trip doubles.
void write_profile_csv(const WavefunctionProfile& profile, std::ostream& out);

namespace detail {

/// The raw integrator behind integrate_wavefunction, without the
/// n_steps floor. Step-halving convergence studies need coarse grids
/// where the truncation error is still above rounding noise.
WavefunctionProfile rk4_profile(const BarrierSpec& spec, int n_steps);

}  // namespace detail

}  // namespace ptl
