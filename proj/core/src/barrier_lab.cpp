#include "ptl/barrier_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "ptl/text.hpp"

namespace ptl {

namespace {

constexpr int kMaxRefinementDepth = 48;
constexpr int kMinRefinementDepth = 3;

// kappa^2 = C (1/s^2 - r/sigma) in the factored form
// C (s_star - s)(s_star + s) / (s^2 s_star^2): the difference of nearly
// equal terms is taken where subtraction is exact, so the rate vanishes
// identically at the turning point instead of drowning in rounding noise.
double decay_rate_squared(const BarrierSpec& spec, double s) {
    const double s_star = spec.s_star();
    const double numerator = (s_star - s) * (s_star + s);
    return std::max(0.0, spec.prefactor() * numerator / (s * s * s_star * s_star));
}

struct SimpsonState {
    const std::function<double(double)>& f;
    bool converged = true;
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= kMinRefinementDepth && std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth >= kMaxRefinementDepth) {
        st.converged = false;
        return left + right + delta / 15.0;
    }
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double turning_point(const MarketParams& params) noexcept {
    return std::sqrt(params.sigma() / params.r());
}

BarrierSpec::BarrierSpec(const MarketParams& params, double width)
    : params_(params), width_(width) {
    const Regime regime = classify_regime(params, width);
    if (regime != Regime::Tunneling) {
        throw NoBarrierError(params.r(), params.sigma(), width);
    }
    s_star_ = turning_point(params);
    prefactor_ = detail::barrier_prefactor(params);
}

double kappa(const BarrierSpec& spec, double s) {
    if (!(s >= spec.width() && s <= spec.s_star())) {
        throw std::out_of_range("kappa: s outside [width, s_star]");
    }
    return std::sqrt(decay_rate_squared(spec, s));
}

double wkb_exponent_numeric(const BarrierSpec& spec, double rel_tol) {
    if (!(rel_tol > 1e-14 && rel_tol < 1e-3)) {
        throw std::invalid_argument("rel_tol must lie in (1e-14, 1e-3)");
    }

    const double s_star = spec.s_star();
    const double prefactor = spec.prefactor();
    const double t_max = std::sqrt(s_star - spec.width());
    // s = s_star - t^2 turns ds = -2t dt; kappa ~ sqrt(s_star - s) ~ t,
    // so the transformed integrand is ~ t^2 near the turning point. The
    // substitution is carried through algebraically so the (s_star - s)
    // factor stays the exact t^2 instead of a rounded re-subtraction:
    //   2t kappa(s_star - t^2) = 2 t^2 sqrt(C (2 s_star - t^2)) / (s s_star).
    const std::function<double(double)> g = [&](double t) {
        const double t2 = t * t;
        const double s = s_star - t2;
        return 2.0 * t2 * std::sqrt(prefactor * (2.0 * s_star - t2)) / (s * s_star);
    };

    const double fa = g(0.0);
    const double fb = g(t_max);
    const double fm = g(0.5 * t_max);
    const double whole = t_max / 6.0 * (fa + 4.0 * fm + fb);
    // Coarse magnitude for the absolute tolerance; floor keeps the
    // near-empty interval case (width -> s_star) from demanding
    // sub-denormal refinement.
    const double scale = std::max(std::abs(whole), 1e-300);

    SimpsonState st{g};
    const double integral =
        simpson_recurse(st, 0.0, t_max, fa, fm, fb, whole, rel_tol * scale, 0);
    const double exponent = 2.0 * integral;
    if (!st.converged) {
        throw QuadratureError("wkb exponent quadrature hit max refinement depth (" +
                                  std::to_string(kMaxRefinementDepth) +
                                  ") before reaching rel_tol",
                              exponent);
    }
    return exponent;
}

WavefunctionProfile integrate_wavefunction(const BarrierSpec& spec, int n_steps) {
    if (n_steps < 100) {
        throw std::invalid_argument(
            "n_steps must be >= 100 to resolve the barrier profile");
    }
    return detail::rk4_profile(spec, n_steps);
}

double growth_exponent(const WavefunctionProfile& profile) {
    if (profile.psi.size() < 2) {
        throw std::invalid_argument("profile must hold at least two samples");
    }
    const double ratio = profile.psi.front() / profile.psi.back();
    return std::acosh(std::max(1.0, ratio));
}

void write_profile_csv(const WavefunctionProfile& profile, std::ostream& out) {
    out << "s,psi,kappa\n";
    for (std::size_t i = 0; i < profile.s.size(); ++i) {
        out << fmt_double(profile.s[i]) << ',' << fmt_double(profile.psi[i]) << ','
            << fmt_double(profile.kappa[i]) << '\n';
    }
}

namespace detail {

WavefunctionProfile rk4_profile(const BarrierSpec& spec, int n_steps) {
    if (n_steps < 1) {
        throw std::invalid_argument("n_steps must be >= 1");
    }
    const double s_star = spec.s_star();
    const double h = (spec.width() - s_star) / n_steps;  // negative: downward sweep
    const auto q = [&](double s) { return decay_rate_squared(spec, s); };

    WavefunctionProfile profile;
    profile.s.resize(static_cast<std::size_t>(n_steps) + 1);
    profile.psi.resize(profile.s.size());
    profile.kappa.resize(profile.s.size());

    double psi = 1.0;
    double dpsi = 0.0;
    for (int i = 0; i <= n_steps; ++i) {
        // Endpoints pinned exactly; interior nodes by offset from s_star.
        const double s = (i == n_steps) ? spec.width() : s_star + i * h;
        const std::size_t slot = static_cast<std::size_t>(n_steps - i);
        profile.s[slot] = s;
        profile.psi[slot] = psi;
        profile.kappa[slot] = std::sqrt(q(s));
        if (i == n_steps) {
            break;
        }
        const double k1y = dpsi;
        const double k1p = q(s) * psi;
        const double k2y = dpsi + 0.5 * h * k1p;
        const double k2p = q(s + 0.5 * h) * (psi + 0.5 * h * k1y);
        const double k3y = dpsi + 0.5 * h * k2p;
        const double k3p = q(s + 0.5 * h) * (psi + 0.5 * h * k2y);
        const double k4y = dpsi + h * k3p;
        const double k4p = q(s + h) * (psi + h * k3y);
        psi += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dpsi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    return profile;
}

}  // namespace detail

}  // namespace ptl
