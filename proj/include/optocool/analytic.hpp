// analytic.hpp: improved approximation beyond the quantum-noise picture
//
// The mechanical spectrum keeps the full frequency dependence of the force
// spectrum, dressed by the effective susceptibility with optical damping
// (the optical spring is left out). Integrating it over frequency gives a
// closed-form phonon number with three additive terms.

#pragma once

#include <cmath>
#include <complex>

#include "optocool/weak_coupling.hpp"

namespace optocool {

inline std::complex<double> effective_susceptibility(const SystemParams& p, const RateSet& rates,
                                                     double omega) {
    return 1.0 / std::complex<double>(rates.gamma_eff / 2, -(omega - p.omega_m));
}

struct MechanicalSpectrumTerms {
    double thermal{};  // |chi(-w)|^2 gamma n_th
    double force{};    // |chi(-w)|^2 x0^2 S_FF(w)
    double total() const noexcept { return thermal + force; }
};

namespace detail {

inline RateSet require_damped(const SystemParams& p) {
    const RateSet r = quantum_noise_rates(p);
    if (!(r.gamma_eff > 0))
        throw PhysicsError(PhysicsError::Kind::EffectiveDampingNonpositive,
                           "effective damping nonpositive");
    return r;
}

} // namespace detail

inline MechanicalSpectrumTerms mechanical_spectrum_terms(const SystemParams& p, const RateSet& rates,
                                                         double omega) {
    if (!(rates.gamma_eff > 0))
        throw PhysicsError(PhysicsError::Kind::EffectiveDampingNonpositive,
                           "effective damping nonpositive");
    const double chi2 = std::norm(effective_susceptibility(p, rates, -omega));
    return {chi2 * p.gamma * p.n_th, chi2 * force_spectrum_main(p, omega)};
}

inline double mechanical_spectrum_approx(const SystemParams& p, const RateSet& rates, double omega) {
    return mechanical_spectrum_terms(p, rates, omega).total();
}

inline double mechanical_spectrum_approx(const SystemParams& p, double omega) {
    return mechanical_spectrum_approx(p, detail::require_damped(p), omega);
}

struct PhononResult {
    double n_qn{};
    double n_analytic{};
    double term_thermal{};  // gamma n_th / gamma_eff
    double term_qn_like{};  // vanishes at the optimal detuning
    double term_beyond{};   // noise away from omega_m; sets the cooling limit
    RateSet rates;
};

/// Closed form of the integrated mechanical spectrum.
inline PhononResult phonon_number_analytic(const SystemParams& p) {
    const RateSet r = detail::require_damped(p);
    const double a = p.dispersive_coupling();
    const double b = p.dissipative_coupling();
    const double k = p.kappa;
    const double D = p.delta;
    const double wm = p.omega_m;
    const double ge = r.gamma_eff;

    PhononResult out;
    out.rates = r;
    out.n_qn = (p.gamma * p.n_th + r.gamma_up) / ge;
    out.term_thermal = p.gamma * p.n_th / ge;

    const double fano = b * (2 * D - wm) - 2 * a * k;
    const double dm = D - wm;
    out.term_qn_like = 0.25 * k * fano * fano / (ge * ((ge + k) * (ge + k) / 4 + dm * dm));

    // b^2/4 [ge k + 4 D^2 + k^2] - 4 a b D k + 4 a^2 k^2, i.e. the bracket with
    // A~/B~ powers absorbed into the products.
    const double num3 = 0.25 * b * b * (ge * k + 4 * D * D + k * k) - 4 * a * b * D * k + 4 * a * a * k * k;
    out.term_beyond = num3 / ((ge + k) * (ge + k) + 4 * dm * dm);

    out.n_analytic = out.term_thermal + out.term_qn_like + out.term_beyond;
    return out;
}

/// Limit kappa >> gamma_eff at the optimal detuning. The caller is
/// responsible for sitting at that detuning.
inline double phonon_number_simplified(const SystemParams& p) {
    const RateSet r = detail::require_damped(p);
    const double b = p.dissipative_coupling();
    return p.gamma * p.n_th / r.gamma_eff + b * b / 4;
}

struct CouplingOptimum {
    double n_min{};
    double b_coupling_sq{};  // optimal (B~|a_bar|)^2
    double a_tilde_over_b_tilde{};
    bool interior{true};  // false: minimum sits at zero coupling
};

namespace detail {

// Minimizes gamma n_th / (gamma + c x) + x/4 over x = B~^2|a_bar|^2 >= 0, where
// c x is the cooling rate at the optimal detuning.
inline CouplingOptimum minimize_thermal_plus_floor(const SystemParams& p, double c) {
    CouplingOptimum o;
    if (p.n_th == 0.0) {
        o.n_min = 0.0;
        o.b_coupling_sq = 0.0;
        o.interior = false;
        return o;
    }
    o.b_coupling_sq = std::sqrt(4 * p.gamma * p.n_th / c) - p.gamma / c;
    o.n_min = std::sqrt(p.gamma * p.n_th / c) - p.gamma / (4 * c);
    if (!(o.b_coupling_sq > 0))
        throw PhysicsError(PhysicsError::Kind::NoInteriorMinimum,
                           "no interior minimum in validity regime");
    return o;
}

} // namespace detail

/// Purely dissipative coupling at delta = omega_m/2.
inline CouplingOptimum n_min_dissipative(const SystemParams& p) {
    p.validate();
    const double r = p.kappa * p.kappa / (p.omega_m * p.omega_m);
    // cooling rate per unit B~^2|a_bar|^2
    const double c = 4 * p.kappa / (r + 9);
    CouplingOptimum o = detail::minimize_thermal_plus_floor(p, c);
    o.a_tilde_over_b_tilde = 0.0;
    return o;
}

/// Mixed coupling with A~ kappa = -3 B~ omega_m / 2, so the optimal detuning is -omega_m.
inline CouplingOptimum n_min_mixed(const SystemParams& p) {
    p.validate();
    const double r = p.kappa * p.kappa / (p.omega_m * p.omega_m);
    const double c = 4 * p.kappa / r;
    CouplingOptimum o = detail::minimize_thermal_plus_floor(p, c);
    o.a_tilde_over_b_tilde = -1.5 * p.omega_m / p.kappa;
    return o;
}

/// Quantum-noise floor for purely dispersive cooling at delta = -omega_m.
inline double n_min_dispersive_limit(const SystemParams& p) {
    p.validate();
    return p.kappa * p.kappa / (16 * p.omega_m * p.omega_m);
}

} // namespace optocool
