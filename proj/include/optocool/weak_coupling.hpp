// weak_coupling.hpp: force spectra, quantum-noise rates and phonon number
//
// Spectra are returned pre-multiplied by x0^2, i.e. in units of a rate. They
// are written in terms of a = A~|a_bar| and b = B~|a_bar| so that the purely
// dispersive limit b -> 0 is the same polynomial, with no division by B~.

#pragma once

#include "optocool/params.hpp"

namespace optocool {

namespace detail {

inline double cavity_denominator(const SystemParams& p, double omega) {
    const double s = omega + p.delta;
    return p.kappa * p.kappa / 4 + s * s;
}

} // namespace detail

/// x0^2 S_FF(omega) for the single-port model. Fano zero at
/// omega = -2 delta + 2 A~ kappa / B~.
inline double force_spectrum_main(const SystemParams& p, double omega) {
    const double a = p.dispersive_coupling();
    const double b = p.dissipative_coupling();
    const double k = p.kappa;
    const double num = b * (omega + 2 * p.delta) - 2 * a * k;
    return 0.25 * k * num * num / detail::cavity_denominator(p, omega);
}

/// Drive-port linewidth modulated; the internal channel adds a Lorentzian pedestal.
inline double force_spectrum_case1(const SystemParams& p, const LossSplit& split, double omega) {
    split.validate(p);
    const double a = p.dispersive_coupling();
    const double b = p.dissipative_coupling();
    const double k = p.kappa;
    const double fano = b * (omega + 2 * p.delta) - 2 * a * k;
    const double ped = b * p.delta - 2 * a * k;
    const double num = split.kappa_ext * fano * fano + split.kappa_0 * (ped * ped + b * b * k * k / 4);
    return 0.25 * num / detail::cavity_denominator(p, omega);
}

/// Internal linewidth modulated. Flat in omega for A~ = 0.
inline double force_spectrum_case2(const SystemParams& p, const LossSplit& split, double omega) {
    split.validate(p);
    const double a = p.dispersive_coupling();
    const double b = p.dissipative_coupling();
    const double k = p.kappa;
    const double s = omega + p.delta;
    const double fano = b * s - 2 * a * k;
    const double num = split.kappa_0 * (fano * fano + b * b * k * k / 4)
                       + split.kappa_ext * (2 * a * k) * (2 * a * k);
    // Same summation order as the denominator, so A~ = 0 cancels exactly.
    const double den = s * s + k * k / 4;
    return 0.25 * num / den;
}

inline double force_spectrum(const SystemParams& p, const LossSplit& split, double omega) {
    switch (split.modulated_channel) {
    case ModulatedChannel::MainText:
        split.validate(p);
        return force_spectrum_main(p, omega);
    case ModulatedChannel::Case1External: return force_spectrum_case1(p, split, omega);
    case ModulatedChannel::Case2Internal: return force_spectrum_case2(p, split, omega);
    }
    return 0.0;
}

/// Detuning that puts the Fano zero at omega = -omega_m.
inline double optimal_detuning(const SystemParams& p) {
    if (p.b_tilde == 0.0)
        throw PhysicsError(PhysicsError::Kind::UndefinedForDispersive,
                           "optimal detuning undefined for purely dispersive coupling");
    return p.omega_m / 2 + p.kappa * p.a_tilde / p.b_tilde;
}

struct RateSet {
    double gamma_up{};    // amplification, x0^2 S_FF(-omega_m)
    double gamma_down{};  // cooling, x0^2 S_FF(+omega_m)
    double gamma_eff{};   // gamma + down - up

    bool net_damping() const noexcept { return gamma_eff > 0; }
};

inline RateSet quantum_noise_rates(const SystemParams& p, const LossSplit& split) {
    RateSet r;
    r.gamma_up = force_spectrum(p, split, -p.omega_m);
    r.gamma_down = force_spectrum(p, split, p.omega_m);
    r.gamma_eff = p.gamma + r.gamma_down - r.gamma_up;
    return r;
}

inline RateSet quantum_noise_rates(const SystemParams& p) {
    return quantum_noise_rates(p, LossSplit::main_text(p));
}

inline double phonon_number_qn(const SystemParams& p, const LossSplit& split) {
    const RateSet r = quantum_noise_rates(p, split);
    if (!(r.gamma_eff > 0))
        throw PhysicsError(PhysicsError::Kind::QuantumNoiseUnstable, "quantum-noise unstable");
    return (p.gamma * p.n_th + r.gamma_up) / r.gamma_eff;
}

inline double phonon_number_qn(const SystemParams& p) {
    return phonon_number_qn(p, LossSplit::main_text(p));
}

} // namespace optocool
