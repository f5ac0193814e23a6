// params.hpp: parameter space of the dispersive/dissipative optomechanical model

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace optocool {

/// Bad input. `field()` names the offending parameter so the CLI can report it.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Physics failure: instability, ill-conditioning, undefined quantities.
class PhysicsError : public std::runtime_error {
public:
    enum class Kind {
        Unstable,
        IllConditioned,
        LyapunovFailed,
        QuantumNoiseUnstable,
        EffectiveDampingNonpositive,
        UndefinedForDispersive,
        NoInteriorMinimum,
        NoFeasiblePoint,
    };

    PhysicsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// All rates share the unit of `omega_m`. Couplings are dimensionless;
/// physics only sees the products a_tilde*a_bar and b_tilde*a_bar.
struct SystemParams {
    double omega_m{1.0};
    double kappa{0.2};
    double gamma{1e-5};
    double delta{0.5};    // drive minus cavity frequency
    double a_tilde{0.0};  // dispersive
    double b_tilde{0.0};  // dissipative
    double a_bar{1.0};    // |mean cavity amplitude|, gauge fixed real
    double n_th{0.0};

    double dispersive_coupling() const noexcept { return a_tilde * a_bar; }
    double dissipative_coupling() const noexcept { return b_tilde * a_bar; }

    void validate() const {
        auto finite = [](const char* name, double v) {
            if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
        };
        finite("omega_m", omega_m);
        finite("kappa", kappa);
        finite("gamma", gamma);
        finite("delta", delta);
        finite("a_tilde", a_tilde);
        finite("b_tilde", b_tilde);
        finite("a_bar", a_bar);
        finite("n_th", n_th);
        if (omega_m <= 0) throw ValidationError("omega_m", "must be > 0");
        if (kappa <= 0) throw ValidationError("kappa", "must be > 0");
        if (gamma <= 0) throw ValidationError("gamma", "must be > 0");
        if (a_bar < 0) throw ValidationError("a_bar", "must be >= 0");
        if (n_th < 0) throw ValidationError("n_th", "must be >= 0");
    }

    /// Rescales every rate so that omega_m == 1.
    SystemParams normalized() const {
        validate();
        SystemParams p = *this;
        p.kappa /= omega_m;
        p.gamma /= omega_m;
        p.delta /= omega_m;
        p.omega_m = 1.0;
        return p;
    }

    /// Builds parameters from the figure-caption style ratios. Couplings are
    /// given as products with |a_bar|, which is fixed to 1.
    static SystemParams from_ratios(double omega_m_over_kappa, double omega_m_over_gamma,
                                    double delta_over_omega_m, double a_coupling,
                                    double b_coupling, double n_th) {
        if (!(omega_m_over_kappa > 0))
            throw ValidationError("omega_m_over_kappa", "must be > 0");
        if (!(omega_m_over_gamma > 0))
            throw ValidationError("omega_m_over_gamma", "must be > 0");
        SystemParams p;
        p.omega_m = 1.0;
        p.kappa = 1.0 / omega_m_over_kappa;
        p.gamma = 1.0 / omega_m_over_gamma;
        p.delta = delta_over_omega_m;
        p.a_tilde = a_coupling;
        p.b_tilde = b_coupling;
        p.a_bar = 1.0;
        p.n_th = n_th;
        p.validate();
        return p;
    }

    SystemParams with_couplings(double a_coupling, double b_coupling) const {
        SystemParams p = *this;
        p.a_tilde = a_coupling;
        p.b_tilde = b_coupling;
        p.a_bar = 1.0;
        return p;
    }

    SystemParams with_delta(double d) const {
        SystemParams p = *this;
        p.delta = d;
        return p;
    }
};

/// Which loss channel the displacement modulates.
enum class ModulatedChannel { MainText, Case1External, Case2Internal };

struct LossSplit {
    double kappa_ext{0.0};
    double kappa_0{0.0};
    ModulatedChannel modulated_channel{ModulatedChannel::MainText};

    static LossSplit main_text(const SystemParams& p) {
        return {p.kappa, 0.0, ModulatedChannel::MainText};
    }

    void validate(const SystemParams& p) const {
        if (!(kappa_ext >= 0)) throw ValidationError("kappa_ext", "must be >= 0");
        if (!(kappa_0 >= 0)) throw ValidationError("kappa_0", "must be >= 0");
        if (std::abs(kappa_ext + kappa_0 - p.kappa) > 1e-12 * p.kappa)
            throw ValidationError("kappa_ext", "kappa_ext + kappa_0 must equal kappa");
        if (modulated_channel == ModulatedChannel::MainText && kappa_0 != 0.0)
            throw ValidationError("kappa_0", "main-text loss model requires kappa_0 = 0");
    }
};

inline const char* to_string(ModulatedChannel c) {
    switch (c) {
    case ModulatedChannel::MainText: return "main";
    case ModulatedChannel::Case1External: return "case1";
    case ModulatedChannel::Case2Internal: return "case2";
    }
    return "?";
}

} // namespace optocool
