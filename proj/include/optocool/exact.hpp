// exact.hpp: exact steady state of the linearized model
//
// Spectra use S_AB(w) = int dt e^{iwt} <A(t) B(0)>, with operators in time
// written as v(t) = int dw/2pi e^{-iwt} v(w). The Fourier-transformed equations
// give v(w) = T(w) xi(w) with T(w) = (-iw - A)^{-1} L, and for white inputs
//
//     int dt e^{iwt} <v_i(t) v_j(0)^dag> = [T(w) N T(w)^dag]_ij,
//
// where N = diag(1, 0, n_th + 1, n_th) holds <xi_k xi_k^dag>. The mechanical
// spectrum S_cc(w) = int e^{iwt} <c^dag(t) c(0)> is the (c^dag, c^dag) entry.
// Integrating over w/2pi gives the equal-time covariance W = <v v^dag>, which
// solves A W + W A^dag + L N L^dag = 0.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optocool/analytic.hpp"
#include "optocool/linear_system.hpp"
#include "optocool/parallel.hpp"
#include "optocool/weak_coupling.hpp"

namespace optocool {

enum class Observable { Scc, SddOut, SccApprox, ForceSpectrum };
enum class Tier { QuantumNoise, Analytic, Exact };

inline const char* to_string(Observable o) {
    switch (o) {
    case Observable::Scc: return "scc";
    case Observable::SddOut: return "sdd_out";
    case Observable::SccApprox: return "scc_approx";
    case Observable::ForceSpectrum: return "force";
    }
    return "?";
}

inline const char* to_string(Tier t) {
    switch (t) {
    case Tier::QuantumNoise: return "qn";
    case Tier::Analytic: return "analytic";
    case Tier::Exact: return "exact";
    }
    return "?";
}

struct SpectrumTrace {
    std::vector<double> omega_grid;
    std::vector<double> values;
    Observable observable{Observable::Scc};
    Tier tier{Tier::Exact};
};

inline void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("omega_grid", "grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ValidationError("omega_grid", "non-finite grid value");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ValidationError("omega_grid", "grid must be strictly increasing");
    }
}

/// Condition number above which a per-frequency solve is rejected.
inline constexpr double kMaxCondition = 1e12;

/// T(w) = (-iw - A)^{-1} L. Throws IllConditioned when the resolvent is
/// numerically singular at w.
inline Matrix4c transfer_matrix(const LinearSystem& sys, double omega) {
    const Matrix4c M = cplx(0.0, -omega) * Matrix4c::Identity() - sys.drift;
    const Eigen::PartialPivLU<Matrix4c> lu(M);
    const double rcond = lu.rcond();
    if (!(rcond >= 1.0 / kMaxCondition)) {
        std::ostringstream msg;
        msg << "ill-conditioned solve at omega = " << omega << " (condition estimate " << 1.0 / rcond << ")";
        throw PhysicsError(PhysicsError::Kind::IllConditioned, msg.str());
    }
    return lu.solve(sys.noise_input);
}

namespace detail {

inline double contract(const Eigen::Matrix<cplx, 1, 4>& row, const Matrix4c& correlators) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += correlators(k, k).real() * std::norm(row(k));
    return s;
}

} // namespace detail

/// Exact mechanical spectrum at one frequency.
inline double exact_scc(const LinearSystem& sys, double omega) {
    const Matrix4c T = transfer_matrix(sys, omega);
    return detail::contract(T.row(idx::c_dag), sys.correlators);
}

/// Normal-ordered output spectrum. d_out = d_in + sqrt(k) d + sqrt(k)(b/2)(c + c^dag);
/// the row used here is that of d_out^dag. The d_in^dag term carries zero weight.
inline double exact_sdd_out(const LinearSystem& sys, double omega) {
    const Matrix4c T = transfer_matrix(sys, omega);
    const double sk = std::sqrt(sys.kappa);
    Eigen::Matrix<cplx, 1, 4> row =
        sk * T.row(idx::d_dag) + sk * (sys.b_coupling / 2) * (T.row(idx::c) + T.row(idx::c_dag));
    row(idx::d_dag) += 1.0;
    return detail::contract(row, sys.correlators);
}

inline void require_stable(const LinearSystem& sys) {
    const StabilityReport r = stability(sys);
    if (!r.stable) {
        std::ostringstream msg;
        msg << "unstable system (spectral abscissa " << r.spectral_abscissa << ")";
        throw PhysicsError(PhysicsError::Kind::Unstable, msg.str());
    }
}

inline SpectrumTrace spectrum_exact(const SystemParams& params, Observable observable,
                                    const std::vector<double>& omega_grid,
                                    ParallelOptions opts = {}) {
    validate_grid(omega_grid);
    if (observable != Observable::Scc && observable != Observable::SddOut)
        throw ValidationError("observable", "exact tier provides scc and sdd_out");
    const LinearSystem sys = build_linear_system(params);
    require_stable(sys);

    SpectrumTrace trace;
    trace.omega_grid = omega_grid;
    trace.observable = observable;
    trace.tier = Tier::Exact;
    trace.values = parallel_map(
        omega_grid,
        [&](double w) { return observable == Observable::Scc ? exact_scc(sys, w) : exact_sdd_out(sys, w); },
        opts);
    return trace;
}

/// Approximate mechanical spectrum (analytic tier), or the quantum-noise version in which
/// the force spectrum is frozen at its value at -omega_m.
inline SpectrumTrace spectrum_approx(const SystemParams& params, Tier tier,
                                     const std::vector<double>& omega_grid) {
    validate_grid(omega_grid);
    const RateSet rates = detail::require_damped(params);
    SpectrumTrace trace;
    trace.omega_grid = omega_grid;
    trace.observable = Observable::SccApprox;
    trace.tier = tier;
    trace.values.reserve(omega_grid.size());
    for (double w : omega_grid) {
        if (tier == Tier::QuantumNoise) {
            const double chi2 = std::norm(effective_susceptibility(params, rates, -w));
            trace.values.push_back(chi2 * (params.gamma * params.n_th + rates.gamma_up));
        } else {
            trace.values.push_back(mechanical_spectrum_approx(params, rates, w));
        }
    }
    return trace;
}

inline SpectrumTrace spectrum_force(const SystemParams& params, const LossSplit& split,
                                    const std::vector<double>& omega_grid) {
    validate_grid(omega_grid);
    split.validate(params);
    SpectrumTrace trace;
    trace.omega_grid = omega_grid;
    trace.observable = Observable::ForceSpectrum;
    trace.tier = Tier::QuantumNoise;
    for (double w : omega_grid) trace.values.push_back(force_spectrum(params, split, w));
    return trace;
}

struct SteadyState {
    Matrix4c covariance;  // W_ij = <v_i v_j^dag>
    double phonon_number() const { return covariance(idx::c_dag, idx::c_dag).real(); }
    double photon_number() const { return covariance(idx::d_dag, idx::d_dag).real(); }
};

/// Solves A W + W A^dag + L N L^dag = 0 by vectorizing into a 16x16 system.
inline SteadyState steady_state(const LinearSystem& sys) {
    const StabilityReport st = stability(sys);
    if (!st.stable) {
        std::ostringstream msg;
        msg << "unstable system (spectral abscissa " << st.spectral_abscissa << ")";
        throw PhysicsError(PhysicsError::Kind::Unstable, msg.str());
    }
    // Unique solution iff no lambda_i + conj(lambda_j) vanishes.
    const double scale = std::max(1.0, sys.drift.cwiseAbs().maxCoeff());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(st.eigenvalues(i) + std::conj(st.eigenvalues(j))) < 1e-12 * scale)
                throw PhysicsError(PhysicsError::Kind::LyapunovFailed, "Lyapunov solve failed");

    using Matrix16c = Eigen::Matrix<cplx, 16, 16>;
    using Vector16c = Eigen::Matrix<cplx, 16, 1>;
    const Matrix4c Id = Matrix4c::Identity();
    const Matrix4c Ac = sys.drift.conjugate();
    Matrix16c K;
    // Column-major vec: vec(A W) = (I (x) A) vec W, vec(W A^dag) = (conj(A) (x) I) vec W.
    for (int bi = 0; bi < 4; ++bi)
        for (int bj = 0; bj < 4; ++bj)
            K.block<4, 4>(4 * bi, 4 * bj) = Id(bi, bj) * sys.drift + Ac(bi, bj) * Id;
    const Matrix4c Q = sys.noise_input * sys.correlators * sys.noise_input.adjoint();
    const Vector16c rhs = -Eigen::Map<const Vector16c>(Q.data());
    const Vector16c w = K.fullPivLu().solve(rhs);

    SteadyState out;
    out.covariance = Eigen::Map<const Matrix4c>(w.data());
    return out;
}

inline double phonon_number_exact(const SystemParams& params) {
    return steady_state(build_linear_system(params)).phonon_number();
}

struct TierComparisonRow {
    double coupling{};
    bool stable{};
    std::optional<double> n_qn;
    std::optional<double> n_analytic;
    std::optional<double> n_exact;
};

enum class CouplingAxis { Dissipative, Dispersive };

inline SystemParams with_axis_coupling(const SystemParams& p, CouplingAxis axis, double value) {
    const double a = p.dispersive_coupling();
    const double b = p.dissipative_coupling();
    return axis == CouplingAxis::Dissipative ? p.with_couplings(a, value) : p.with_couplings(value, b);
}

/// Evaluates the three tiers on a coupling grid. Unstable points carry no values.
inline std::vector<TierComparisonRow> exact_vs_analytic_report(const SystemParams& params,
                                                               const std::vector<double>& coupling_grid,
                                                               CouplingAxis axis = CouplingAxis::Dissipative,
                                                               ParallelOptions opts = {}) {
    params.validate();
    return parallel_map(
        coupling_grid,
        [&](double g) {
            TierComparisonRow row;
            row.coupling = g;
            const SystemParams p = with_axis_coupling(params, axis, g);
            const LinearSystem sys = build_linear_system(p);
            row.stable = is_stable(sys);
            if (!row.stable) return row;
            row.n_exact = steady_state(sys).phonon_number();
            const RateSet r = quantum_noise_rates(p);
            if (r.gamma_eff > 0) {
                row.n_qn = phonon_number_qn(p);
                row.n_analytic = phonon_number_analytic(p).n_analytic;
            }
            return row;
        },
        opts);
}

} // namespace optocool
