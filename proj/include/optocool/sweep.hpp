// sweep.hpp: parameter sweeps and minimization of the phonon number
//
// Stability is always judged by the exact drift matrix. Points where the
// weak-coupling damping disagrees with it are marked tier-discrepant.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optocool/analytic.hpp"
#include "optocool/exact.hpp"
#include "optocool/linear_system.hpp"
#include "optocool/optimize.hpp"
#include "optocool/parallel.hpp"
#include "optocool/weak_coupling.hpp"

namespace optocool {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SweepResult {
    std::string axis_name;
    std::vector<double> axis_values;
    std::vector<std::pair<std::string, std::vector<double>>> traces;
    std::vector<bool> stable;           // per point; false => trace values are NaN
    std::vector<bool> tier_discrepant;  // exact and weak-coupling stability disagree
    SystemParams fixed_params;
    std::string swept_field;

    const std::vector<double>& trace(const std::string& name) const {
        for (const auto& [n, v] : traces)
            if (n == name) return v;
        throw std::out_of_range("no trace named " + name);
    }
};

// ---------------------------------------------------------------------------
// Pointwise tier evaluation

struct TierPoint {
    bool stable{false};
    bool discrepant{false};
    double n_qn{kNaN};
    double n_analytic{kNaN};
    double term_thermal{kNaN};
    double term_qn_like{kNaN};
    double term_beyond{kNaN};
    double gamma_eff{kNaN};
    double n_exact{kNaN};
};

inline TierPoint evaluate_tiers(const SystemParams& p, bool include_exact) {
    TierPoint t;
    const LinearSystem sys = build_linear_system(p);
    t.stable = is_stable(sys);
    const RateSet r = quantum_noise_rates(p);
    t.discrepant = t.stable != (r.gamma_eff > 0);
    if (!t.stable) return t;
    t.gamma_eff = r.gamma_eff;
    if (r.gamma_eff > 0) {
        const PhononResult a = phonon_number_analytic(p);
        t.n_qn = a.n_qn;
        t.n_analytic = a.n_analytic;
        t.term_thermal = a.term_thermal;
        t.term_qn_like = a.term_qn_like;
        t.term_beyond = a.term_beyond;
    }
    if (include_exact) t.n_exact = steady_state(sys).phonon_number();
    return t;
}

namespace detail {

inline SweepResult collect_tiers(std::string axis, const std::vector<double>& grid,
                                 const std::vector<TierPoint>& pts, bool include_exact) {
    SweepResult out;
    out.axis_name = std::move(axis);
    out.axis_values = grid;
    const std::size_t n = grid.size();
    std::vector<double> qn(n), an(n), t1(n), t2(n), t3(n), ge(n), ex(n);
    for (std::size_t i = 0; i < n; ++i) {
        qn[i] = pts[i].n_qn;
        an[i] = pts[i].n_analytic;
        t1[i] = pts[i].term_thermal;
        t2[i] = pts[i].term_qn_like;
        t3[i] = pts[i].term_beyond;
        ge[i] = pts[i].gamma_eff;
        ex[i] = pts[i].n_exact;
        out.stable.push_back(pts[i].stable);
        out.tier_discrepant.push_back(pts[i].discrepant);
    }
    out.traces = {{"n_qn", qn},          {"n_analytic", an}, {"term_thermal", t1},
                  {"term_qn_like", t2},  {"term_beyond", t3}, {"gamma_eff", ge}};
    if (include_exact) out.traces.emplace_back("n_exact", ex);
    return out;
}

inline void validate_axis(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw ValidationError(name, "grid is empty");
    for (double v : grid)
        if (!std::isfinite(v)) throw ValidationError(name, "non-finite grid value");
}

} // namespace detail

struct SweepOptions {
    bool include_exact{true};
    ParallelOptions parallel{};
};

inline SweepResult sweep_detuning(const SystemParams& params, const std::vector<double>& delta_grid,
                                  SweepOptions opts = {}) {
    params.validate();
    detail::validate_axis(delta_grid, "delta_grid");
    const auto pts = parallel_map(
        delta_grid, [&](double d) { return evaluate_tiers(params.with_delta(d), opts.include_exact); },
        opts.parallel);
    SweepResult out = detail::collect_tiers("delta", delta_grid, pts, opts.include_exact);
    out.fixed_params = params;
    out.swept_field = "delta";
    return out;
}

inline SweepResult sweep_coupling(const SystemParams& params, const std::vector<double>& coupling_grid,
                                  CouplingAxis which, SweepOptions opts = {}) {
    params.validate();
    detail::validate_axis(coupling_grid, "coupling_grid");
    const auto pts = parallel_map(
        coupling_grid,
        [&](double g) { return evaluate_tiers(with_axis_coupling(params, which, g), opts.include_exact); },
        opts.parallel);
    const char* name = which == CouplingAxis::Dissipative ? "Ba" : "Aa";
    SweepResult out = detail::collect_tiers(name, coupling_grid, pts, opts.include_exact);
    out.fixed_params = params;
    out.swept_field = name;
    return out;
}

// ---------------------------------------------------------------------------
// Minimization

enum class FreeVar { Delta, ACoupling, BCoupling };
enum class Objective { QuantumNoise, Analytic, Simplified, Exact };

inline const char* to_string(Objective o) {
    switch (o) {
    case Objective::QuantumNoise: return "qn";
    case Objective::Analytic: return "analytic";
    case Objective::Simplified: return "simplified";
    case Objective::Exact: return "exact";
    }
    return "?";
}

struct MinimizeOptions {
    Objective objective{Objective::Analytic};
    bool delta_at_optimum{false};      // delta follows omega_m/2 + kappa A~/B~
    std::optional<double> a_over_b;     // with only B free: A~|a| = ratio * B~|a|
    double delta_min{-2.0};             // units of omega_m
    double delta_max{2.0};
    double coupling_min{1e-4};
    double coupling_max{10.0};
    std::size_t coarse_points{60};
    double rel_tol{1e-10};
};

struct MinimizeResult {
    SystemParams optimum;
    double n_min{};
    double coarse_min{};
    std::size_t evaluations{};
};

/// Phonon number at p for the chosen tier; +inf where the point is unstable
/// (exact criterion) or the tier is undefined.
inline double objective_value(const SystemParams& p, Objective obj) {
    try {
        const LinearSystem sys = build_linear_system(p);
        if (!is_stable(sys)) return std::numeric_limits<double>::infinity();
        switch (obj) {
        case Objective::QuantumNoise: return phonon_number_qn(p);
        case Objective::Analytic: return phonon_number_analytic(p).n_analytic;
        case Objective::Simplified: return phonon_number_simplified(p);
        case Objective::Exact: return steady_state(sys).phonon_number();
        }
    } catch (const PhysicsError&) {
    }
    return std::numeric_limits<double>::infinity();
}

namespace detail {

struct SearchAxis {
    std::vector<double> grid;  // sorted
};

} // namespace detail

/// Coarse grid scan over at most two free variables followed by coordinate-wise
/// golden-section refinement. When both couplings are free the search runs
/// over (B~|a|, A~/B~), which decouples the two directions at a fixed detuning
/// offset.
inline MinimizeResult minimize_phonon(const SystemParams& params, const std::vector<FreeVar>& free_vars,
                                      const MinimizeOptions& opts = {}) {
    params.validate();
    if (free_vars.empty() || free_vars.size() > 2)
        throw ValidationError("free", "between one and two free variables are required");
    if (opts.coarse_points < 50) throw ValidationError("coarse_points", "must be >= 50");
    if (!(opts.coupling_min > 0) || !(opts.coupling_max > opts.coupling_min))
        throw ValidationError("coupling_max", "need 0 < coupling_min < coupling_max");
    if (!(opts.delta_max > opts.delta_min)) throw ValidationError("delta_max", "need delta_min < delta_max");
    auto has = [&](FreeVar v) { return std::find(free_vars.begin(), free_vars.end(), v) != free_vars.end(); };
    const bool free_delta = has(FreeVar::Delta);
    const bool free_a = has(FreeVar::ACoupling);
    const bool free_b = has(FreeVar::BCoupling);
    if (free_vars.size() == 2 && free_vars[0] == free_vars[1])
        throw ValidationError("free", "duplicate free variable");
    if (free_delta && opts.delta_at_optimum)
        throw ValidationError("free", "delta cannot be free while tied to the optimal detuning");
    if (opts.a_over_b && free_a) throw ValidationError("a_over_b", "ratio tie needs A coupling fixed");

    const std::size_t N = opts.coarse_points;
    const std::vector<double> mags = logspace(opts.coupling_min, opts.coupling_max, N);
    const double wm = params.omega_m;
    const double k = params.kappa;

    std::vector<detail::SearchAxis> axes;
    enum class Role { Delta, A, B, Ratio };
    std::vector<Role> roles;
    if (free_delta) {
        axes.push_back({linspace(opts.delta_min * wm, opts.delta_max * wm, 2 * N + 1)});
        roles.push_back(Role::Delta);
    }
    if (free_a && free_b) {
        axes.push_back({mags});
        roles.push_back(Role::B);
        axes.push_back({linspace(-3 * wm / k, 3 * wm / k, 2 * N + 1)});
        roles.push_back(Role::Ratio);
    } else if (free_a) {
        std::vector<double> g;
        for (auto it = mags.rbegin(); it != mags.rend(); ++it) g.push_back(-*it);
        g.push_back(0.0);
        g.insert(g.end(), mags.begin(), mags.end());
        axes.push_back({g});
        roles.push_back(Role::A);
    } else if (free_b) {
        std::vector<double> g{0.0};
        g.insert(g.end(), mags.begin(), mags.end());
        axes.push_back({g});
        roles.push_back(Role::B);
    }

    std::size_t evaluations = 0;
    auto to_params = [&](const std::vector<double>& x) {
        double a = params.dispersive_coupling();
        double b = params.dissipative_coupling();
        double d = params.delta;
        double ratio = 0.0;
        bool have_ratio = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            switch (roles[i]) {
            case Role::Delta: d = x[i]; break;
            case Role::A: a = x[i]; break;
            case Role::B: b = x[i]; break;
            case Role::Ratio: ratio = x[i]; have_ratio = true; break;
            }
        }
        if (have_ratio) a = ratio * b;
        else if (opts.a_over_b && free_b) a = *opts.a_over_b * b;
        SystemParams p = params.with_couplings(a, b);
        p.delta = d;
        return p;
    };
    auto F = [&](const std::vector<double>& x) {
        ++evaluations;
        SystemParams p = to_params(x);
        if (opts.delta_at_optimum) {
            if (p.b_tilde == 0.0) return std::numeric_limits<double>::infinity();
            p.delta = optimal_detuning(p);
        }
        return objective_value(p, opts.objective);
    };

    // Coarse scan.
    std::vector<std::size_t> best_idx(axes.size(), 0);
    double coarse_min = std::numeric_limits<double>::infinity();
    {
        std::vector<double> x(axes.size());
        if (axes.size() == 1) {
            for (std::size_t i = 0; i < axes[0].grid.size(); ++i) {
                x[0] = axes[0].grid[i];
                const double f = F(x);
                if (f < coarse_min) {
                    coarse_min = f;
                    best_idx[0] = i;
                }
            }
        } else {
            for (std::size_t i = 0; i < axes[0].grid.size(); ++i)
                for (std::size_t j = 0; j < axes[1].grid.size(); ++j) {
                    x[0] = axes[0].grid[i];
                    x[1] = axes[1].grid[j];
                    const double f = F(x);
                    if (f < coarse_min) {
                        coarse_min = f;
                        best_idx = {i, j};
                    }
                }
        }
    }
    if (!std::isfinite(coarse_min))
        throw PhysicsError(PhysicsError::Kind::NoFeasiblePoint, "no stable feasible point");

    // Refinement.
    std::vector<double> x(axes.size()), h(axes.size()), lo(axes.size()), hi(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto& g = axes[i].grid;
        const std::size_t j = best_idx[i];
        x[i] = g[j];
        lo[i] = g.front();
        hi[i] = g.back();
        const double left = j > 0 ? g[j] - g[j - 1] : 0.0;
        const double right = j + 1 < g.size() ? g[j + 1] - g[j] : 0.0;
        h[i] = std::max(left, right);
    }
    double f = coarse_min;
    const int max_sweeps = axes.size() == 1 ? 1 : 1000;
    int quiet_sweeps = 0;
    for (int sweep = 0; sweep < max_sweeps && f > 0.0; ++sweep) {
        const double f_start = f;
        bool at_floor = true;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const double floor_h = 1e-10 * std::max(std::abs(x[i]), 1e-12);
            for (int expand = 0; expand < 40; ++expand) {
                const double a = std::max(lo[i], x[i] - h[i]);
                const double b = std::min(hi[i], x[i] + h[i]);
                auto line = [&](double t) {
                    std::vector<double> y = x;
                    y[i] = t;
                    return F(y);
                };
                const double tol = 1e-13 * (std::abs(x[i]) + h[i]);
                const Minimum1D m = golden_section(line, a, b, tol);
                const double moved = std::abs(m.x - x[i]);
                if (m.f < f) {
                    x[i] = m.x;
                    f = m.f;
                }
                const double edge_tol = 1e-6 * (b - a);
                const bool hit_edge = (m.x - a < edge_tol && a > lo[i]) || (b - m.x < edge_tol && b < hi[i]);
                if (hit_edge && moved > 0) {
                    h[i] *= 2;
                    continue;
                }
                h[i] = std::max({4 * moved, 0.25 * h[i], floor_h});
                break;
            }
            if (h[i] > floor_h * 1.0000001) at_floor = false;
        }
        const double gain = f_start - f;
        quiet_sweeps = gain <= opts.rel_tol * 1e-4 * std::abs(f) ? quiet_sweeps + 1 : 0;
        if (at_floor && gain <= 1e-15 * std::abs(f)) break;
        if (quiet_sweeps >= 25) break;
    }

    MinimizeResult out;
    out.optimum = to_params(x);
    if (opts.delta_at_optimum) out.optimum.delta = optimal_detuning(out.optimum);
    out.n_min = f;
    out.coarse_min = coarse_min;
    out.evaluations = evaluations;
    return out;
}

// ---------------------------------------------------------------------------
// Minimal phonon number versus sideband parameter

enum class CouplingMode { Dissipative, Dispersive, Mixed };

inline const char* to_string(CouplingMode m) {
    switch (m) {
    case CouplingMode::Dissipative: return "dissipative";
    case CouplingMode::Dispersive: return "dispersive";
    case CouplingMode::Mixed: return "mixed";
    }
    return "?";
}

struct SidebandOptions {
    bool optimize_exact{true};
    MinimizeOptions minimize{};  // objective/free vars are set per mode
    ParallelOptions parallel{};
};

/// Parameters at a given omega_m/kappa, keeping n_th and kappa/gamma of `base`.
inline SystemParams at_sideband(const SystemParams& base, double omega_m_over_kappa) {
    SystemParams p = base.normalized();
    const double kappa_over_gamma = p.kappa / p.gamma;
    p.kappa = 1.0 / omega_m_over_kappa;
    p.gamma = p.kappa / kappa_over_gamma;
    return p;
}

/// Traces: n_min_closed (closed form), n_min_exact (exact tier, optimized
/// coupling), coupling_exact, and for the dissipative mode the large
/// omega_m/kappa asymptote. `stable` marks points where the optimizer succeeded.
inline SweepResult sweep_sideband_minimum(const SystemParams& base, const std::vector<double>& sideband_grid,
                                          CouplingMode mode, SidebandOptions opts = {}) {
    base.validate();
    detail::validate_axis(sideband_grid, "sideband_grid");
    for (double s : sideband_grid)
        if (!(s > 0)) throw ValidationError("sideband_grid", "omega_m/kappa must be > 0");

    struct Row {
        double closed{kNaN}, asymptote{kNaN}, exact{kNaN}, coupling{kNaN}, delta{kNaN};
        bool ok{true};
    };
    const auto rows = parallel_map(
        sideband_grid,
        [&](double s) {
            Row r;
            const SystemParams p = at_sideband(base, s);
            try {
                switch (mode) {
                case CouplingMode::Dissipative: {
                    r.closed = n_min_dissipative(p).n_min;
                    const double gk = p.gamma / p.kappa;
                    r.asymptote = std::sqrt(9 * gk * p.n_th / 4) - 9 * gk / 16;
                    break;
                }
                case CouplingMode::Mixed: r.closed = n_min_mixed(p).n_min; break;
                case CouplingMode::Dispersive: r.closed = n_min_dispersive_limit(p); break;
                }
            } catch (const PhysicsError&) {
                r.ok = false;
            }
            if (!opts.optimize_exact) return r;
            MinimizeOptions mo = opts.minimize;
            mo.objective = Objective::Exact;
            mo.delta_at_optimum = false;
            mo.a_over_b.reset();
            std::vector<FreeVar> free;
            SystemParams start = p;
            switch (mode) {
            case CouplingMode::Dissipative:
                start = p.with_couplings(0.0, 0.0).with_delta(0.5 * p.omega_m);
                free = {FreeVar::BCoupling};
                break;
            case CouplingMode::Mixed:
                start = p.with_couplings(0.0, 0.0).with_delta(-p.omega_m);
                mo.a_over_b = -1.5 * p.omega_m / p.kappa;
                free = {FreeVar::BCoupling};
                break;
            case CouplingMode::Dispersive:
                start = p.with_couplings(0.0, 0.0);
                mo.delta_min = -2.0;
                mo.delta_max = 0.0;
                free = {FreeVar::Delta, FreeVar::ACoupling};
                break;
            }
            try {
                const MinimizeResult m = minimize_phonon(start, free, mo);
                r.exact = m.n_min;
                r.coupling = mode == CouplingMode::Dispersive ? m.optimum.dispersive_coupling()
                                                              : m.optimum.dissipative_coupling();
                r.delta = m.optimum.delta;
            } catch (const PhysicsError&) {
                r.ok = false;
            }
            return r;
        },
        opts.parallel);

    SweepResult out;
    out.axis_name = "omega_m_over_kappa";
    out.axis_values = sideband_grid;
    out.fixed_params = base;
    out.swept_field = "kappa";
    const std::size_t n = rows.size();
    std::vector<double> closed(n), asym(n), exact(n), coupling(n), delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        closed[i] = rows[i].closed;
        asym[i] = rows[i].asymptote;
        exact[i] = rows[i].exact;
        coupling[i] = rows[i].coupling;
        delta[i] = rows[i].delta;
        out.stable.push_back(rows[i].ok);
        out.tier_discrepant.push_back(false);
    }
    out.traces.emplace_back("n_min_closed", closed);
    if (mode == CouplingMode::Dissipative) out.traces.emplace_back("n_min_asymptote", asym);
    if (opts.optimize_exact) {
        out.traces.emplace_back("n_min_exact", exact);
        out.traces.emplace_back("coupling_exact", coupling);
        out.traces.emplace_back("delta_exact", delta);
    }
    return out;
}

} // namespace optocool
