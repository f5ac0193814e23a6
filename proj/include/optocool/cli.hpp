// cli.hpp: command-line front end (spectrum, phonon, sweep, minimize, reproduce)
//
// Exit codes: 0 success, 2 usage or validation error, 3 physics error.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optocool/analytic.hpp"
#include "optocool/exact.hpp"
#include "optocool/format.hpp"
#include "optocool/linear_system.hpp"
#include "optocool/params.hpp"
#include "optocool/sweep.hpp"
#include "optocool/weak_coupling.hpp"

namespace optocool::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPhysics = 3;

/// Parameter flags as typed on the command line, before normalization.
struct RawParams {
    double omega_m{1.0};
    std::optional<double> kappa, omega_m_over_kappa;
    std::optional<double> gamma, omega_m_over_gamma;
    double delta{0.5};
    std::optional<double> a_tilde, b_tilde, a_bar, a_coupling, b_coupling;
    double n_th{0.0};
    std::string loss_model{"main"};
    double kappa_0{0.0};

    SystemParams resolve() const {
        SystemParams p;
        if (!(omega_m > 0)) throw ValidationError("omega-m", "must be > 0");
        p.omega_m = omega_m;
        if (kappa && omega_m_over_kappa)
            throw ValidationError("kappa", "give either --kappa or --omega-m-over-kappa");
        if (kappa) p.kappa = *kappa;
        else if (omega_m_over_kappa) {
            if (!(*omega_m_over_kappa > 0)) throw ValidationError("omega-m-over-kappa", "must be > 0");
            p.kappa = omega_m / *omega_m_over_kappa;
        } else throw ValidationError("kappa", "missing --kappa or --omega-m-over-kappa");
        if (gamma && omega_m_over_gamma)
            throw ValidationError("gamma", "give either --gamma or --omega-m-over-gamma");
        if (gamma) p.gamma = *gamma;
        else if (omega_m_over_gamma) {
            if (!(*omega_m_over_gamma > 0)) throw ValidationError("omega-m-over-gamma", "must be > 0");
            p.gamma = omega_m / *omega_m_over_gamma;
        } else throw ValidationError("gamma", "missing --gamma or --omega-m-over-gamma");
        p.delta = delta;
        p.n_th = n_th;

        if (a_tilde && a_coupling) throw ValidationError("Aa", "give either --A or --Aa");
        if (b_tilde && b_coupling) throw ValidationError("Ba", "give either --B or --Ba");
        p.a_bar = a_bar.value_or(1.0);
        if (!(p.a_bar >= 0)) throw ValidationError("abar", "must be >= 0");
        auto from_product = [&](double product, const char* field) {
            if (product == 0.0) return 0.0;
            if (p.a_bar == 0.0) throw ValidationError(field, "coupling product needs --abar > 0");
            return product / p.a_bar;
        };
        p.a_tilde = a_coupling ? from_product(*a_coupling, "Aa") : a_tilde.value_or(0.0);
        p.b_tilde = b_coupling ? from_product(*b_coupling, "Ba") : b_tilde.value_or(0.0);
        p.validate();
        return p.normalized();
    }

    LossSplit split(const SystemParams& p) const {
        LossSplit s;
        if (loss_model == "main") s.modulated_channel = ModulatedChannel::MainText;
        else if (loss_model == "case1") s.modulated_channel = ModulatedChannel::Case1External;
        else if (loss_model == "case2") s.modulated_channel = ModulatedChannel::Case2Internal;
        else throw ValidationError("loss-model", "expected main, case1 or case2");
        s.kappa_0 = kappa_0 / omega_m;
        s.kappa_ext = p.kappa - s.kappa_0;
        s.validate(p);
        return s;
    }
};

namespace detail {

inline void add_param_options(CLI::App* app, RawParams& r) {
    app->add_option("--omega-m", r.omega_m, "mechanical frequency (sets the rate unit)");
    app->add_option("--kappa", r.kappa, "cavity linewidth");
    app->add_option("--omega-m-over-kappa", r.omega_m_over_kappa, "sideband parameter");
    app->add_option("--gamma", r.gamma, "intrinsic mechanical damping");
    app->add_option("--omega-m-over-gamma", r.omega_m_over_gamma, "mechanical quality factor");
    app->add_option("--delta", r.delta, "detuning, same unit as --omega-m");
    app->add_option("--A", r.a_tilde, "dispersive coupling A~");
    app->add_option("--B", r.b_tilde, "dissipative coupling B~");
    app->add_option("--abar", r.a_bar, "mean cavity amplitude |a|");
    app->add_option("--Aa", r.a_coupling, "dispersive product A~|a|");
    app->add_option("--Ba", r.b_coupling, "dissipative product B~|a|");
    app->add_option("--nth", r.n_th, "thermal phonon occupation");
    app->add_option("--loss-model", r.loss_model, "main, case1 or case2");
    app->add_option("--kappa-0", r.kappa_0, "internal loss rate for case1/case2");
}

/// Flat "key = value" file. Keys match long flag names without dashes.
inline std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config", "expected key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        while (!key.empty() && key.front() == '-') key.erase(0, 1);
        kv[key] = value;
    }
    return kv;
}

inline const std::set<std::string>& flag_names() {
    static const std::set<std::string> flags{"log", "exact", "no-exact", "tie-delta"};
    return flags;
}

/// Expands `--config FILE` into flag tokens. Flags already present on the
/// command line win over the file.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::optional<std::string> config;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("config", "missing file name");
            config = args[++i];
            continue;
        }
        if (a.rfind("--config=", 0) == 0) {
            config = a.substr(9);
            continue;
        }
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
        out.push_back(a);
    }
    if (!config) return out;
    for (const auto& [key, value] : read_config(*config)) {
        if (given.count(key)) continue;
        if (flag_names().count(key)) {
            if (value == "true" || value == "1" || value.empty()) out.push_back("--" + key);
            continue;
        }
        out.push_back("--" + key);
        out.push_back(value);
    }
    return out;
}

inline std::vector<double> make_grid(double lo, double hi, int points, bool log_spaced, const char* field) {
    if (points < 1) throw ValidationError(field, "grid needs at least one point");
    if (points > 1 && !(hi > lo)) throw ValidationError(field, "need from < to");
    if (log_spaced) {
        if (!(lo > 0)) throw ValidationError(field, "log grid needs from > 0");
        return logspace(lo, hi, static_cast<std::size_t>(points));
    }
    return linspace(lo, hi, static_cast<std::size_t>(points));
}

class OutputSink {
public:
    OutputSink(std::ostream& fallback, const std::string& path) : fallback_(fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw ValidationError("output", "cannot open " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ostream& fallback_;
    std::ofstream file_;
};

inline nlohmann::json params_json(const SystemParams& p) {
    return {{"omega_m", p.omega_m},   {"kappa", p.kappa},
            {"gamma", p.gamma},       {"delta", p.delta},
            {"A", p.a_tilde},         {"B", p.b_tilde},
            {"abar", p.a_bar},        {"Aa", p.dispersive_coupling()},
            {"Ba", p.dissipative_coupling()}, {"nth", p.n_th}};
}

inline nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json trace_json(const std::string& name, const SpectrumTrace& t) {
    return {{"name", name},
            {"observable", to_string(t.observable)},
            {"tier", to_string(t.tier)},
            {"omega", t.omega_grid},
            {"values", t.values}};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands

struct SpectrumOptions {
    RawParams raw;
    std::string observable{"scc"};
    std::string tier{"exact"};
    double omega_min{-2.0};
    double omega_max{2.0};
    int points{4001};
    std::string format{"csv"};
    std::string output;
};

inline SpectrumTrace compute_spectrum(const SystemParams& p, const LossSplit& split, const std::string& observable,
                                      const std::string& tier, const std::vector<double>& grid,
                                      ParallelOptions par) {
    if (observable == "force") return spectrum_force(p, split, grid);
    if (split.modulated_channel != ModulatedChannel::MainText)
        throw ValidationError("loss-model", "only the force spectrum is available for case1/case2");
    if (observable == "scc") {
        if (tier == "exact") return spectrum_exact(p, Observable::Scc, grid, par);
        if (tier == "analytic") return spectrum_approx(p, Tier::Analytic, grid);
        if (tier == "qn") return spectrum_approx(p, Tier::QuantumNoise, grid);
        throw ValidationError("tier", "expected exact, analytic or qn");
    }
    if (observable == "sdd_out") {
        if (tier != "exact") throw ValidationError("tier", "sdd_out is available from the exact tier only");
        return spectrum_exact(p, Observable::SddOut, grid, par);
    }
    throw ValidationError("observable", "expected scc, sdd_out or force");
}

inline int cmd_spectrum(const SpectrumOptions& o, std::ostream& out) {
    const SystemParams p = o.raw.resolve();
    const LossSplit split = o.raw.split(p);
    if (o.format != "csv" && o.format != "json") throw ValidationError("format", "expected csv or json");
    const auto grid = detail::make_grid(o.omega_min / o.raw.omega_m, o.omega_max / o.raw.omega_m, o.points, false,
                                        "points");
    const SpectrumTrace t = compute_spectrum(p, split, o.observable, o.tier, grid, ParallelOptions::from_env());
    detail::OutputSink sink(out, o.output);
    if (o.format == "csv") write_csv(sink.stream(), t);
    else {
        nlohmann::json j{{"params", detail::params_json(p)},
                         {"traces", {detail::trace_json(o.observable + "_" + o.tier, t)}}};
        sink.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

struct PhononOptions {
    RawParams raw;
    std::string format{"text"};
};

inline nlohmann::json phonon_report(const SystemParams& p, const LossSplit& split) {
    nlohmann::json j;
    j["params"] = detail::params_json(p);
    j["loss_model"] = to_string(split.modulated_channel);
    const RateSet r = quantum_noise_rates(p, split);
    j["gamma_up"] = r.gamma_up;
    j["gamma_down"] = r.gamma_down;
    j["gamma_eff"] = r.gamma_eff;
    if (p.b_tilde == 0.0) {
        j["delta_opt"] = nullptr;
        j["delta_opt_note"] = "undefined for purely dispersive coupling";
    } else {
        j["delta_opt"] = optimal_detuning(p);
    }
    j["n_qn"] = r.gamma_eff > 0 ? nlohmann::json((p.gamma * p.n_th + r.gamma_up) / r.gamma_eff)
                                : nlohmann::json(nullptr);
    const bool main_model = split.modulated_channel == ModulatedChannel::MainText;
    if (main_model && r.gamma_eff > 0) {
        const PhononResult a = phonon_number_analytic(p);
        j["n_analytic"] = a.n_analytic;
        j["term_thermal"] = a.term_thermal;
        j["term_qn_like"] = a.term_qn_like;
        j["term_beyond"] = a.term_beyond;
    } else {
        j["n_analytic"] = nullptr;
    }
    const LinearSystem sys = build_linear_system(p);
    const StabilityReport st = stability(sys);
    j["stable"] = st.stable;
    j["spectral_abscissa"] = st.spectral_abscissa;
    j["n_exact"] = main_model && st.stable ? nlohmann::json(steady_state(sys).phonon_number())
                                           : nlohmann::json(nullptr);
    return j;
}

inline int cmd_phonon(const PhononOptions& o, std::ostream& out) {
    const SystemParams p = o.raw.resolve();
    const LossSplit split = o.raw.split(p);
    const nlohmann::json j = phonon_report(p, split);
    if (o.format == "json") {
        out << j.dump(2) << '\n';
    } else if (o.format == "text") {
        static const char* keys[] = {"n_qn",     "n_analytic", "term_thermal", "term_qn_like", "term_beyond",
                                     "n_exact",  "gamma_eff",  "gamma_up",     "gamma_down",   "delta_opt",
                                     "stable",   "spectral_abscissa"};
        for (const char* k : keys) {
            if (!j.contains(k)) continue;
            const auto& v = j[k];
            out << k << ": ";
            if (v.is_null()) out << (std::string(k) == "delta_opt" ? j["delta_opt_note"].get<std::string>() : "n/a");
            else if (v.is_boolean()) out << (v.get<bool>() ? "true" : "false");
            else out << format_double(v.get<double>());
            out << '\n';
        }
    } else {
        throw ValidationError("format", "expected text or json");
    }
    return j["stable"].get<bool>() ? kExitOk : kExitPhysics;
}

struct SweepCliOptions {
    RawParams raw;
    std::string axis{"delta"};
    double from{-2.0};
    double to{2.0};
    int points{2001};
    bool log_spaced{false};
    bool no_exact{false};
    std::string mode{"dissipative"};
    std::string output;
};

inline CouplingMode parse_mode(const std::string& m) {
    if (m == "dissipative") return CouplingMode::Dissipative;
    if (m == "dispersive") return CouplingMode::Dispersive;
    if (m == "mixed") return CouplingMode::Mixed;
    throw ValidationError("mode", "expected dissipative, dispersive or mixed");
}

inline SweepResult run_sweep(const SweepCliOptions& o) {
    const SystemParams p = o.raw.resolve();
    SweepOptions so;
    so.include_exact = !o.no_exact;
    so.parallel = ParallelOptions::from_env();
    if (o.axis == "delta") {
        const auto grid = detail::make_grid(o.from / o.raw.omega_m, o.to / o.raw.omega_m, o.points, o.log_spaced,
                                            "points");
        return sweep_detuning(p, grid, so);
    }
    if (o.axis == "Ba" || o.axis == "Aa") {
        const auto grid = detail::make_grid(o.from, o.to, o.points, o.log_spaced, "points");
        return sweep_coupling(p, grid, o.axis == "Ba" ? CouplingAxis::Dissipative : CouplingAxis::Dispersive, so);
    }
    if (o.axis == "sideband") {
        const auto grid = detail::make_grid(o.from, o.to, o.points, o.log_spaced, "points");
        SidebandOptions sb;
        sb.optimize_exact = !o.no_exact;
        sb.parallel = so.parallel;
        return sweep_sideband_minimum(p, grid, parse_mode(o.mode), sb);
    }
    throw ValidationError("axis", "expected delta, Ba, Aa or sideband");
}

inline int cmd_sweep(const SweepCliOptions& o, std::ostream& out) {
    const SweepResult r = run_sweep(o);
    detail::OutputSink sink(out, o.output);
    write_csv(sink.stream(), r);
    return kExitOk;
}

struct MinimizeCliOptions {
    RawParams raw;
    std::vector<std::string> free{"Ba"};
    std::string tier{"analytic"};
    bool tie_delta{false};
    double delta_min{-2.0};
    double delta_max{2.0};
    double coupling_min{1e-4};
    double coupling_max{10.0};
    int points{60};
    std::string format{"text"};
};

inline int cmd_minimize(const MinimizeCliOptions& o, std::ostream& out) {
    const SystemParams p = o.raw.resolve();
    std::vector<FreeVar> free;
    for (const auto& f : o.free) {
        if (f == "delta") free.push_back(FreeVar::Delta);
        else if (f == "Aa") free.push_back(FreeVar::ACoupling);
        else if (f == "Ba") free.push_back(FreeVar::BCoupling);
        else throw ValidationError("free", "expected delta, Aa or Ba");
    }
    MinimizeOptions mo;
    if (o.tier == "qn") mo.objective = Objective::QuantumNoise;
    else if (o.tier == "analytic") mo.objective = Objective::Analytic;
    else if (o.tier == "simplified") mo.objective = Objective::Simplified;
    else if (o.tier == "exact") mo.objective = Objective::Exact;
    else throw ValidationError("tier", "expected qn, analytic, simplified or exact");
    mo.delta_at_optimum = o.tie_delta;
    mo.delta_min = o.delta_min;
    mo.delta_max = o.delta_max;
    mo.coupling_min = o.coupling_min;
    mo.coupling_max = o.coupling_max;
    if (o.points < 0) throw ValidationError("points", "must be >= 50");
    mo.coarse_points = static_cast<std::size_t>(o.points);
    const MinimizeResult m = minimize_phonon(p, free, mo);
    nlohmann::json j{{"tier", o.tier},
                     {"n_min", m.n_min},
                     {"coarse_min", m.coarse_min},
                     {"evaluations", m.evaluations},
                     {"optimum", detail::params_json(m.optimum)}};
    if (o.format == "json") {
        out << j.dump(2) << '\n';
    } else if (o.format == "text") {
        out << "n_min: " << format_double(m.n_min) << '\n'
            << "delta: " << format_double(m.optimum.delta) << '\n'
            << "Aa: " << format_double(m.optimum.dispersive_coupling()) << '\n'
            << "Ba: " << format_double(m.optimum.dissipative_coupling()) << '\n'
            << "evaluations: " << m.evaluations << '\n';
    } else {
        throw ValidationError("format", "expected text or json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Figure reproduction

struct ReproduceOptions {
    std::string figure;
    std::string out_dir;
    int sideband_points{30};
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw ValidationError("out-dir", "cannot write " + path.string());
    f << content;
}

template <class T>
std::string to_csv(const T& data) {
    std::ostringstream os;
    write_csv(os, data);
    return os.str();
}

inline nlohmann::json ratio_params(double wm_over_kappa, double wm_over_gamma, double delta, double aa, double ba,
                                   double nth) {
    return {{"omega_m_over_kappa", wm_over_kappa}, {"omega_m_over_gamma", wm_over_gamma},
            {"delta_over_omega_m", delta},         {"Aa", aa},
            {"Ba", ba},                            {"nth", nth}};
}

} // namespace detail

/// Writes every trace of a figure plus manifest.json into `dir`.
/// Returns the list of files written (relative names).
inline std::vector<std::string> reproduce_figure(const std::string& id, const std::filesystem::path& dir,
                                                 ParallelOptions par, int sideband_points = 30) {
    static const std::set<std::string> known{"fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig3"};
    if (!known.count(id)) throw ValidationError("figure", "unknown figure id " + id);
    if (sideband_points < 2) throw ValidationError("sideband-points", "need at least two points");
    std::filesystem::create_directories(dir);

    nlohmann::json manifest;
    manifest["figure"] = id;
    manifest["frequency_unit"] = "omega_m";
    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& csv, nlohmann::json params) {
        detail::write_file(dir / name, csv);
        files.push_back(name);
        manifest["traces"].push_back({{"file", name}, {"parameters", std::move(params)}});
    };

    if (id == "fig1a") {
        const SystemParams p = SystemParams::from_ratios(5, 1e5, 0.5, 0.0, 0.2, 100);
        const auto pj = detail::ratio_params(5, 1e5, 0.5, 0.0, 0.2, 100);
        const auto grid = linspace(-2.0, 2.0, 8001);
        emit("scc_exact.csv", detail::to_csv(spectrum_exact(p, Observable::Scc, grid, par)), pj);
        emit("scc_approx.csv", detail::to_csv(spectrum_approx(p, Tier::Analytic, grid)), pj);
        const RateSet r = quantum_noise_rates(p);
        SpectrumTrace thermal{grid, {}, Observable::SccApprox, Tier::Analytic};
        SpectrumTrace force{grid, {}, Observable::SccApprox, Tier::Analytic};
        for (double w : grid) {
            const auto t = mechanical_spectrum_terms(p, r, w);
            thermal.values.push_back(t.thermal);
            force.values.push_back(t.force);
        }
        emit("scc_approx_thermal_term.csv", detail::to_csv(thermal), pj);
        emit("scc_approx_force_term.csv", detail::to_csv(force), pj);
        emit("force_spectrum.csv", detail::to_csv(spectrum_force(p, LossSplit::main_text(p), grid)), pj);
    } else if (id == "fig1b") {
        const auto grid = linspace(-2.0, 2.0, 8001);
        struct Line {
            const char* file;
            double delta, aa, ba;
        };
        for (const Line& l : {Line{"sdd_out_Ba0.01.csv", 0.5, 0.0, 0.01}, Line{"sdd_out_Ba0.2.csv", 0.5, 0.0, 0.2},
                              Line{"sdd_out_Aa0.2.csv", -1.0, 0.2, 0.0}}) {
            const SystemParams p = SystemParams::from_ratios(5, 1e5, l.delta, l.aa, l.ba, 100);
            emit(l.file, detail::to_csv(spectrum_exact(p, Observable::SddOut, grid, par)),
                 detail::ratio_params(5, 1e5, l.delta, l.aa, l.ba, 100));
        }
    } else if (id == "fig2a") {
        const SystemParams p = SystemParams::from_ratios(3, 3e5, 0.5, 0.0, 0.0, 100);
        SweepOptions so;
        so.parallel = par;
        const auto r = sweep_coupling(p, logspace(1e-3, 1.0, 400), CouplingAxis::Dissipative, so);
        auto pj = detail::ratio_params(3, 3e5, 0.5, 0.0, 0.0, 100);
        pj["Ba"] = "swept";
        emit("phonon_vs_Ba.csv", detail::to_csv(r), pj);
    } else if (id == "fig2b" || id == "fig2c") {
        const SystemParams p = SystemParams::from_ratios(3, 1e7, 0.0, 0.0, 0.2, 100);
        SweepOptions so;
        so.parallel = par;
        const auto grid = id == "fig2b" ? linspace(-2.0, 2.0, 2001) : linspace(0.3, 0.7, 801);
        auto pj = detail::ratio_params(3, 1e7, 0.0, 0.0, 0.2, 100);
        pj["delta_over_omega_m"] = "swept";
        emit("phonon_vs_delta.csv", detail::to_csv(sweep_detuning(p, grid, so)), pj);
    } else if (id == "fig3") {
        SystemParams base = SystemParams::from_ratios(1, 1e5, 0.5, 0.0, 0.0, 100);  // kappa/gamma = 1e5
        const auto grid = logspace(0.1, 100.0, static_cast<std::size_t>(sideband_points));
        SidebandOptions sb;
        sb.parallel = par;
        nlohmann::json pj{{"kappa_over_gamma", 1e5}, {"nth", 100}, {"omega_m_over_kappa", "swept"}};
        for (CouplingMode m : {CouplingMode::Dissipative, CouplingMode::Dispersive, CouplingMode::Mixed}) {
            nlohmann::json mj = pj;
            mj["mode"] = to_string(m);
            emit(std::string("nmin_") + to_string(m) + ".csv",
                 detail::to_csv(sweep_sideband_minimum(base, grid, m, sb)), mj);
        }
    }
    detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

inline int cmd_reproduce(const ReproduceOptions& o, std::ostream& out) {
    const std::string dir = o.out_dir.empty() ? "reproduce_" + o.figure : o.out_dir;
    for (const auto& f : reproduce_figure(o.figure, dir, ParallelOptions::from_env(), o.sideband_points))
        out << (std::filesystem::path(dir) / f).string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"optocool: laser cooling with dispersive and dissipative optomechanical coupling"};
    app.require_subcommand(1);

    SpectrumOptions spec;
    auto* s = app.add_subcommand("spectrum", "mechanical, output or force spectrum on a frequency grid");
    detail::add_param_options(s, spec.raw);
    s->add_option("--observable", spec.observable, "scc, sdd_out or force");
    s->add_option("--tier", spec.tier, "exact, analytic or qn");
    s->add_option("--omega-min", spec.omega_min);
    s->add_option("--omega-max", spec.omega_max);
    s->add_option("--points", spec.points);
    s->add_option("--format", spec.format, "csv or json");
    s->add_option("--output", spec.output, "file path (default stdout)");

    PhononOptions ph;
    auto* p = app.add_subcommand("phonon", "phonon numbers of all tiers, rates and stability");
    detail::add_param_options(p, ph.raw);
    p->add_option("--format", ph.format, "text or json");

    SweepCliOptions sw;
    auto* w = app.add_subcommand("sweep", "sweep detuning, a coupling, or the sideband parameter");
    detail::add_param_options(w, sw.raw);
    w->add_option("--axis", sw.axis, "delta, Ba, Aa or sideband");
    w->add_option("--from", sw.from);
    w->add_option("--to", sw.to);
    w->add_option("--points", sw.points);
    w->add_flag("--log", sw.log_spaced, "log-spaced grid");
    w->add_flag("--no-exact", sw.no_exact, "skip the exact tier");
    w->add_option("--mode", sw.mode, "sideband sweep: dissipative, dispersive or mixed");
    w->add_option("--output", sw.output, "file path (default stdout)");

    MinimizeCliOptions mn;
    auto* m = app.add_subcommand("minimize", "minimize the phonon number over up to two variables");
    detail::add_param_options(m, mn.raw);
    m->add_option("--free", mn.free, "delta, Aa, Ba (comma separated)")->delimiter(',');
    m->add_option("--tier", mn.tier, "qn, analytic, simplified or exact");
    m->add_flag("--tie-delta", mn.tie_delta, "hold delta at the optimal detuning");
    m->add_option("--delta-min", mn.delta_min);
    m->add_option("--delta-max", mn.delta_max);
    m->add_option("--coupling-min", mn.coupling_min);
    m->add_option("--coupling-max", mn.coupling_max);
    m->add_option("--points", mn.points, "coarse grid points per axis (>= 50)");
    m->add_option("--format", mn.format, "text or json");

    ReproduceOptions rp;
    auto* r = app.add_subcommand("reproduce", "write all traces of a figure plus a manifest");
    r->add_option("figure", rp.figure, "fig1a, fig1b, fig2a, fig2b, fig2c or fig3")->required();
    r->add_option("--out-dir", rp.out_dir);
    r->add_option("--sideband-points", rp.sideband_points);

    try {
        std::vector<std::string> args = detail::merge_config(argv_in);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_spectrum(spec, out);
        if (p->parsed()) return cmd_phonon(ph, out);
        if (w->parsed()) return cmd_sweep(sw, out);
        if (m->parsed()) return cmd_minimize(mn, out);
        if (r->parsed()) return cmd_reproduce(rp, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PhysicsError& e) {
        err << "error: " << e.what() << '\n';
        return kExitPhysics;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace optocool::cli
