#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "optocool/cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace optocool;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> fig1a_flags() {
    return {"--Aa", "0", "--Ba", "0.2", "--delta", "0.5", "--omega-m-over-kappa", "5",
            "--omega-m-over-gamma", "1e5", "--nth", "100"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

fs::path temp_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("optocool_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

TEST(Cli, SpectrumCsv) {
    const Result r = run_cli(concat({"spectrum", "--observable", "scc", "--tier", "exact", "--points", "5"},
                                    fig1a_flags()));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 6u);
    EXPECT_EQ(ls[0], "omega,value");
    EXPECT_EQ(ls[1].substr(0, 3), "-2,");
    const SystemParams p = SystemParams::from_ratios(5, 1e5, 0.5, 0.0, 0.2, 100);
    const double want = exact_scc(build_linear_system(p), 0.0);
    EXPECT_EQ(ls[3], "0," + format_double(want));
}

TEST(Cli, ZeroCouplingThermalLorentzian) {
    const Result r = run_cli({"spectrum", "--omega-m-over-kappa", "5", "--omega-m-over-gamma", "1e5", "--nth", "100",
                              "--points", "3", "--omega-min", "-1", "--omega-max", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    const double g = 1e-5;
    const double peak = std::stod(ls[1].substr(ls[1].find(',') + 1));
    EXPECT_NEAR(peak, 100 * g / (g * g / 4), 1e-6 * peak);
}

TEST(Cli, SpectrumJson) {
    const Result r = run_cli(concat({"spectrum", "--points", "3", "--format", "json", "--observable", "sdd_out"},
                                    fig1a_flags()));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["traces"][0]["observable"], "sdd_out");
    EXPECT_EQ(j["traces"][0]["values"].size(), 3u);
    EXPECT_DOUBLE_EQ(j["params"]["kappa"].get<double>(), 0.2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli(concat({"spectrum", "--points", "0"}, fig1a_flags())).code, 2);
    EXPECT_EQ(run_cli(concat({"spectrum", "--observable", "nope"}, fig1a_flags())).code, 2);
    EXPECT_EQ(run_cli({"spectrum", "--omega-m-over-gamma", "1e5"}).code, 2);
    EXPECT_EQ(run_cli({"reproduce", "fig9"}).code, 2);
    EXPECT_EQ(run_cli({"bogus"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    const Result r = run_cli(concat({"phonon", "--kappa", "-1"}, {"--omega-m-over-gamma", "1e5"}));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("kappa"), std::string::npos);
    EXPECT_EQ(run_cli(concat({"sweep", "--points", "0"}, fig1a_flags())).code, 2);
}

TEST(Cli, UnstableIsPhysicsError) {
    const std::vector<std::string> fig2b_unstable{"--Ba", "0.2", "--delta", "-0.3", "--omega-m-over-kappa", "3",
                                                  "--omega-m-over-gamma", "1e7", "--nth", "100"};
    EXPECT_EQ(run_cli(concat({"spectrum"}, fig2b_unstable)).code, 3);
    EXPECT_EQ(run_cli(concat({"phonon"}, fig2b_unstable)).code, 3);
}

TEST(Cli, PhononReport) {
    const Result r = run_cli(concat({"phonon", "--format", "json"}, fig1a_flags()));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["term_qn_like"].get<double>(), 0.0);
    EXPECT_DOUBLE_EQ(j["delta_opt"].get<double>(), 0.5);
    EXPECT_TRUE(j["stable"].get<bool>());
    const SystemParams p = SystemParams::from_ratios(5, 1e5, 0.5, 0.0, 0.2, 100);
    EXPECT_EQ(j["n_exact"].get<double>(), phonon_number_exact(p));
    EXPECT_EQ(j["n_analytic"].get<double>(), phonon_number_analytic(p).n_analytic);

    const Result text = run_cli(concat({"phonon"}, fig1a_flags()));
    EXPECT_NE(text.out.find("n_exact: "), std::string::npos);
}

TEST(Cli, DispersiveDetuningNote) {
    const Result r = run_cli({"phonon", "--Aa", "0.05", "--delta", "-1", "--omega-m-over-kappa", "5",
                              "--omega-m-over-gamma", "1e5", "--nth", "100"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("undefined for purely dispersive coupling"), std::string::npos);
}

TEST(Cli, RawCouplingsAndAmplitude) {
    const Result a = run_cli({"phonon", "--format", "json", "--B", "0.1", "--abar", "2", "--omega-m-over-kappa", "5",
                              "--omega-m-over-gamma", "1e5", "--nth", "100"});
    const Result b = run_cli({"phonon", "--format", "json", "--Ba", "0.2", "--omega-m-over-kappa", "5",
                              "--omega-m-over-gamma", "1e5", "--nth", "100"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(nlohmann::json::parse(a.out)["n_exact"], nlohmann::json::parse(b.out)["n_exact"]);
    EXPECT_EQ(run_cli({"phonon", "--B", "0.1", "--Ba", "0.1", "--omega-m-over-kappa", "5", "--omega-m-over-gamma",
                       "1e5"})
                  .code,
              2);
}

TEST(Cli, ConfigFileEquivalentAndOverridable) {
    const fs::path dir = temp_dir("config");
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# fig1a\nAa = 0\nBa = 0.2\ndelta = 0.5\nomega-m-over-kappa = 5\n"
          << "omega-m-over-gamma = 1e5\nnth = 100\nformat = json\n";
    }
    const Result from_flags = run_cli(concat({"phonon", "--format", "json"}, fig1a_flags()));
    const Result from_file = run_cli({"phonon", "--config", cfg.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(from_flags.out, from_file.out);
    const Result overridden = run_cli({"phonon", "--config", cfg.string(), "--nth", "50"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_EQ(nlohmann::json::parse(overridden.out)["params"]["nth"].get<double>(), 50.0);
    EXPECT_EQ(run_cli({"phonon", "--config", (dir / "missing.cfg").string()}).code, 2);
}

TEST(Cli, SweepIsDeterministic) {
    const std::vector<std::string> args{"sweep", "--axis", "delta", "--from", "0.3", "--to", "0.7", "--points", "21",
                                        "--Ba", "0.2", "--omega-m-over-kappa", "3", "--omega-m-over-gamma", "1e7",
                                        "--nth", "100"};
    const Result a = run_cli(args);
    const Result b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto ls = lines(a.out);
    ASSERT_EQ(ls.size(), 22u);
    EXPECT_EQ(ls[0], "delta,n_qn,n_analytic,term_thermal,term_qn_like,term_beyond,gamma_eff,n_exact,"
                     "tier_discrepant,stable");
}

TEST(Cli, Minimize) {
    const Result r = run_cli({"minimize", "--free", "Ba", "--tier", "simplified", "--tie-delta", "--format", "json",
                              "--omega-m-over-kappa", "3", "--omega-m-over-gamma", "3e5", "--nth", "100"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const CouplingOptimum ref = n_min_dissipative(SystemParams::from_ratios(3, 3e5, 0.5, 0, 0, 100));
    EXPECT_NEAR(j["n_min"].get<double>(), ref.n_min, 1e-9 * ref.n_min);
    EXPECT_EQ(run_cli({"minimize", "--free", "x", "--omega-m-over-kappa", "3", "--omega-m-over-gamma", "3e5"}).code,
              2);
}

TEST(Cli, ReproduceFig1a) {
    const fs::path dir = temp_dir("fig1a");
    const Result r = run_cli({"reproduce", "fig1a", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"scc_exact.csv", "scc_approx.csv", "scc_approx_thermal_term.csv",
                          "scc_approx_force_term.csv", "force_spectrum.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    std::ifstream mf(dir / "manifest.json");
    const auto manifest = nlohmann::json::parse(mf);
    EXPECT_EQ(manifest["traces"].size(), 5u);
    EXPECT_EQ(manifest["traces"][0]["parameters"]["Ba"].get<double>(), 0.2);
}

TEST(Cli, ReproduceFig3Small) {
    const fs::path dir = temp_dir("fig3");
    const Result r = run_cli({"reproduce", "fig3", "--out-dir", dir.string(), "--sideband-points", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"nmin_dissipative.csv", "nmin_dispersive.csv", "nmin_mixed.csv"}) {
        std::ifstream in(dir / f);
        std::stringstream ss;
        ss << in.rdbuf();
        EXPECT_EQ(lines(ss.str()).size(), 4u) << f;
    }
}

TEST(Cli, Subprocess) {
    const std::string cmd = std::string("\"") + OPTOCOOL_CLI_PATH +
                            "\" phonon --Ba 0.2 --omega-m-over-kappa 5 --omega-m-over-gamma 1e5 --nth 100 > /dev/null";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    const std::string bad = std::string("\"") + OPTOCOOL_CLI_PATH + "\" reproduce fig9 2> /dev/null";
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
}

} // namespace
