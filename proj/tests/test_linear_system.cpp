#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "optocool/linear_system.hpp"
#include "optocool/optimize.hpp"
#include "support/random_params.hpp"

namespace {

using namespace optocool;
const cplx I{0.0, 1.0};

// Independent construction: evaluate the right-hand sides of the equations of
// motion on unit vectors. The equations are linear, so column j of the drift
// (noise-input) matrix is the response to the j-th state (input) unit vector.
struct ReferenceModel {
    SystemParams p;

    // v = (d, d^dag, c, c^dag), xi = (d_in, d_in^dag, c_in, c_in^dag)
    Vector4c rhs(const Vector4c& v, const Vector4c& xi) const {
        const double k = p.kappa, g = p.gamma, D = p.delta, wm = p.omega_m;
        const double A = p.a_tilde, B = p.b_tilde, ab = p.a_bar;
        const cplx d = v(0), dd = v(1), c = v(2), cd = v(3);
        const cplx din = xi(0), dind = xi(1), cin = xi(2), cind = xi(3);
        const cplx x = c + cd;  // x / x0
        // x0 F = A k a* d + i (B/2) a* sqrt(k) d_in + i (B/2) a* (iD + k/2) d + h.c.
        const cplx f_half = A * k * ab * d + I * (B / 2) * ab * std::sqrt(k) * din
                            + I * (B / 2) * ab * (I * D + k / 2) * d;
        const cplx f_half_dag = A * k * ab * dd - I * (B / 2) * ab * std::sqrt(k) * dind
                                - I * (B / 2) * ab * (-I * D + k / 2) * dd;
        const cplx force = f_half + f_half_dag;
        const cplx force_dag = force;  // Hermitian
        Vector4c out;
        out(0) = (I * D - k / 2) * d - std::sqrt(k) * din + (I * A * k * ab - (I * D + k / 2) * (B / 2) * ab) * x;
        out(1) = (-I * D - k / 2) * dd - std::sqrt(k) * dind
                 + (-I * A * k * ab - (-I * D + k / 2) * (B / 2) * ab) * x;
        out(2) = -(I * wm + g / 2) * c - std::sqrt(g) * cin + I * force;
        out(3) = (I * wm - g / 2) * cd - std::sqrt(g) * cind - I * force_dag;
        return out;
    }

    Matrix4c drift() const {
        Matrix4c m;
        for (int j = 0; j < 4; ++j) m.col(j) = rhs(Vector4c::Unit(j), Vector4c::Zero());
        return m;
    }
    Matrix4c noise_input() const {
        Matrix4c m;
        for (int j = 0; j < 4; ++j) m.col(j) = rhs(Vector4c::Zero(), Vector4c::Unit(j));
        return m;
    }
};

SystemParams fig1_params(double a, double b, double delta) {
    return SystemParams::from_ratios(5, 1e5, delta, a, b, 100);
}

TEST(LinearSystem, DecoupledLimitIsBlockDiagonal) {
    const SystemParams p = fig1_params(0.0, 0.0, 0.3);
    const LinearSystem sys = build_linear_system(p);
    for (int i : {0, 1})
        for (int j : {2, 3}) {
            EXPECT_EQ(sys.drift(i, j), cplx(0.0));
            EXPECT_EQ(sys.drift(j, i), cplx(0.0));
        }
    // Mechanical rows see only the mechanical bath.
    for (int r : {idx::c, idx::c_dag}) {
        EXPECT_EQ(sys.noise_input(r, idx::d), cplx(0.0));
        EXPECT_EQ(sys.noise_input(r, idx::d_dag), cplx(0.0));
    }
    EXPECT_EQ(sys.noise_input(idx::c, idx::c), cplx(-std::sqrt(p.gamma)));

    Eigen::ComplexEigenSolver<Matrix4c> es(sys.drift);
    std::vector<cplx> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    const std::vector<cplx> want{I * p.delta - p.kappa / 2, -I * p.delta - p.kappa / 2,
                                 -I * p.omega_m - p.gamma / 2, I * p.omega_m - p.gamma / 2};
    for (const cplx& w : want) {
        const bool found = std::any_of(got.begin(), got.end(), [&](cplx g) { return std::abs(g - w) < 1e-14; });
        EXPECT_TRUE(found) << w;
    }
}

TEST(LinearSystem, DispersiveForceEntry) {
    const SystemParams p = fig1_params(0.1, 0.0, -1.0);
    const LinearSystem sys = build_linear_system(p);
    // i x0 F with x0 F = A k a d + h.c.
    EXPECT_EQ(sys.drift(idx::c, idx::d), I * (0.1 * p.kappa * 1.0));
    EXPECT_EQ(sys.drift(idx::c, idx::d_dag), I * (0.1 * p.kappa * 1.0));
}

TEST(LinearSystem, DissipativeEntriesMatchTermByTermReference) {
    const SystemParams p = fig1_params(0.0, 0.2, 0.5);
    const LinearSystem sys = build_linear_system(p);
    const cplx drive = -(I * p.delta + p.kappa / 2) * (0.2 / 2) * 1.0;
    EXPECT_NEAR(std::abs(sys.drift(idx::d, idx::c) - drive), 0.0, 1e-16);
    // Direct bath injection: i * [i (B/2) a sqrt(k)] on the c row.
    const cplx inject = I * (I * (0.2 / 2) * std::sqrt(p.kappa));
    EXPECT_NEAR(std::abs(sys.noise_input(idx::c, idx::d) - inject), 0.0, 1e-16);

    const ReferenceModel ref{p};
    EXPECT_LT((sys.drift - ref.drift()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((sys.noise_input - ref.noise_input()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LinearSystem, RandomParamsMatchReferenceAndConjugationSymmetry) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        SystemParams p = test_support::random_params(rng);
        p.a_bar = 0.5 + trial * 0.01;
        const LinearSystem sys = build_linear_system(p);
        const ReferenceModel ref{p};
        const double scale = 1.0 + sys.drift.cwiseAbs().maxCoeff();
        ASSERT_LT((sys.drift - ref.drift()).cwiseAbs().maxCoeff(), 1e-14 * scale);
        ASSERT_LT((sys.noise_input - ref.noise_input()).cwiseAbs().maxCoeff(), 1e-14 * scale);
        ASSERT_EQ(conjugation_image(sys.drift), sys.drift);
        ASSERT_EQ(conjugation_image(sys.noise_input), sys.noise_input);
    }
}

TEST(LinearSystem, CorrelatorWeights) {
    const SystemParams p = fig1_params(0.0, 0.1, 0.5);
    const LinearSystem sys = build_linear_system(p);
    Matrix4c want = Matrix4c::Zero();
    want(0, 0) = 1.0;
    want(2, 2) = 101.0;
    want(3, 3) = 100.0;
    EXPECT_EQ(sys.correlators, want);
}

TEST(LinearSystem, ReducesToStandardDispersiveDrift) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p = test_support::random_params(rng);
        p.b_tilde = 0.0;
        const double g = p.a_tilde * p.kappa * p.a_bar;
        Matrix4c ref = Matrix4c::Zero();
        ref(0, 0) = I * p.delta - p.kappa / 2;
        ref(1, 1) = -I * p.delta - p.kappa / 2;
        ref(2, 2) = -I * p.omega_m - p.gamma / 2;
        ref(3, 3) = I * p.omega_m - p.gamma / 2;
        ref(0, 2) = ref(0, 3) = I * g;
        ref(1, 2) = ref(1, 3) = -I * g;
        ref(2, 0) = ref(2, 1) = I * g;
        ref(3, 0) = ref(3, 1) = -I * g;
        ASSERT_LT((build_linear_system(p).drift - ref).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(LinearSystem, SignFlipIsGaugeTransform) {
    std::mt19937_64 rng(3);
    const Matrix4c G = Eigen::Vector4d(-1, -1, 1, 1).cast<cplx>().asDiagonal();
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p = test_support::random_params(rng);
        SystemParams q = p;
        q.a_tilde = -p.a_tilde;
        q.b_tilde = -p.b_tilde;
        const LinearSystem s1 = build_linear_system(p);
        const LinearSystem s2 = build_linear_system(q);
        ASSERT_LT((s2.drift - G * s1.drift * G).cwiseAbs().maxCoeff(), 1e-15);
        ASSERT_LT((s2.noise_input - G * s1.noise_input * G).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Stability, DecoupledAbscissaIsMechanicalDamping) {
    const SystemParams p = fig1_params(0.0, 0.0, 0.5);
    const StabilityReport r = stability(build_linear_system(p));
    EXPECT_TRUE(r.stable);
    EXPECT_NEAR(r.spectral_abscissa, -p.gamma / 2, 1e-15);
}

TEST(Stability, DetuningScanFindsTwoUnstableWindows) {
    const SystemParams base = SystemParams::from_ratios(3, 1e7, 0.0, 0.0, 0.2, 100);
    const auto grid = linspace(-1.999, 1.999, 4001);
    int windows = 0;
    bool prev_stable = true;
    std::vector<double> starts;
    for (double d : grid) {
        const bool s = is_stable(base.with_delta(d));
        if (!s && prev_stable) {
            ++windows;
            starts.push_back(d);
        }
        prev_stable = s;
    }
    EXPECT_EQ(windows, 2);
    // One window lies between the two cooling detunings, the other above omega_m/2.
    ASSERT_EQ(starts.size(), 2u);
    EXPECT_GT(starts[0], -1.0);
    EXPECT_LT(starts[0], 0.0);
    EXPECT_GT(starts[1], 0.5);
    EXPECT_FALSE(is_stable(base.with_delta(-0.3)));
    EXPECT_FALSE(is_stable(base.with_delta(1.2)));
}

TEST(Stability, OverdampedMechanicsIsStable) {
    for (double d : linspace(-2.0, 2.0, 41)) {
        for (auto [a, b] : {std::pair{0.0, 0.2}, std::pair{0.2, 0.0}, std::pair{0.0, 0.01}}) {
            SystemParams p = SystemParams::from_ratios(5, 1.0, d, a, b, 100);
            EXPECT_TRUE(is_stable(p)) << d << " " << a << " " << b;
        }
    }
}

TEST(Params, ValidationNamesField) {
    SystemParams p;
    p.kappa = -1;
    try {
        p.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "kappa");
    }
    p = SystemParams{};
    p.n_th = -0.1;
    EXPECT_THROW(p.validate(), ValidationError);
    p = SystemParams{};
    p.a_bar = -1;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Params, NormalizationRescalesRates) {
    SystemParams p;
    p.omega_m = 2.0;
    p.kappa = 0.4;
    p.gamma = 2e-5;
    p.delta = 1.0;
    const SystemParams q = p.normalized();
    EXPECT_DOUBLE_EQ(q.omega_m, 1.0);
    EXPECT_DOUBLE_EQ(q.kappa, 0.2);
    EXPECT_DOUBLE_EQ(q.gamma, 1e-5);
    EXPECT_DOUBLE_EQ(q.delta, 0.5);
}

} // namespace
