// linear_system.hpp: linearized Langevin equations for the fluctuations
//
// State vector v = (d, d^dag, c, c^dag): cavity fluctuation d, mechanical mode c.
// Input vector xi = (d_in, d_in^dag, c_in, c_in^dag). Dynamics v' = A v + L xi.

#pragma once

#include <algorithm>
#include <complex>

#include <Eigen/Dense>

#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Vector4c = Eigen::Matrix<cplx, 4, 1>;

namespace idx {
inline constexpr int d = 0;
inline constexpr int d_dag = 1;
inline constexpr int c = 2;
inline constexpr int c_dag = 3;
} // namespace idx

struct LinearSystem {
    Matrix4c drift;
    Matrix4c noise_input;
    // Diagonal weights <xi_i xi_i^dag>: (1, 0, n_th + 1, n_th). Off-diagonals vanish.
    Matrix4c correlators;
    double kappa{};
    double b_coupling{};  // B~ a_bar, needed by the input-output relation
};

/// Swaps (d <-> d^dag) and (c <-> c^dag) rows and columns, then conjugates.
/// A doubled-up bosonic system is a fixed point of this map.
inline Matrix4c conjugation_image(const Matrix4c& m) {
    static constexpr int swap[4] = {1, 0, 3, 2};
    Matrix4c out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = std::conj(m(swap[i], swap[j]));
    return out;
}

inline LinearSystem build_linear_system(const SystemParams& params) {
    params.validate();
    const cplx I{0.0, 1.0};
    const double k = params.kappa;
    const double g = params.gamma;
    const double wm = params.omega_m;
    const double D = params.delta;
    const double a = params.dispersive_coupling();
    const double b = params.dissipative_coupling();
    const double sk = std::sqrt(k);
    const double sg = std::sqrt(g);

    LinearSystem sys;
    sys.kappa = k;
    sys.b_coupling = b;
    Matrix4c& A = sys.drift;
    Matrix4c& L = sys.noise_input;
    A.setZero();
    L.setZero();

    // cavity: d' = (i D - k/2) d - sqrt(k) d_in + [i a k - (i D + k/2) b/2] (c + c^dag)
    A(idx::d, idx::d) = I * D - k / 2;
    const cplx drive = I * a * k - (I * D + k / 2) * (b / 2);
    A(idx::d, idx::c) = drive;
    A(idx::d, idx::c_dag) = drive;
    L(idx::d, idx::d) = -sk;

    // mechanics: c' = -(i wm + g/2) c - sqrt(g) c_in + i x0 F, with
    // x0 F = a k d + i(b/2) sqrt(k) d_in + i(b/2)(i D + k/2) d + h.c.
    A(idx::c, idx::c) = -I * wm - g / 2;
    A(idx::c, idx::d) = I * a * k - (b / 2) * (I * D + k / 2);
    A(idx::c, idx::d_dag) = I * a * k + (b / 2) * (k / 2 - I * D);
    L(idx::c, idx::c) = -sg;
    L(idx::c, idx::d) = -(b / 2) * sk;
    L(idx::c, idx::d_dag) = (b / 2) * sk;

    // Hermitian-conjugate rows.
    const Matrix4c A_img = conjugation_image(A);
    const Matrix4c L_img = conjugation_image(L);
    for (int j = 0; j < 4; ++j) {
        A(idx::d_dag, j) = A_img(idx::d_dag, j);
        A(idx::c_dag, j) = A_img(idx::c_dag, j);
        L(idx::d_dag, j) = L_img(idx::d_dag, j);
        L(idx::c_dag, j) = L_img(idx::c_dag, j);
    }

    sys.correlators.setZero();
    sys.correlators(idx::d, idx::d) = 1.0;
    sys.correlators(idx::c, idx::c) = params.n_th + 1.0;
    sys.correlators(idx::c_dag, idx::c_dag) = params.n_th;
    return sys;
}

struct StabilityReport {
    bool stable{};
    double spectral_abscissa{};  // max real part of the drift eigenvalues
    Eigen::Matrix<cplx, 4, 1> eigenvalues;
};

inline StabilityReport stability(const LinearSystem& sys) {
    Eigen::ComplexEigenSolver<Matrix4c> es(sys.drift, /*computeEigenvectors=*/false);
    StabilityReport r;
    r.eigenvalues = es.eigenvalues();
    r.spectral_abscissa = r.eigenvalues.real().maxCoeff();
    r.stable = r.spectral_abscissa < 0.0;
    return r;
}

inline bool is_stable(const LinearSystem& sys) { return stability(sys).stable; }

inline bool is_stable(const SystemParams& params) {
    return is_stable(build_linear_system(params));
}

} // namespace optocool
