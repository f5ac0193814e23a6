// Phonon number of the three tiers along a dissipative coupling sweep,
// followed by the closed-form optimum.

#include <cmath>
#include <cstdio>

#include "optocool/analytic.hpp"
#include "optocool/exact.hpp"
#include "optocool/optimize.hpp"

int main() {
    using namespace optocool;
    const SystemParams base = SystemParams::from_ratios(3, 3e5, 0.5, 0.0, 0.0, 100);

    std::printf("%10s %14s %14s %14s\n", "Ba", "n_qn", "n_analytic", "n_exact");
    for (double b : logspace(1e-3, 1.0, 13)) {
        const SystemParams p = base.with_couplings(0.0, b);
        const PhononResult a = phonon_number_analytic(p);
        std::printf("%10.4g %14.6g %14.6g %14.6g\n", b, a.n_qn, a.n_analytic, phonon_number_exact(p));
    }

    const CouplingOptimum o = n_min_dissipative(base);
    std::printf("closed-form optimum: Ba = %.5f, n_min = %.5f\n", std::sqrt(o.b_coupling_sq), o.n_min);
}
