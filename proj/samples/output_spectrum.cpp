// Writes the optical output spectrum for dissipative coupling at the optimal
// detuning as CSV on stdout.

#include <iostream>

#include "optocool/exact.hpp"
#include "optocool/format.hpp"
#include "optocool/optimize.hpp"

int main() {
    using namespace optocool;
    SystemParams p = SystemParams::from_ratios(5, 1e5, 0.0, 0.0, 0.2, 100);
    p.delta = optimal_detuning(p);
    try {
        write_csv(std::cout, spectrum_exact(p, Observable::SddOut, linspace(-2.0, 2.0, 2001)));
    } catch (const PhysicsError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
