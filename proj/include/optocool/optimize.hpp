// optimize.hpp: derivative-free minimization helpers

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace optocool {

struct Minimum1D {
    double x{};
    double f{std::numeric_limits<double>::infinity()};
};

/// Golden-section search on [lo, hi]. Infeasible points may return +inf.
/// Returns the best point evaluated, never worse than either endpoint.
template <class F>
Minimum1D golden_section(F&& f, double lo, double hi, double x_tol, int max_iter = 400) {
    constexpr double inv_phi = 0.6180339887498949;
    Minimum1D best;
    auto consider = [&](double x, double fx) {
        if (fx < best.f) best = {x, fx};
    };
    consider(lo, f(lo));
    consider(hi, f(hi));

    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            consider(x2, f2);
        }
    }
    return best;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
    for (double& x : v) x = std::pow(10.0, x);
    if (n > 0) {
        v.front() = lo;
        v.back() = hi;
    }
    return v;
}

} // namespace optocool
