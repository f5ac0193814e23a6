// format.hpp: deterministic number formatting and CSV output

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "optocool/exact.hpp"
#include "optocool/sweep.hpp"

namespace optocool {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const SpectrumTrace& trace) {
    os << "omega,value\n";
    for (std::size_t i = 0; i < trace.omega_grid.size(); ++i)
        os << format_double(trace.omega_grid[i]) << ',' << format_double(trace.values[i]) << '\n';
}

/// Columns: axis name, each trace, tier_discrepant, stable.
inline void write_csv(std::ostream& os, const SweepResult& sweep) {
    os << sweep.axis_name;
    for (const auto& [name, values] : sweep.traces) os << ',' << name;
    os << ",tier_discrepant,stable\n";
    for (std::size_t i = 0; i < sweep.axis_values.size(); ++i) {
        os << format_double(sweep.axis_values[i]);
        for (const auto& tr : sweep.traces) os << ',' << format_double(tr.second[i]);
        os << ',' << (sweep.tier_discrepant[i] ? 1 : 0) << ',' << (sweep.stable[i] ? 1 : 0) << '\n';
    }
}

} // namespace optocool
