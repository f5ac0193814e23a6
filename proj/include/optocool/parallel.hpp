// parallel.hpp: ordered map over independent grid points

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace optocool {

struct ParallelOptions {
    unsigned threads{0};  // 0: hardware concurrency

    unsigned resolved() const {
        unsigned n = threads ? threads : std::thread::hardware_concurrency();
        return std::max(1u, n);
    }

    /// Reads OPTOCOOL_THREADS; falls back to hardware concurrency.
    static ParallelOptions from_env() {
        ParallelOptions o;
        if (const char* s = std::getenv("OPTOCOOL_THREADS")) {
            try {
                const long v = std::stol(s);
                if (v > 0) o.threads = static_cast<unsigned>(v);
            } catch (const std::exception&) {
            }
        }
        return o;
    }
};

/// out[i] = fn(in[i]). Results are written by index so the output does not
/// depend on scheduling. The first exception thrown by any worker is rethrown.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& in, Fn&& fn, ParallelOptions opts = {})
    -> std::vector<decltype(fn(in.front()))> {
    using Out = decltype(fn(in.front()));
    std::vector<Out> out(in.size());
    const std::size_t workers = std::min<std::size_t>(opts.resolved(), in.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
        return out;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < in.size(); i += workers) out[i] = fn(in[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace optocool
