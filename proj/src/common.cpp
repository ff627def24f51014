#include "ggames/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace ggames {

int default_worker_count() {
    if (const char* env = std::getenv("GGAMES_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0 && v < 4096) return static_cast<int>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    int w = workers > 0 ? workers : default_worker_count();
    w = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int r = 0; r < w; ++r) {
        pool.emplace_back([&, r]() {
            // Contiguous block per worker; slot ownership keeps results
            // independent of the schedule.
            std::size_t lo = n * static_cast<std::size_t>(r) / static_cast<std::size_t>(w);
            std::size_t hi = n * static_cast<std::size_t>(r + 1) / static_cast<std::size_t>(w);
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace ggames
