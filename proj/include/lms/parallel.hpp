#ifndef LMS_PARALLEL_HPP
#define LMS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lms {

/// Process-wide worker bound.  0 means "use hardware concurrency".
inline std::atomic<int>& thread_limit() {
    static std::atomic<int> limit{0};
    return limit;
}

inline void set_thread_limit(int n) { thread_limit().store(n); }

inline int effective_threads(std::size_t jobs) {
    int lim = thread_limit().load();
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    int t = lim > 0 ? std::min<int>(lim, (int)hw) : (int)hw;
    return (int)std::min<std::size_t>((std::size_t)std::max(t, 1), std::max<std::size_t>(jobs, 1));
}

/// Run fn(i) for i in [0, n).  Results must be written to per-index slots;
/// the output is then independent of the number of workers.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    int workers = effective_threads(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&]() {
        constexpr std::size_t chunk = 64;
        for (;;) {
            std::size_t lo = cursor.fetch_add(chunk);
            if (lo >= n) return;
            std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve((std::size_t)workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace lms

#endif
