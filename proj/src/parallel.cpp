#include "bunchlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bunchlab {

int worker_count() {
    if (const char* env = std::getenv("BUNCHLAB_THREADS")) {
        const int requested = std::atoi(env);
        return std::max(1, requested);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {
thread_local bool inside_worker = false;
}

void parallel_for(Index count, const std::function<void(Index)>& fn) {
    if (count <= 0) return;
    const int workers =
        inside_worker ? 1 : static_cast<int>(std::min<Index>(count, worker_count()));
    if (workers == 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
            inside_worker = true;
            try {
                for (Index i = t; i < count; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bunchlab
