#include "symmetria/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace symmetria {

int thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("SYMMETRIA_THREADS")) {
        try {
            int requested = std::stoi(env);
            if (requested >= 1) cap = std::min(cap, requested);
        } catch (...) {
            // Unparseable values fall back to the hardware count.
        }
    }
    return cap;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = std::min(thread_cap(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([begin, end, &fn, &err = errors[w]] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace symmetria
