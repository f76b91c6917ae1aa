#pragma once

#include <functional>

namespace symmetria {

// Worker cap: SYMMETRIA_THREADS when set (minimum 1), else hardware threads.
int thread_cap();

// Runs fn(i) for i in [0, n), chunked across up to thread_cap() threads.
// Callers write results by index, so scheduling cannot affect output.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace symmetria
