#pragma once

#include <functional>

namespace xvem {

/// Calls body(i) for every i in [0, n) on up to `threads` worker threads
/// (0: hardware concurrency). Each index is visited exactly once; the first
/// exception thrown by a worker is rethrown here after all workers stop.
void parallel_for(int n, const std::function<void(int)>& body, int threads = 0);

} // namespace xvem
