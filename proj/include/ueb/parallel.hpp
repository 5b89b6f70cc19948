#pragma once

#include <cstddef>
#include <functional>

namespace ueb {

// Worker cap: min(hardware threads, UEB_THREADS when set to a positive
// integer). Always at least 1.
std::size_t worker_count();

// Runs fn(0..n-1) across workers in contiguous blocks. Callers own the
// determinism story: fn must write only to its own slot so the result is
// independent of scheduling. Nested calls degrade to serial execution.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ueb
