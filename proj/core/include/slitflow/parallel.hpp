#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace slitflow {

/// Worker count: explicit request, else SLITFLOW_THREADS, else hardware.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

/// Runs body(i) for i in [0, n) on `threads` workers.
///
/// Indices are split into contiguous blocks; callers write per-index results
/// into preallocated storage and reduce afterwards in index order, so results
/// never depend on the worker count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace slitflow
