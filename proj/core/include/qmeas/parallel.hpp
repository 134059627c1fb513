#pragma once

#include <cstddef>
#include <functional>

namespace qmeas {

/// Worker-thread cap: QMEAS_THREADS when set (>= 1), else the hardware
/// concurrency, clamped to [1, 64].
int thread_budget();

/// Executes jobs 0..count-1, possibly concurrently. Each job must write only
/// to its own output slot; callers combine slots afterwards in index order,
/// which keeps results identical whatever the schedule.
void run_chunks(std::size_t count, const std::function<void(std::size_t)>& job);

/// Chunk size used by the Monte Carlo loops. Fixed: changing it would change
/// per-chunk seed derivation and therefore sampled streams.
inline constexpr std::size_t kMonteCarloChunk = 1 << 16;

}  // namespace qmeas
