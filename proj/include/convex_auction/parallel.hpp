#pragma once

#include "convex_auction/core.hpp"

#include <functional>

namespace convex_auction {

/// Worker count from CONVEX_AUCTION_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

/// Runs body(k) for k in [0, count) over contiguous blocks on worker threads.
/// Callers must write only to slots owned by k, which keeps results identical
/// to a serial loop.
void parallel_for(Index count, const std::function<void(Index)>& body);

}  // namespace convex_auction
