#pragma once

#include <cstdint>
#include <functional>

namespace ghostproj {

/// Global worker-thread count used by block-parallel loops. 0 = hardware
/// concurrency. The count never affects numerical results: work is split
/// into fixed-size blocks and per-block results are merged in block order.
void set_thread_count(int n);
int thread_count();

/// Run fn(block_index, begin, end) over [0, total) split into blocks of
/// `block_size` (the last block may be short). Blocks are claimed by worker
/// threads in any order; callers must write per-block outputs into
/// block-indexed slots and merge serially afterwards.
void for_each_block(std::uint64_t total, std::uint64_t block_size,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

/// Default block size for mask loops: big enough to amortize dispatch,
/// small enough to balance the longest runs.
inline constexpr std::uint64_t kMaskBlock = 4096;

} // namespace ghostproj
