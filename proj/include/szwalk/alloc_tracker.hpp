#pragma once

// Live heap accounting for the scaling benchmark. The implementation
// interposes on malloc/free (and the global operator new/delete) via the
// linker's --wrap mechanism; targets opting in pick up the required link
// flags from the szwalk_alloc_tracker CMake target. In binaries linked
// without the wrapper the counters simply stay at zero and active() reports
// false.

namespace szwalk::alloc_tracker {

/// Bytes currently allocated (allocator-reported usable sizes).
long long current_bytes() noexcept;

/// High-water mark of current_bytes() since the last reset_peak().
long long peak_bytes() noexcept;

/// Sets the peak to the current live total.
void reset_peak() noexcept;

/// True once the interposed allocator has seen at least one allocation.
bool active() noexcept;

}  // namespace szwalk::alloc_tracker
