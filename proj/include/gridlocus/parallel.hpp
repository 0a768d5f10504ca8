#pragma once

namespace gridlocus {

/// Threads for `work_items` independent tasks. GRIDLOCUS_THREADS, when set to
/// a positive integer, caps the count; otherwise `default_cap` does (the
/// OpenMP default when `default_cap` <= 0). Always at least 1.
int thread_count(int work_items, int default_cap = 0);

}  // namespace gridlocus
