#pragma once

#include <functional>

namespace lorank {

/// Worker cap from the LORANK_THREADS environment variable (default 1).
int worker_count();

/// Runs fn(0..count-1). Calls may run concurrently when worker_count() > 1;
/// callers write into per-index slots and reduce in index order afterwards.
void for_each_index(int count, const std::function<void(int)>& fn);

}  // namespace lorank
