#pragma once

#include <cstddef>
#include <functional>

namespace lpmhd {

/// Worker count: LPMHD_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1). Invalid values throw ConfigError.
int thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads. Each
/// index runs exactly once; callers write results into slot i, so the
/// outcome does not depend on scheduling. The exception of the lowest
/// failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lpmhd
