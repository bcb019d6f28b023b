// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace kin {

// Number of workers: KINLAB_WORKERS if set, else hardware concurrency.
unsigned worker_count();

// Runs fn(begin, end) on contiguous chunks of [0, n) across workers.
// Deterministic as long as chunks write disjoint state.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace kin
