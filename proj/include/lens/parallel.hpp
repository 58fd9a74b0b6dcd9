// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace lens {

// Runs fn(i) for every i in [0, count) on up to `jobs` worker threads.
// Work items must be independent and write only to per-index slots, so the
// schedule cannot influence the result. If any item throws, the exception
// from the lowest failing index is rethrown after all items ran, which keeps
// error reporting deterministic as well.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace lens
