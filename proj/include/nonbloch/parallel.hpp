// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_PARALLEL_HPP
#define NONBLOCH_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace nonbloch
{

// Worker count: explicit override if set, else NONBLOCH_THREADS, else hardware concurrency.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores the default

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers write
// results into per-index slots so output order never depends on scheduling. The
// exception from the lowest failing index is rethrown after all tasks finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

}  // namespace nonbloch

#endif  // NONBLOCH_PARALLEL_HPP
