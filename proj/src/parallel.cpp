// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nonbloch
{

namespace
{

std::atomic<int> override_threads{0};

}  // namespace

int thread_count()
{
  if (const int n = override_threads.load(); n > 0)
  {
    return n;
  }
  if (const char *env = std::getenv("NONBLOCH_THREADS"))
  {
    try
    {
      const int n = std::stoi(env);
      if (n > 0)
      {
        return n;
      }
    }
    catch (...)
    {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(int n)
{
  override_threads.store(std::max(0, n));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body)
{
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1)
  {
    std::exception_ptr error;
    for (std::size_t i = 0; i < n; i++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        if (!error)
        {
          error = std::current_exception();
        }
      }
    }
    if (error)
    {
      std::rethrow_exception(error);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
  auto run = [&]
  {
    for (std::size_t i = next++; i < n; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard lock(error_mutex);
        if (i < error_index)
        {
          error = std::current_exception();
          error_index = i;
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; w++)
    {
      pool.emplace_back(run);
    }
    run();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace nonbloch
