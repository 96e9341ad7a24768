// SPDX-License-Identifier: Apache-2.0
//! \file parallel.hpp
//! Order-preserving fan-out over independent tasks, capped by FRACHARM_THREADS.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace fracharm {

/*!
 * Worker count: FRACHARM_THREADS when it parses as a positive integer,
 * otherwise the machine's hardware concurrency (at least 1).
 */
inline std::size_t thread_count()
{
    if (const char* env = std::getenv("FRACHARM_THREADS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/*!
 * results[i] = fn(i) for i in [0, count). Tasks run on up to thread_count()
 * workers; results are stored by index so the output never depends on
 * completion order. The exception of the lowest failing index is rethrown.
 */
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t count, Fn&& fn)
{
    std::vector<R> results(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min(thread_count(), count);

    auto run = [&](std::atomic<std::size_t>& next) {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                results[i] = fn(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };

    std::atomic<std::size_t> next{0};
    if (workers <= 1)
    {
        run(next);
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] { run(next); });
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
    return results;
}

}  // namespace fracharm
