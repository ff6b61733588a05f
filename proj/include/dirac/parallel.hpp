#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dirac {

// Every sweep kernel takes an Exec tag. `serial` is the reference path kept
// for testing; `parallel` distributes independent indices over OpenMP
// threads. Kernels write results by index, so both produce identical output.
enum class Exec { serial, parallel };

template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn)
{
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first;
    std::mutex guard;
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

inline int thread_count()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace dirac
