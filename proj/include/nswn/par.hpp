#pragma once

#include <cstddef>

// small parallel-for shims: omp variant used by default, serial twin kept as
// reference for testing and benchmarking
namespace nswn {

template <class F>
inline void serial_for(long n, F&& f)
{
    for (long i = 0; i < n; ++i) f(i);
}

template <class F>
inline void par_for(long n, F&& f)
{
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) f(i);
}

} // namespace nswn
