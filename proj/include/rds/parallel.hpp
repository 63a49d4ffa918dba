#ifndef RDS_PARALLEL_HPP
#define RDS_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rds {

// Global thread bound for ensemble kernels. 0 means the OpenMP default.
inline int& max_threads_setting() {
    static int n = 0;
    return n;
}

inline void set_max_threads(int n) { max_threads_setting() = n < 0 ? 0 : n; }

inline int effective_threads() {
#ifdef _OPENMP
    const int req = max_threads_setting();
    const int avail = omp_get_max_threads();
    return req == 0 ? avail : (req < avail ? req : avail);
#else
    return 1;
#endif
}

// Serial reference for the ensemble map; kept alongside the OpenMP kernel so
// the two can be compared bit-for-bit in tests and benchmarks.
template <typename Fn>
void ensemble_for_serial(std::size_t n, Fn&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Data-parallel ensemble map. Each index writes only to its own pre-sized
// slot, so the result is independent of the schedule and thread count.
template <typename Fn>
void ensemble_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    const int threads = effective_threads();
    if (threads > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    ensemble_for_serial(n, fn);
}

} // namespace rds

#endif
