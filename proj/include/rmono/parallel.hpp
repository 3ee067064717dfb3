#ifndef RMONO_PARALLEL_HPP
#define RMONO_PARALLEL_HPP

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rmono {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Run f(i) for i in [0, n).  Iterations must be independent.
/// With parallel = false (or without OpenMP) this is the serial
/// reference path used by the tests and the benchmark.
template <class F>
void parallel_for(std::int64_t n, F&& f, bool parallel = true) {
#ifdef _OPENMP
    if (parallel && n > 1) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
#else
    (void)parallel;
#endif
    for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace rmono

#endif
