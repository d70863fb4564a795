#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace poclab {

// Worker count resolution: explicit argument > POC_LAB_WORKERS > hardware.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("POC_LAB_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Parallel map over [0, n). Each index writes only its own outputs, so the
// result is independent of the thread count.
template <typename F>
void parallel_for(long n, int workers, F&& body) {
    workers = resolve_workers(workers);
#ifdef _OPENMP
    if (workers > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(workers)
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    (void)workers;
    for (long i = 0; i < n; ++i) body(i);
}

}  // namespace poclab
