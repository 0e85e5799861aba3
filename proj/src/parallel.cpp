#include "fsat/parallel.hpp"

#include <omp.h>

namespace fsat {

int hardware_threads() { return omp_get_max_threads(); }

int resolve_threads(int requested) {
    if (requested <= 0) return hardware_threads();
    return requested;
}

namespace detail {

void parallel_for_impl(std::size_t n, int threads, void (*body)(std::size_t, void*), void* ctx) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i), ctx);
    }
}

}  // namespace detail
}  // namespace fsat
