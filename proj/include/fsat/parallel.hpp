#pragma once

#include <cstddef>

namespace fsat {

// Number of hardware threads visible to OpenMP.
int hardware_threads();

// Resolve a user thread request: 0 means "all hardware threads".
int resolve_threads(int requested);

namespace detail {
void parallel_for_impl(std::size_t n, int threads, void (*body)(std::size_t, void*), void* ctx);
}

// Runs body(i) for i in [0, n). threads <= 1 runs the plain serial loop;
// threads > 1 dispatches to an OpenMP parallel-for. Bodies must write to
// disjoint slots; reductions are the caller's job (do them serially in
// index order to keep results independent of the thread count).
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    auto trampoline = [](std::size_t i, void* ctx) { (*static_cast<F*>(ctx))(i); };
    detail::parallel_for_impl(n, threads, trampoline, &body);
}

}  // namespace fsat
