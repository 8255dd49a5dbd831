#include "sureshrink/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sureshrink {

void apply_thread_cap_from_env() {
#ifdef _OPENMP
    const char* raw = std::getenv("SURESHRINK_THREADS");
    if (!raw || !*raw)
        return;
    int cap = 0;
    try {
        cap = std::stoi(raw);
    } catch (...) {
        return;  // malformed values are ignored rather than fatal
    }
    // The value is taken as the exact team size, not just an upper bound:
    // asking for more workers than cores still creates that many threads
    // (they timeshare), so determinism under varying counts can be checked
    // on any host. Results are identical either way by construction.
    if (cap >= 1)
        omp_set_num_threads(cap);
#endif
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace sureshrink
