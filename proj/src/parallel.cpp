#include "hgsim/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgsim {

int resolve_threads(int requested) {
#ifdef _OPENMP
    int n = requested > 0 ? requested : omp_get_max_threads();
#else
    int n = requested > 0 ? requested : 1;
#endif
    if (const char* env = std::getenv("SIM_THREADS")) {
        int cap = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec == std::errc{} && *ptr == '\0' && cap > 0 && cap < n) n = cap;
    }
    return n < 1 ? 1 : n;
}

}  // namespace hgsim
