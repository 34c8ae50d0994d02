#include "medmark/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace medmark {

namespace {
int g_threads = 0;  // 0 = auto
}

void set_threads(int n) {
    g_threads = n < 0 ? 0 : n;
#ifdef _OPENMP
    if (g_threads > 0) omp_set_num_threads(g_threads);
#endif
}

int effective_threads() {
#ifdef _OPENMP
    return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace medmark
