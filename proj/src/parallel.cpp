#include "patchweave/parallel.hpp"

#include <omp.h>

namespace patchweave {

namespace {
const int default_threads = omp_get_max_threads();
}

void set_thread_count(int n) { omp_set_num_threads(n >= 1 ? n : default_threads); }

int thread_count() { return omp_get_max_threads(); }

}  // namespace patchweave
