#include "fsda/parallel.hpp"

#ifdef FSDA_HAVE_OPENMP
#include <omp.h>
#endif

namespace fsda {

void set_num_threads(int threads) {
#ifdef FSDA_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int num_threads() {
#ifdef FSDA_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool have_openmp() {
#ifdef FSDA_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace fsda
