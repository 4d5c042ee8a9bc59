#pragma once

namespace fsda {

// Thread count used by the matvec and graph kernels. Without OpenMP these
// are no-ops and every kernel runs serially.
void set_num_threads(int threads);
int num_threads();
bool have_openmp();

}  // namespace fsda
