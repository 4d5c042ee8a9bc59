#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "fsda/sparse.hpp"

// Binary rows with `per_row` random features each; rows of even index draw
// more often from the lower half of the feature range.
inline fsda::SparseMatrix bench_matrix(fsda::Index n, fsda::Index d, fsda::Index per_row, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<fsda::Index> any(0, d - 1), low(0, d / 2 - 1);
  std::vector<fsda::Index> offsets{0}, cols;
  std::vector<fsda::Index> row;
  for (fsda::Index i = 0; i < n; ++i) {
    row.clear();
    while (static_cast<fsda::Index>(row.size()) < per_row) {
      const fsda::Index j = (i % 2 == 0 && rng() % 2) ? low(rng) : any(rng);
      if (std::find(row.begin(), row.end(), j) == row.end()) row.push_back(j);
    }
    std::sort(row.begin(), row.end());
    cols.insert(cols.end(), row.begin(), row.end());
    offsets.push_back(static_cast<fsda::Index>(cols.size()));
  }
  std::vector<double> values(cols.size(), 1.0);
  return fsda::SparseMatrix(n, d, std::move(offsets), std::move(cols), std::move(values));
}

inline std::vector<std::int8_t> bench_labels(fsda::Index n, int every = 3) {
  std::vector<std::int8_t> l(static_cast<std::size_t>(n), 0);
  for (fsda::Index i = 0; i < n; i += every) l[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
  return l;
}
