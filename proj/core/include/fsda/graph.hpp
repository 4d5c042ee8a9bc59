#pragma once

#include "fsda/sparse.hpp"

namespace fsda {

// Binary, symmetric similarity matrix with zero diagonal and its degrees.
struct SimilarityGraph {
  SparseMatrix s;
  Vector degrees;
};

// L = D - S.
struct Laplacian {
  SparseMatrix l;
};

// |a ∩ b| / |a ∪ b| over the stored column supports (values are ignored).
// Two empty supports give 0.
double tanimoto(RowView a, RowView b);

enum class NeighborSearch {
  // Only pairs sharing at least one feature are scored (exact: all other
  // pairs have similarity 0).
  inverted_index,
  // Every pair is scored with a sparse-dot kernel; the reference path.
  brute_force,
};

// Symmetric union of the directed k-nearest-neighbour relation under
// Tanimoto similarity. Ties at the k-th place go to the lowest sample index,
// so exactly k directed edges leave every sample. Requires 1 <= k < N.
SimilarityGraph knn_graph(const SparseMatrix& x, Index k,
                          NeighborSearch search = NeighborSearch::inverted_index);

// Edge (i, j), i != j, iff tanimoto(x_i, x_j) >= theta. Requires theta in (0, 1].
SimilarityGraph threshold_graph(const SparseMatrix& x, double theta,
                                NeighborSearch search = NeighborSearch::inverted_index);

// Wraps an existing adjacency matrix after checking it is square, symmetric,
// binary with zero diagonal. Used for graphs read from disk.
SimilarityGraph graph_from_adjacency(SparseMatrix s);

Laplacian laplacian(const SimilarityGraph& g);

}  // namespace fsda
