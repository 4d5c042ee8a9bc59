#include "fsda/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fsda/error.hpp"

namespace fsda {

namespace {

// Shared by tanimoto() and the graph builders so every path rounds alike.
double jaccard(Index intersection, Index union_size) {
  return union_size == 0 ? 0.0
                         : static_cast<double>(intersection) / static_cast<double>(union_size);
}

Index intersection_size(std::span<const Index> a, std::span<const Index> b) {
  Index n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

struct Candidate {
  Index j;
  Index common;
  Index union_size;
};

// a ranks ahead of b: higher similarity, then lower index. Exact rational
// comparison so equal similarities tie regardless of representation.
bool ranks_ahead(const Candidate& a, const Candidate& b) {
  const Index lhs = a.common * b.union_size;
  const Index rhs = b.common * a.union_size;
  if (lhs != rhs) return lhs > rhs;
  return a.j < b.j;
}

// Calls visit(i, candidates) for every query row i, where candidates holds
// every j != i with nonzero similarity (inverted index) or every j != i
// (brute force). Candidates arrive in ascending j order.
template <class Visit>
void for_each_row_candidates(const SparseMatrix& x, NeighborSearch search, Visit&& visit) {
  const Index n = x.rows();
  if (search == NeighborSearch::brute_force) {
#ifdef FSDA_HAVE_OPENMP
#pragma omp parallel
#endif
    {
      std::vector<Candidate> cands;
#ifdef FSDA_HAVE_OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
      for (Index i = 0; i < n; ++i) {
        cands.clear();
        const auto a = x.row(i).cols;
        for (Index j = 0; j < n; ++j) {
          if (j == i) continue;
          const auto b = x.row(j).cols;
          const Index c = intersection_size(a, b);
          cands.push_back({j, c, static_cast<Index>(a.size() + b.size()) - c});
        }
        visit(i, cands);
      }
    }
    return;
  }

  const SparseMatrix postings = transpose(x);
#ifdef FSDA_HAVE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<Index> counts(static_cast<std::size_t>(n), 0);
    std::vector<Index> touched;
    std::vector<Candidate> cands;
#ifdef FSDA_HAVE_OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
    for (Index i = 0; i < n; ++i) {
      touched.clear();
      cands.clear();
      const auto a = x.row(i).cols;
      for (Index f : a) {
        for (Index j : postings.row(f).cols) {
          if (j == i) continue;
          if (counts[j]++ == 0) touched.push_back(j);
        }
      }
      std::sort(touched.begin(), touched.end());
      for (Index j : touched) {
        const Index c = counts[j];
        cands.push_back({j, c, static_cast<Index>(a.size()) + x.row_nnz(j) - c});
        counts[j] = 0;
      }
      visit(i, cands);
    }
  }
}

SimilarityGraph assemble(Index n, std::vector<std::vector<Index>>& adjacency) {
  // Symmetric union of directed edges.
  std::vector<std::vector<Index>> sym(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j : adjacency[i]) {
      sym[i].push_back(j);
      sym[j].push_back(i);
    }
  }
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> cols;
  for (Index i = 0; i < n; ++i) {
    auto& r = sym[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    cols.insert(cols.end(), r.begin(), r.end());
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  std::vector<double> vals(cols.size(), 1.0);
  SimilarityGraph g{SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals)), {}};
  g.degrees.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) g.degrees[i] = static_cast<double>(g.s.row_nnz(i));
  return g;
}

}  // namespace

double tanimoto(RowView a, RowView b) {
  const Index c = intersection_size(a.cols, b.cols);
  return jaccard(c, static_cast<Index>(a.size() + b.size()) - c);
}

SimilarityGraph knn_graph(const SparseMatrix& x, Index k, NeighborSearch search) {
  const Index n = x.rows();
  if (k < 1 || k >= n)
    throw PreconditionError("knn_graph: k must satisfy 1 <= k < N (k = " + std::to_string(k) +
                            ", N = " + std::to_string(n) + ")");
  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(n));
  for_each_row_candidates(x, search, [&](Index i, std::vector<Candidate>& cands) {
    // Zero-similarity candidates are interchangeable with unlisted samples, so
    // rank only positive ones and fill any shortfall by lowest index.
    std::erase_if(cands, [](const Candidate& c) { return c.common == 0; });
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), cands.end(),
                      ranks_ahead);
    auto& out = adjacency[i];
    for (std::size_t t = 0; t < take; ++t) out.push_back(cands[t].j);
    if (static_cast<Index>(out.size()) < k) {
      std::vector<Index> chosen = out;
      std::sort(chosen.begin(), chosen.end());
      for (Index j = 0; j < n && static_cast<Index>(out.size()) < k; ++j) {
        if (j == i || std::binary_search(chosen.begin(), chosen.end(), j)) continue;
        out.push_back(j);
      }
    }
  });
  return assemble(n, adjacency);
}

SimilarityGraph threshold_graph(const SparseMatrix& x, double theta, NeighborSearch search) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw PreconditionError("threshold_graph: theta must lie in (0, 1]");
  const Index n = x.rows();
  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(n));
  for_each_row_candidates(x, search, [&](Index i, std::vector<Candidate>& cands) {
    for (const auto& c : cands) {
      if (c.j > i && jaccard(c.common, c.union_size) >= theta) adjacency[i].push_back(c.j);
    }
  });
  return assemble(n, adjacency);
}

SimilarityGraph graph_from_adjacency(SparseMatrix s) {
  if (s.rows() != s.cols()) throw StructuralError("similarity matrix must be square");
  for (double v : s.values())
    if (v != 1.0) throw StructuralError("similarity matrix must be binary");
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j : s.row(i).cols) {
      if (j == i) throw StructuralError("similarity matrix must have a zero diagonal");
      const auto back = s.row(j).cols;
      if (!std::binary_search(back.begin(), back.end(), i))
        throw StructuralError("similarity matrix is not symmetric at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
    }
  }
  SimilarityGraph g{std::move(s), {}};
  g.degrees.resize(static_cast<std::size_t>(g.s.rows()));
  for (Index i = 0; i < g.s.rows(); ++i) g.degrees[i] = static_cast<double>(g.s.row_nnz(i));
  return g;
}

Laplacian laplacian(const SimilarityGraph& g) {
  const Index n = g.s.rows();
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<std::size_t>(g.s.nnz() + n));
  vals.reserve(static_cast<std::size_t>(g.s.nnz() + n));
  for (Index i = 0; i < n; ++i) {
    const auto r = g.s.row(i);
    bool diagonal_done = g.degrees[i] == 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!diagonal_done && r.cols[k] > i) {
        cols.push_back(i);
        vals.push_back(g.degrees[i]);
        diagonal_done = true;
      }
      cols.push_back(r.cols[k]);
      vals.push_back(-r.values[k]);
    }
    if (!diagonal_done) {
      cols.push_back(i);
      vals.push_back(g.degrees[i]);
    }
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  return {SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals))};
}

}  // namespace fsda
