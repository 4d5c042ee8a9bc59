#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsda/dense.hpp"

namespace fsda {

using Index = std::int64_t;

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

// One row of a SparseMatrix: strictly increasing column indices and their values.
struct RowView {
  std::span<const Index> cols;
  std::span<const double> values;

  std::size_t size() const { return cols.size(); }
};

// Row-compressed sparse real matrix. Immutable once built; every instance
// satisfies the canonical-form invariants (see validate()).
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_{0} {}

  // Takes ownership of CSR arrays. Throws StructuralError unless the arrays
  // are canonical: offsets start at 0 and are non-decreasing, columns are in
  // range and strictly increasing per row, no stored zeros.
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  RowView row(Index i) const;
  Index row_nnz(Index i) const { return row_offsets_[i + 1] - row_offsets_[i]; }

  // Sum of squares of stored values.
  double frobenius_norm() const;

  // FNV-1a over shape and CSR arrays; identifies a matrix independently of
  // the file it was read from.
  std::uint64_t checksum() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

// Canonicalizes an unordered triplet list. Out-of-range indices and duplicate
// (row, col) pairs are rejected with StructuralError; explicit zero values are
// dropped.
SparseMatrix build_sparse(std::span<const Triplet> triplets, Index rows, Index cols);

// Row-major triplet listing of the stored entries.
std::vector<Triplet> to_triplets(const SparseMatrix& m);

SparseMatrix identity(Index n);
SparseMatrix transpose(const SparseMatrix& m);

// y = X v. Parallel over rows; deterministic for any thread count.
Vector matvec(const SparseMatrix& x, std::span<const double> v);
void matvec(const SparseMatrix& x, std::span<const double> v, std::span<double> y);

// y = X^T w without forming the transpose. With several threads each thread
// scatters into a private buffer and buffers are reduced in thread order, so
// results are deterministic for a fixed thread count only.
Vector matvec_transpose(const SparseMatrix& x, std::span<const double> w);
void matvec_transpose(const SparseMatrix& x, std::span<const double> w, std::span<double> y);

// Rows reordered so that new row i is old row order[i].
SparseMatrix permute_rows(const SparseMatrix& m, std::span<const Index> order);

// P M P^T for a square matrix: new (i, j) is old (order[i], order[j]).
SparseMatrix permute_symmetric(const SparseMatrix& m, std::span<const Index> order);

// Row subset in the given order.
SparseMatrix select_rows(const SparseMatrix& m, std::span<const Index> rows);

}  // namespace fsda
