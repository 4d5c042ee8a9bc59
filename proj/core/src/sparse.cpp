#include "fsda/sparse.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "fsda/error.hpp"

#ifdef FSDA_HAVE_OPENMP
#include <omp.h>
#endif

namespace fsda {

namespace {

std::string at(Index r, Index c) {
  return "(" + std::to_string(r) + ", " + std::to_string(c) + ")";
}

class Fnv1a {
 public:
  void word(std::uint64_t w) {
    for (int b = 0; b < 8; ++b) {
      hash_ ^= (w >> (8 * b)) & 0xffu;
      hash_ *= 0x100000001b3ull;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0) throw StructuralError("negative matrix shape");
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1)
    throw StructuralError("row_offsets must have rows + 1 entries");
  if (col_indices_.size() != values_.size())
    throw StructuralError("col_indices and values differ in length");
  if (row_offsets_.front() != 0) throw StructuralError("row_offsets[0] must be 0");
  if (row_offsets_.back() != static_cast<Index>(values_.size()))
    throw StructuralError("row_offsets[rows] must equal the number of stored entries");
  for (Index i = 0; i < rows_; ++i) {
    const Index begin = row_offsets_[i];
    const Index end = row_offsets_[i + 1];
    if (end < begin) throw StructuralError("row_offsets decreases at row " + std::to_string(i));
    for (Index k = begin; k < end; ++k) {
      const Index c = col_indices_[k];
      if (c < 0 || c >= cols_) throw StructuralError("column index out of range at " + at(i, c));
      if (k > begin && col_indices_[k - 1] >= c)
        throw StructuralError("columns not strictly increasing in row " + std::to_string(i));
      if (values_[k] == 0.0) throw StructuralError("explicitly stored zero at " + at(i, c));
    }
  }
}

RowView SparseMatrix::row(Index i) const {
  const auto begin = static_cast<std::size_t>(row_offsets_[i]);
  const auto len = static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i]);
  return {std::span<const Index>(col_indices_).subspan(begin, len),
          std::span<const double>(values_).subspan(begin, len)};
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

std::uint64_t SparseMatrix::checksum() const {
  Fnv1a h;
  h.word(static_cast<std::uint64_t>(rows_));
  h.word(static_cast<std::uint64_t>(cols_));
  for (Index o : row_offsets_) h.word(static_cast<std::uint64_t>(o));
  for (Index c : col_indices_) h.word(static_cast<std::uint64_t>(c));
  for (double v : values_) h.word(std::bit_cast<std::uint64_t>(v));
  return h.value();
}

SparseMatrix build_sparse(std::span<const Triplet> triplets, Index rows, Index cols) {
  if (rows < 0 || cols < 0) throw StructuralError("negative matrix shape");
  std::vector<Index> counts(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw StructuralError("triplet index out of range at " + at(t.row, t.col));
    ++counts[t.row + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> col_indices;
  std::vector<double> values;
  col_indices.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& t = triplets[order[k]];
    if (k > 0) {
      const auto& prev = triplets[order[k - 1]];
      if (prev.row == t.row && prev.col == t.col)
        throw StructuralError("duplicate entry at " + at(t.row, t.col));
    }
    if (t.value == 0.0) continue;
    col_indices.push_back(t.col);
    values.push_back(t.value);
    ++offsets[t.row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(col_indices), std::move(values));
}

std::vector<Triplet> to_triplets(const SparseMatrix& m) {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(m.nnz()));
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out.push_back({i, r.cols[k], r.values[k]});
  }
  return out;
}

SparseMatrix identity(Index n) {
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::iota(cols.begin(), cols.end(), Index{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix transpose(const SparseMatrix& m) {
  std::vector<Index> offsets(static_cast<std::size_t>(m.cols()) + 1, 0);
  for (Index c : m.col_indices()) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  std::vector<Index> cols(static_cast<std::size_t>(m.nnz()));
  std::vector<double> vals(static_cast<std::size_t>(m.nnz()));
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const Index dst = next[r.cols[k]]++;
      cols[dst] = i;
      vals[dst] = r.values[k];
    }
  }
  return SparseMatrix(m.cols(), m.rows(), std::move(offsets), std::move(cols), std::move(vals));
}

void matvec(const SparseMatrix& x, std::span<const double> v, std::span<double> y) {
  check_dimension("matvec input", static_cast<std::size_t>(x.cols()), v.size());
  check_dimension("matvec output", static_cast<std::size_t>(x.rows()), y.size());
  const Index* offsets = x.row_offsets().data();
  const Index* cols = x.col_indices().data();
  const double* vals = x.values().data();
  const Index n = x.rows();
#ifdef FSDA_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (x.nnz() > 100000)
#endif
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) s += vals[k] * v[cols[k]];
    y[i] = s;
  }
}

Vector matvec(const SparseMatrix& x, std::span<const double> v) {
  Vector y(static_cast<std::size_t>(x.rows()));
  matvec(x, v, y);
  return y;
}

void matvec_transpose(const SparseMatrix& x, std::span<const double> w, std::span<double> y) {
  check_dimension("matvec_transpose input", static_cast<std::size_t>(x.rows()), w.size());
  check_dimension("matvec_transpose output", static_cast<std::size_t>(x.cols()), y.size());
  const Index* offsets = x.row_offsets().data();
  const Index* cols = x.col_indices().data();
  const double* vals = x.values().data();
  const Index n = x.rows();
  std::fill(y.begin(), y.end(), 0.0);
#ifdef FSDA_HAVE_OPENMP
  const int threads = x.nnz() > 100000 ? omp_get_max_threads() : 1;
  if (threads > 1) {
    std::vector<Vector> partial(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
    {
      const int t = omp_get_thread_num();
      Vector& local = partial[static_cast<std::size_t>(t)];
      local.assign(y.size(), 0.0);
#pragma omp for schedule(static)
      for (Index i = 0; i < n; ++i) {
        const double wi = w[i];
        if (wi == 0.0) continue;
        for (Index k = offsets[i]; k < offsets[i + 1]; ++k) local[cols[k]] += vals[k] * wi;
      }
    }
    for (const auto& local : partial) axpy(1.0, local, y);
    return;
  }
#endif
  for (Index i = 0; i < n; ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) y[cols[k]] += vals[k] * wi;
  }
}

Vector matvec_transpose(const SparseMatrix& x, std::span<const double> w) {
  Vector y(static_cast<std::size_t>(x.cols()));
  matvec_transpose(x, w, y);
  return y;
}

SparseMatrix select_rows(const SparseMatrix& m, std::span<const Index> rows) {
  std::vector<Index> offsets(rows.size() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= m.rows())
      throw StructuralError("row selection index out of range: " + std::to_string(rows[i]));
    const auto r = m.row(rows[i]);
    cols.insert(cols.end(), r.cols.begin(), r.cols.end());
    vals.insert(vals.end(), r.values.begin(), r.values.end());
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  return SparseMatrix(static_cast<Index>(rows.size()), m.cols(), std::move(offsets),
                      std::move(cols), std::move(vals));
}

SparseMatrix permute_rows(const SparseMatrix& m, std::span<const Index> order) {
  check_dimension("row permutation", static_cast<std::size_t>(m.rows()), order.size());
  return select_rows(m, order);
}

SparseMatrix permute_symmetric(const SparseMatrix& m, std::span<const Index> order) {
  if (m.rows() != m.cols()) throw DimensionError("permute_symmetric needs a square matrix");
  check_dimension("symmetric permutation", static_cast<std::size_t>(m.rows()), order.size());
  std::vector<Index> inverse(order.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= m.rows() || inverse[order[i]] != -1)
      throw StructuralError("not a permutation");
    inverse[order[i]] = static_cast<Index>(i);
  }
  std::vector<Index> offsets(order.size() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<std::size_t>(m.nnz()));
  vals.reserve(static_cast<std::size_t>(m.nnz()));
  std::vector<std::pair<Index, double>> row;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto r = m.row(order[i]);
    row.clear();
    for (std::size_t k = 0; k < r.size(); ++k) row.emplace_back(inverse[r.cols[k]], r.values[k]);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets[i + 1] = static_cast<Index>(cols.size());
  }
  return SparseMatrix(m.rows(), m.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace fsda
