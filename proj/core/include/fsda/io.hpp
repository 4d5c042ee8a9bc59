#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fsda/labels.hpp"
#include "fsda/sparse.hpp"

namespace fsda::io {

// Text sparse format:
//   % optional comment / provenance lines ("% key value")
//   rows cols nnz
//   row col value        (nnz lines, 0-based)
// Values are written with 17 significant digits so text round-trips exactly.
//
// Binary sparse format (little-endian):
//   8 bytes magic "FSDASPM1"
//   int64 rows, int64 cols, int64 nnz
//   int64 row_offsets[rows + 1], int64 col_indices[nnz], float64 values[nnz]

inline constexpr char kSparseMagic[8] = {'F', 'S', 'D', 'A', 'S', 'P', 'M', '1'};
inline constexpr char kRatingsMagic[8] = {'F', 'S', 'D', 'A', 'R', 'A', 'T', '1'};

// Provenance entries carried as "% key value" lines ahead of the header.
using Provenance = std::map<std::string, std::string>;

void write_sparse_text(std::ostream& out, const SparseMatrix& m, const Provenance& provenance = {});
SparseMatrix read_sparse_text(std::istream& in, Provenance* provenance = nullptr);

void write_sparse_binary(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_sparse_binary(std::istream& in);

// File helpers: the reader sniffs the binary magic and falls back to text.
void save_sparse(const std::filesystem::path& path, const SparseMatrix& m, bool binary,
                 const Provenance& provenance = {});
SparseMatrix load_sparse(const std::filesystem::path& path, Provenance* provenance = nullptr);

// One integer per line in {+1, -1, 0}; blank lines and '#' comments skipped.
LabelVector read_labels(std::istream& in);
void write_labels(std::ostream& out, const LabelVector& labels);
LabelVector load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelVector& labels);

// Ratings container (little-endian): magic "FSDARAT1", int64 n_betas,
// int64 n_samples, float64 betas[n_betas], float64 scores[n_betas][n_samples].
struct RatingsTable {
  std::vector<double> betas;
  std::vector<Vector> scores;  // one vector per beta

  friend bool operator==(const RatingsTable&, const RatingsTable&) = default;
};

void write_ratings_binary(std::ostream& out, const RatingsTable& table);
RatingsTable read_ratings_binary(std::istream& in);
// CSV dump: "sample,beta,score" rows.
void write_ratings_text(std::ostream& out, const RatingsTable& table);

std::string hex64(std::uint64_t v);

}  // namespace fsda::io
