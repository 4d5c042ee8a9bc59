#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsda/sparse.hpp"

namespace fsda {

// Per-sample ternary label: +1 class 1, -1 class 2, 0 unlabeled.
class LabelVector {
 public:
  LabelVector() = default;
  // Throws PreconditionError on a value outside {-1, 0, +1}.
  explicit LabelVector(std::vector<std::int8_t> labels);
  static LabelVector from_ints(std::span<const int> labels);

  std::size_t size() const { return labels_.size(); }
  std::int8_t operator[](std::size_t i) const { return labels_[i]; }
  std::span<const std::int8_t> values() const { return labels_; }

  Index n_labeled() const { return n_class1_ + n_class2_; }
  Index n_class1() const { return n_class1_; }
  Index n_class2() const { return n_class2_; }

  // True when every labeled sample precedes every unlabeled one.
  bool labeled_prefix() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::int8_t> labels_;
  Index n_class1_ = 0;
  Index n_class2_ = 0;
};

// Stable reordering that moves labeled samples first: new position i holds
// old sample order[i]. The SDA operators assume this layout.
std::vector<Index> labeled_first_order(const LabelVector& labels);
LabelVector permute_labels(const LabelVector& labels, std::span<const Index> order);

// Scatters values computed in permuted order back to the original order.
Vector unpermute(std::span<const double> permuted, std::span<const Index> order);

// mu_l = X^T 1_l / l, the mean of the labeled rows.
struct CenteringVector {
  Vector mu_labeled;
  Index n_labeled = 0;
};

// Requires labels.labeled_prefix() and at least one labeled sample.
CenteringVector labeled_mean(const SparseMatrix& x, const LabelVector& labels);

// (X - 1 mu^T) v = X v - 1 <mu, v>; X stays sparse.
Vector centered_matvec(const SparseMatrix& x, const CenteringVector& c, std::span<const double> v);
void centered_matvec(const SparseMatrix& x, const CenteringVector& c, std::span<const double> v,
                     std::span<double> y);

// (X - 1 mu^T)^T w = X^T w - mu * sum(w).
Vector centered_matvec_transpose(const SparseMatrix& x, const CenteringVector& c,
                                 std::span<const double> w);
void centered_matvec_transpose(const SparseMatrix& x, const CenteringVector& c,
                               std::span<const double> w, std::span<double> y);

}  // namespace fsda
