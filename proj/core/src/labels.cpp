#include "fsda/labels.hpp"

#include <string>

#include "fsda/error.hpp"

namespace fsda {

LabelVector::LabelVector(std::vector<std::int8_t> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    switch (labels_[i]) {
      case 1: ++n_class1_; break;
      case -1: ++n_class2_; break;
      case 0: break;
      default:
        throw PreconditionError("label at index " + std::to_string(i) +
                                " is not one of +1, -1, 0");
    }
  }
}

LabelVector LabelVector::from_ints(std::span<const int> labels) {
  std::vector<std::int8_t> v(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < -1 || labels[i] > 1)
      throw PreconditionError("label at index " + std::to_string(i) + " is not one of +1, -1, 0");
    v[i] = static_cast<std::int8_t>(labels[i]);
  }
  return LabelVector(std::move(v));
}

bool LabelVector::labeled_prefix() const {
  const auto l = static_cast<std::size_t>(n_labeled());
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if ((labels_[i] != 0) != (i < l)) return false;
  return true;
}

std::vector<Index> labeled_first_order(const LabelVector& labels) {
  std::vector<Index> order;
  order.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != 0) order.push_back(static_cast<Index>(i));
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 0) order.push_back(static_cast<Index>(i));
  return order;
}

LabelVector permute_labels(const LabelVector& labels, std::span<const Index> order) {
  check_dimension("label permutation", labels.size(), order.size());
  std::vector<std::int8_t> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = labels[static_cast<std::size_t>(order[i])];
  return LabelVector(std::move(out));
}

Vector unpermute(std::span<const double> permuted, std::span<const Index> order) {
  check_dimension("unpermute", order.size(), permuted.size());
  Vector out(permuted.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[static_cast<std::size_t>(order[i])] = permuted[i];
  return out;
}

CenteringVector labeled_mean(const SparseMatrix& x, const LabelVector& labels) {
  check_dimension("labels vs data rows", static_cast<std::size_t>(x.rows()), labels.size());
  const Index l = labels.n_labeled();
  if (l < 1) throw PreconditionError("labeled_mean requires at least one labeled sample");
  if (!labels.labeled_prefix())
    throw PreconditionError("labeled samples must occupy the first rows of the data matrix");
  CenteringVector c{Vector(static_cast<std::size_t>(x.cols()), 0.0), l};
  for (Index i = 0; i < l; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) c.mu_labeled[r.cols[k]] += r.values[k];
  }
  scale(1.0 / static_cast<double>(l), c.mu_labeled);
  return c;
}

void centered_matvec(const SparseMatrix& x, const CenteringVector& c, std::span<const double> v,
                     std::span<double> y) {
  check_dimension("centering vector", static_cast<std::size_t>(x.cols()), c.mu_labeled.size());
  matvec(x, v, y);
  const double shift = dot(c.mu_labeled, v);
  for (double& yi : y) yi -= shift;
}

Vector centered_matvec(const SparseMatrix& x, const CenteringVector& c, std::span<const double> v) {
  Vector y(static_cast<std::size_t>(x.rows()));
  centered_matvec(x, c, v, y);
  return y;
}

void centered_matvec_transpose(const SparseMatrix& x, const CenteringVector& c,
                               std::span<const double> w, std::span<double> y) {
  check_dimension("centering vector", static_cast<std::size_t>(x.cols()), c.mu_labeled.size());
  matvec_transpose(x, w, y);
  axpy(-sum(w), c.mu_labeled, y);
}

Vector centered_matvec_transpose(const SparseMatrix& x, const CenteringVector& c,
                                 std::span<const double> w) {
  Vector y(static_cast<std::size_t>(x.cols()));
  centered_matvec_transpose(x, c, w, y);
  return y;
}

}  // namespace fsda
