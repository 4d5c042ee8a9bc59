#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsda/graph.hpp"
#include "fsda/krylov.hpp"
#include "fsda/labels.hpp"
#include "fsda/sparse.hpp"

namespace fsda {

// Tolerance and iteration budget for one family of linear solves.
struct SolveBudget {
  double tol = 1e-6;
  int max_iter = 1000;
};

// Everything one SDA solve needs. Labeled samples must come first
// (labels.labeled_prefix()); prepare_problem() performs that reordering.
struct SdaProblem {
  std::shared_ptr<const SparseMatrix> x;        // N x D
  LabelVector labels;                           // N
  std::shared_ptr<const Laplacian> laplacian;   // N x N; may be null when alpha == 0
  double alpha = 0.5;
  ShiftGrid betas = ShiftGrid({1e-3});
  SolveBudget sample_solve;   // N-dimensional solves (k1)
  SolveBudget feature_solve;  // D-dimensional solves (k2)
  std::uint64_t seed = 1;

  // Throws PreconditionError/DimensionError on an inconsistent problem.
  void validate() const;
};

enum class Algorithm { fsda, csr_sda, sa_sda, sr_sda, lda };

std::string_view to_string(Algorithm a);
// Accepts "fsda", "csr-sda", "sa-sda", "sr-sda", "lda".
Algorithm parse_algorithm(std::string_view name);

enum class RatingSource { projection, spectral };

struct RatingVector {
  Vector scores;
  RatingSource source = RatingSource::projection;
};

struct SolveReport {
  // Unshifted spectral-phase solve (CSR-SDA, SR-SDA).
  int sample_iterations = 0;
  bool sample_converged = true;
  // The shifted solve that produces the ratings (FSDA and SA-SDA directly,
  // the regression phase for CSR/SR-SDA), per beta.
  std::vector<int> shifted_iterations;
  std::vector<double> residual_norms;
  std::vector<bool> converged;
  std::int64_t sample_applications = 0;      // applications of the N-dim operator
  std::int64_t feature_applications = 0;     // applications of the D-dim operator
  double lambda_nondiscriminative = 0.0;     // SR-SDA only
  double lambda_discriminative = 0.0;        // SR-SDA only
  double wall_ms = 0.0;
};

// Ratings for every beta of the grid, in grid order.
struct SdaSolution {
  std::vector<double> betas;
  std::vector<RatingVector> ratings;
  std::vector<Vector> directions;  // feature-space w per beta; empty for SA-SDA
  Vector spectral;                 // sample-space z (CSR/SR-SDA), empty otherwise
  SolveReport report;

  bool all_converged() const;
  const RatingVector& rating_for(double beta) const;
};

// (1 - alpha) * (z restricted to labeled rows) + alpha * L z.
Vector apply_smoother(const LabelVector& labels, const Laplacian* l, double alpha,
                      std::span<const double> z);
void apply_smoother(const LabelVector& labels, const Laplacian* l, double alpha,
                    std::span<const double> z, std::span<double> out);

// (W ⊕ 0) z: labeled rows of each class receive that class's mean of z,
// unlabeled rows 0. Applied without forming W.
Vector apply_w(const LabelVector& labels, std::span<const double> z);
void apply_w(const LabelVector& labels, std::span<const double> z, std::span<double> out);

// Implicit operators. Each keeps references to the problem's data; the
// problem must outlive the operator.
LinearOperator smoother_operator(const SdaProblem& p);               // M, N x N
LinearOperator centered_smoother_operator(const SdaProblem& p);      // Mc, N x N
LinearOperator w_operator(const SdaProblem& p);                      // W ⊕ 0, N x N
LinearOperator gram_operator(const SparseMatrix& x);                 // X^T X, D x D
LinearOperator fsda_operator(const SdaProblem& p, const CenteringVector& c);  // Xc^T M X, D x D

SdaSolution fsda_solve(const SdaProblem& p);
SdaSolution csr_sda_solve(const SdaProblem& p);
SdaSolution sa_sda_solve(const SdaProblem& p);
SdaSolution sr_sda_solve(const SdaProblem& p);
// Regularized LDA: FSDA with alpha = 0.
SdaSolution lda_solve(const SdaProblem& p);
SdaSolution solve(Algorithm algorithm, const SdaProblem& p);

// Scores arbitrary rows (same feature space) with a direction: s = X w.
Vector project(const SparseMatrix& x, std::span<const double> w);

// A problem built from data in arbitrary order. `order` maps problem rows to
// original rows; restore() puts per-sample vectors back in original order.
struct PreparedProblem {
  SdaProblem problem;
  std::vector<Index> order;

  Vector restore(std::span<const double> permuted) const;
};

// Reorders X, the graph Laplacian and the labels so labeled samples come
// first. The Laplacian may be null when alpha = 0.
PreparedProblem prepare_problem(const SparseMatrix& x, const Laplacian* l,
                                const LabelVector& labels, SdaProblem settings);

}  // namespace fsda
