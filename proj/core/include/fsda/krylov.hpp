#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fsda/dense.hpp"
#include "fsda/sparse.hpp"

namespace fsda {

// Matrix-free symmetric operator: apply(x, y) writes y = A x.
class LinearOperator {
 public:
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator(Index dim, Apply apply);

  Index dim() const { return dim_; }
  void apply(std::span<const double> x, std::span<double> y) const;
  Vector operator()(std::span<const double> x) const;

  // Number of apply() calls made on this operator or any copy of it.
  std::int64_t applications() const { return *count_; }
  void reset_applications() const { *count_ = 0; }

 private:
  Index dim_;
  Apply apply_;
  std::shared_ptr<std::int64_t> count_;
};

// Explicit sparse matrix as an operator.
LinearOperator as_operator(const SparseMatrix& a);

// Strictly ascending, finite, non-negative regularization values.
class ShiftGrid {
 public:
  explicit ShiftGrid(std::vector<double> betas);

  // 1e-9, 1e-8, ..., 1e3 (13 values).
  static ShiftGrid decades(int lo_exponent = -9, int hi_exponent = 3);

  std::span<const double> betas() const { return betas_; }
  std::size_t size() const { return betas_.size(); }
  double operator[](std::size_t s) const { return betas_[s]; }

 private:
  std::vector<double> betas_;
};

struct IterationEvent {
  int iteration = 0;
  // Base residual for CG; per-shift residuals for shifted CG.
  std::span<const double> residual_norms;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 1000;
  // Stop on ||r|| <= tol * ||b|| (default) or on ||r|| <= tol.
  bool relative = true;
  std::function<void(const IterationEvent&)> on_iteration;
};

struct CgResult {
  Vector solution;
  std::vector<double> residual_history;  // ||r_k|| for k = 0..iterations
  int iterations = 0;
  bool converged = false;
};

// Conjugate gradients from a zero start. Throws BreakdownError when
// <p, Bp> = 0 with a nonzero residual and NumericalError on NaN/Inf.
CgResult cg(const LinearOperator& b_op, std::span<const double> rhs, const SolverOptions& opts = {});

struct ShiftedSolveResult {
  std::vector<double> betas;
  std::vector<Vector> solutions;      // solutions[s] solves (B + betas[s] I) w = b
  std::vector<double> residual_norms; // |zeta_s| * ||r|| at the last update of shift s
  std::vector<int> iterations;        // iteration at which shift s froze (or stopped)
  std::vector<bool> converged;
  int base_iterations = 0;            // operator applications performed
};

// Multi-shift CG: all shifts share one Krylov basis of B, so each iteration
// costs one application of B regardless of the grid size. A shift stops
// updating once its residual |zeta_s| ||r|| meets the tolerance; the base
// iteration runs until every shift has stopped or max_iter is reached.
ShiftedSolveResult shifted_cg(const LinearOperator& b_op, std::span<const double> rhs,
                              const ShiftGrid& grid, const SolverOptions& opts = {});

struct BlockCgResult {
  std::vector<Vector> solutions;
  std::vector<double> residual_norms;
  std::vector<bool> converged;
  int iterations = 0;
};

// Block CG over m right-hand sides with a column-deflating guard: directions
// are orthonormalized every step and numerically dependent ones dropped;
// converged columns stop updating. Throws BreakdownError if every direction
// is deflated while columns are still unconverged.
BlockCgResult block_cg(const LinearOperator& b_op, std::span<const Vector> rhs,
                       const SolverOptions& opts = {});

// Solves B V = A R for a block of right-hand sides.
using BlockSolver = std::function<std::vector<Vector>(std::span<const Vector>)>;

// Uniform [-1, 1] random matrix (dim x n_vectors) as column vectors.
std::vector<Vector> uniform_block(Index dim, int n_vectors, std::uint64_t seed);

// One sweep of subspace iteration: V = B^{-1} A R with R uniform on [-1, 1].
// Exact when rank(A) <= n_vectors.
std::vector<Vector> subspace_iteration(const LinearOperator& a_op, const BlockSolver& b_solve,
                                       int n_vectors, std::uint64_t seed);

struct RitzPairs {
  std::array<std::array<double, 2>, 2> q;  // q[0] for lambda1, q[1] for lambda2
  double lambda1 = 0.0;                    // lambda1 >= lambda2
  double lambda2 = 0.0;
};

// Solves Z^T A Z q = lambda Z^T B Z q for the two columns of Z. The q are
// normalized to q^T (Z^T B Z) q = 1. Throws BreakdownError when Z^T B Z is
// singular (dependent columns).
RitzPairs rayleigh_ritz_2x2(std::span<const Vector> z, const LinearOperator& a_op,
                            const LinearOperator& b_op);

}  // namespace fsda
