#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsda/graph.hpp"
#include "fsda/krylov.hpp"
#include "fsda/labels.hpp"
#include "fsda/sda.hpp"

namespace fsda {

// Mann-Whitney AUC: probability that a random positive outranks a random
// negative, ties counting 1/2. Uses average ranks, O(n log n). Samples with
// truth 0 are ignored. Throws PreconditionError without both classes.
double auc_roc(std::span<const double> scores, std::span<const std::int8_t> truth);

// AUC over the samples listed in `subset`.
double auc_roc(std::span<const double> scores, const LabelVector& truth,
               std::span<const Index> subset);

// Stratified fold ids for the labeled samples of `labels`: result[i] is the
// fold of sample i, or -1 for unlabeled samples. Each class is shuffled with
// `seed` and dealt round-robin, so every fold holds floor or ceil of
// N_c / n_folds samples of class c. Throws PreconditionError if a class has
// fewer than n_folds samples.
std::vector<int> stratified_folds(const LabelVector& labels, int n_folds, std::uint64_t seed);

// Copy of `labels` with the samples of fold `fold` set to 0.
LabelVector hide_fold(const LabelVector& labels, std::span<const int> folds, int fold);

struct CvPlan {
  int outer_folds = 5;
  int inner_folds = 5;
  ShiftGrid beta_grid = ShiftGrid::decades();
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool stratified = true;
};

struct FoldRecord {
  std::uint64_t seed = 0;
  int fold = 0;
  double auc = 0.0;
  double wall_ms = 0.0;
  double chosen_beta = 0.0;
  std::vector<double> inner_auc;  // mean inner AUC per beta of the grid
};

struct ExperimentResult {
  Algorithm algorithm = Algorithm::fsda;
  double alpha = 0.0;
  std::vector<double> beta_grid;
  int sample_iterations = 0;   // iteration budget of the sweep point (k1)
  int feature_iterations = 0;  // (k2)
  std::vector<FoldRecord> records;  // sorted by (seed, fold)
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample standard deviation (n - 1)
  double mean_wall_ms = 0.0;
};

// Mean and sample standard deviation, reduced in the given order.
std::pair<double, double> mean_and_std(std::span<const double> values);

// Recomputes mean/std/mean time from `records`.
void aggregate(ExperimentResult& result);

// Nested cross-validation over the labeled samples of `labels` (original
// order; X and L are in the same order). For every seed and outer fold the
// inner folds pick the beta with the best mean inner AUC (all betas come
// from one shifted solve; ties go to the larger beta). The outer fold is then
// solved at the chosen beta only; that solve is timed and scored on the
// held-out labels. Held-out samples stay in X and the graph as unlabeled.
// `settings` supplies alpha, budgets; its data fields are ignored.
ExperimentResult nested_cv(const SparseMatrix& x, const Laplacian* l, const LabelVector& labels,
                           Algorithm algorithm, const SdaProblem& settings, const CvPlan& plan);

// Keeps a uniformly random subset of each class's labels of size
// max(1, floor(fraction * N_c)); the rest become unlabeled. Throws
// PreconditionError if fraction is outside (0, 1], a class is missing, or
// floor(fraction * l) < 2 (too few labels to keep both classes).
LabelVector subsample_labels(const LabelVector& labels, double fraction, std::uint64_t seed);

struct ShiftedBenchReport {
  std::vector<double> betas;
  double shifted_ms = 0.0;
  double repeated_ms = 0.0;
  double speedup = 0.0;
  int shifted_iterations = 0;            // shared-basis iterations
  std::vector<int> shifted_per_beta;     // freeze iteration per beta
  std::vector<int> cg_per_beta;          // independent CG iterations per beta
  double tol = 1e-3;
};

// Times the regression-phase system (X^T X + beta I) w = X^T z solved once
// with shifted CG against one CG run per beta. z is the labeled-class
// indicator (+1 / -1 on labeled rows, 0 elsewhere).
ShiftedBenchReport bench_shifted(const SparseMatrix& x, const LabelVector& labels,
                                 const ShiftGrid& grid, double tol = 1e-3, int max_iter = 1000);

}  // namespace fsda
