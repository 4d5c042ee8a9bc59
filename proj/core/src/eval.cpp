#include "fsda/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "fsda/error.hpp"

namespace fsda {

double auc_roc(std::span<const double> scores, std::span<const std::int8_t> truth) {
  check_dimension("auc scores vs labels", truth.size(), scores.size());
  std::vector<std::pair<double, bool>> items;
  items.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] == 0) continue;
    if (!std::isfinite(scores[i])) throw NumericalError("auc_roc: non-finite score");
    items.emplace_back(scores[i], truth[i] > 0);
  }
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j].first == items[i].first) ++j;
    // Ranks i+1 .. j share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (items[k].second) {
        positive_rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(items.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0)
    throw PreconditionError("auc_roc needs at least one positive and one negative sample");
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double auc_roc(std::span<const double> scores, const LabelVector& truth,
               std::span<const Index> subset) {
  check_dimension("auc scores vs labels", truth.size(), scores.size());
  std::vector<double> s;
  std::vector<std::int8_t> t;
  s.reserve(subset.size());
  t.reserve(subset.size());
  for (Index i : subset) {
    s.push_back(scores[static_cast<std::size_t>(i)]);
    t.push_back(truth[static_cast<std::size_t>(i)]);
  }
  return auc_roc(s, t);
}

std::vector<int> stratified_folds(const LabelVector& labels, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw PreconditionError("need at least two folds");
  std::vector<int> folds(labels.size(), -1);
  std::mt19937_64 gen(seed);
  std::size_t dealt = 0;
  for (std::int8_t cls : {std::int8_t{1}, std::int8_t{-1}}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    if (members.size() < static_cast<std::size_t>(n_folds))
      throw PreconditionError("cannot build " + std::to_string(n_folds) +
                              " stratified folds: class " + std::to_string(cls) + " has only " +
                              std::to_string(members.size()) + " labeled samples");
    std::shuffle(members.begin(), members.end(), gen);
    for (std::size_t i : members) folds[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(n_folds));
  }
  return folds;
}

namespace {

std::vector<int> plain_folds(const LabelVector& labels, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw PreconditionError("need at least two folds");
  std::vector<int> folds(labels.size(), -1);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != 0) members.push_back(i);
  if (members.size() < static_cast<std::size_t>(n_folds))
    throw PreconditionError("fewer labeled samples than folds");
  std::mt19937_64 gen(seed);
  std::shuffle(members.begin(), members.end(), gen);
  for (std::size_t k = 0; k < members.size(); ++k)
    folds[members[k]] = static_cast<int>(k % static_cast<std::size_t>(n_folds));
  return folds;
}

std::vector<Index> fold_members(std::span<const int> folds, int fold) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < folds.size(); ++i)
    if (folds[i] == fold) out.push_back(static_cast<Index>(i));
  return out;
}

// Mixes the seed with the outer fold index so inner splits differ per fold.
std::uint64_t inner_seed(std::uint64_t seed, int fold) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fold), 0x5eedu};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

LabelVector hide_fold(const LabelVector& labels, std::span<const int> folds, int fold) {
  check_dimension("fold assignment", labels.size(), folds.size());
  std::vector<std::int8_t> out(labels.values().begin(), labels.values().end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (folds[i] == fold) out[i] = 0;
  return LabelVector(std::move(out));
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  if (values.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

void aggregate(ExperimentResult& result) {
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return a.seed != b.seed ? a.seed < b.seed : a.fold < b.fold;
  });
  std::vector<double> aucs, times;
  for (const auto& r : result.records) {
    aucs.push_back(r.auc);
    times.push_back(r.wall_ms);
  }
  std::tie(result.mean_auc, result.std_auc) = mean_and_std(aucs);
  result.mean_wall_ms = mean_and_std(times).first;
}

ExperimentResult nested_cv(const SparseMatrix& x, const Laplacian* l, const LabelVector& labels,
                           Algorithm algorithm, const SdaProblem& settings, const CvPlan& plan) {
  if (plan.seeds.empty()) throw PreconditionError("cross-validation needs at least one seed");
  auto make_folds = [&](const LabelVector& lv, int n, std::uint64_t seed) {
    return plan.stratified ? stratified_folds(lv, n, seed) : plain_folds(lv, n, seed);
  };

  ExperimentResult result;
  result.algorithm = algorithm;
  result.alpha = algorithm == Algorithm::lda ? 0.0 : settings.alpha;
  result.beta_grid.assign(plan.beta_grid.betas().begin(), plan.beta_grid.betas().end());
  result.sample_iterations = settings.sample_solve.max_iter;
  result.feature_iterations = settings.feature_solve.max_iter;
  const std::size_t nb = plan.beta_grid.size();

  for (std::uint64_t seed : plan.seeds) {
    const auto outer = make_folds(labels, plan.outer_folds, seed);
    for (int f = 0; f < plan.outer_folds; ++f) {
      const LabelVector train = hide_fold(labels, outer, f);
      const auto inner = make_folds(train, plan.inner_folds, inner_seed(seed, f));

      FoldRecord rec;
      rec.seed = seed;
      rec.fold = f;
      rec.inner_auc.assign(nb, 0.0);
      for (int g = 0; g < plan.inner_folds; ++g) {
        SdaProblem s = settings;
        s.betas = plan.beta_grid;
        s.seed = seed;
        const auto prepared = prepare_problem(x, l, hide_fold(train, inner, g), s);
        const SdaSolution sol = solve(algorithm, prepared.problem);
        const auto held_out = fold_members(inner, g);
        for (std::size_t b = 0; b < nb; ++b) {
          const Vector scores = prepared.restore(sol.ratings[b].scores);
          rec.inner_auc[b] += auc_roc(scores, train, held_out) / plan.inner_folds;
        }
      }
      // Ascending grid with >= so ties resolve to the larger beta.
      std::size_t best = 0;
      for (std::size_t b = 1; b < nb; ++b)
        if (rec.inner_auc[b] >= rec.inner_auc[best]) best = b;
      rec.chosen_beta = plan.beta_grid[best];

      SdaProblem s = settings;
      s.betas = ShiftGrid({rec.chosen_beta});
      s.seed = seed;
      const auto prepared = prepare_problem(x, l, train, s);
      const SdaSolution sol = solve(algorithm, prepared.problem);
      rec.wall_ms = sol.report.wall_ms;
      rec.auc = auc_roc(prepared.restore(sol.ratings.front().scores), labels, fold_members(outer, f));
      result.records.push_back(std::move(rec));
    }
  }
  aggregate(result);
  return result;
}

LabelVector subsample_labels(const LabelVector& labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw PreconditionError("label fraction must lie in (0, 1]");
  if (labels.n_class1() < 1 || labels.n_class2() < 1)
    throw PreconditionError("subsampling needs labeled samples of both classes");
  if (std::floor(fraction * static_cast<double>(labels.n_labeled())) < 2.0)
    throw PreconditionError("label fraction too small to retain both classes");
  std::vector<std::int8_t> out(labels.size(), 0);
  std::mt19937_64 gen(seed);
  for (std::int8_t cls : {std::int8_t{1}, std::int8_t{-1}}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size()))));
    std::shuffle(members.begin(), members.end(), gen);
    for (std::size_t k = 0; k < keep; ++k) out[members[k]] = cls;
  }
  return LabelVector(std::move(out));
}

ShiftedBenchReport bench_shifted(const SparseMatrix& x, const LabelVector& labels,
                                 const ShiftGrid& grid, double tol, int max_iter) {
  using Clock = std::chrono::steady_clock;
  check_dimension("labels vs data rows", static_cast<std::size_t>(x.rows()), labels.size());
  Vector z(labels.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = labels[i];
  const Vector rhs = matvec_transpose(x, z);
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;

  ShiftedBenchReport rep;
  rep.tol = tol;
  rep.betas.assign(grid.betas().begin(), grid.betas().end());

  const auto gram = gram_operator(x);
  auto t0 = Clock::now();
  const auto shifted = shifted_cg(gram, rhs, grid, opts);
  rep.shifted_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  rep.shifted_iterations = shifted.base_iterations;
  rep.shifted_per_beta = shifted.iterations;

  t0 = Clock::now();
  for (double beta : grid.betas()) {
    const LinearOperator op(x.cols(), [&gram, beta](std::span<const double> v, std::span<double> y) {
      gram.apply(v, y);
      axpy(beta, v, y);
    });
    rep.cg_per_beta.push_back(cg(op, rhs, opts).iterations);
  }
  rep.repeated_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  rep.speedup = rep.shifted_ms > 0.0 ? rep.repeated_ms / rep.shifted_ms : 0.0;
  return rep;
}

}  // namespace fsda
