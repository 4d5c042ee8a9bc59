#include <doctest.h>

#include <set>

#include "fsda/error.hpp"
#include "fsda/eval.hpp"
#include "oracle.hpp"

using namespace fsda;

TEST_CASE("auc examples") {
  const std::vector<std::int8_t> t{1, -1, 1, -1};
  CHECK(auc_roc(std::vector<double>{0.9, 0.4, 0.6, 0.1}, t) == 1.0);
  CHECK(auc_roc(std::vector<double>{0.4, 0.9, 0.1, 0.6}, t) == 0.0);
  CHECK(auc_roc(std::vector<double>{1, 1, 1, 1}, t) == 0.5);
  CHECK(auc_roc(std::vector<double>{3, 2, 1, 5, 0}, std::vector<std::int8_t>{1, 0, -1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(auc_roc(std::vector<double>{1, 2}, std::vector<std::int8_t>{1, 1}), PreconditionError);
  CHECK_THROWS_AS(auc_roc(std::vector<double>{1, 2}, std::vector<std::int8_t>{1}), DimensionError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(auc_roc(std::vector<double>{nan, 2}, std::vector<std::int8_t>{1, -1}), NumericalError);
}

TEST_CASE("auc equals the pairwise oracle, ties included") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> len(2, 200), lev(0, 9), cls(0, 1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    std::vector<double> s(n);
    std::vector<std::int8_t> t(n);
    const bool coarse = trial % 2 == 0;  // few distinct levels -> many ties
    for (int i = 0; i < n; ++i) {
      s[i] = coarse ? lev(rng) : u(rng);
      t[i] = cls(rng) ? 1 : -1;
    }
    t[0] = 1;
    t[1] = -1;
    REQUIRE(std::abs(auc_roc(s, t) - oracle::pairwise_auc(s, t)) <= 1e-12);
  }
}

TEST_CASE("auc is invariant under increasing transforms") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(60), e(60);
    std::vector<std::int8_t> t(60);
    for (int i = 0; i < 60; ++i) {
      s[i] = std::round(u(rng) * 4) / 4;
      e[i] = std::exp(3 * s[i]) + 7;
      t[i] = i % 3 ? 1 : -1;
    }
    CHECK(auc_roc(s, t) == auc_roc(e, t));
  }
}

TEST_CASE("stratified folds partition the labeled samples") {
  std::mt19937_64 rng(33);
  std::vector<std::int8_t> lab(120, 0);
  for (auto& v : lab) v = static_cast<std::int8_t>(std::uniform_int_distribution<int>(-1, 1)(rng));
  const LabelVector labels(lab);
  const auto folds = stratified_folds(labels, 5, 7);
  std::vector<int> n1(5), n2(5);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    CHECK((lab[i] == 0) == (folds[i] == -1));
    if (lab[i] == 1) ++n1[folds[i]];
    if (lab[i] == -1) ++n2[folds[i]];
  }
  for (int f = 0; f < 5; ++f) {
    CHECK(n1[f] >= 1);
    CHECK(n2[f] >= 1);
    CHECK(std::abs(n1[f] - labels.n_class1() / 5) <= 1);
    // hidden labels do not leak into training
    const auto train = hide_fold(labels, folds, f);
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (folds[i] == f) CHECK(train[i] == 0);
      else CHECK(train[i] == lab[i]);
    }
  }
  CHECK(stratified_folds(labels, 5, 7) == folds);
  CHECK_THROWS_AS(stratified_folds(LabelVector::from_ints(std::vector<int>{1, 1, -1}), 2, 1), PreconditionError);
}

TEST_CASE("mean and std") {
  const std::vector<double> v{0.5, 0.7, 0.9};
  const auto [m, s] = mean_and_std(v);
  CHECK(m == doctest::Approx(0.7));
  CHECK(s == doctest::Approx(0.2));
  ExperimentResult r;
  for (int f = 4; f >= 0; --f) r.records.push_back({1, f, 0.5 + 0.1 * f, 2.0 * f, 1e-3, {}});
  aggregate(r);
  CHECK(r.records.front().fold == 0);
  std::vector<double> aucs;
  for (const auto& rec : r.records) aucs.push_back(rec.auc);
  const auto [m2, s2] = mean_and_std(aucs);
  CHECK(r.mean_auc == m2);
  CHECK(r.std_auc == s2);
  CHECK(r.mean_wall_ms == 4.0);
}

TEST_CASE("subsample labels") {
  std::vector<int> ints(30, 0);
  for (int i = 0; i < 10; ++i) ints[i] = 1, ints[10 + i] = -1;
  const auto labels = LabelVector::from_ints(ints);
  CHECK(subsample_labels(labels, 1.0, 3) == labels);
  const auto half = subsample_labels(labels, 0.5, 3);
  CHECK(half.n_labeled() == 10);
  CHECK(half.n_class1() == 5);
  CHECK(subsample_labels(labels, 0.5, 3) == half);
  for (std::size_t i = 0; i < 30; ++i)
    if (half[i] != 0) CHECK(half[i] == labels[i]);
  const auto tiny = subsample_labels(labels, 0.1, 4);
  CHECK(tiny.n_class1() == 1);
  CHECK(tiny.n_class2() == 1);
  CHECK_THROWS_AS(subsample_labels(labels, 0.05, 1), PreconditionError);
  CHECK_THROWS_AS(subsample_labels(labels, 0.0, 1), PreconditionError);
  CHECK_THROWS_AS(subsample_labels(labels, 1.5, 1), PreconditionError);
}

namespace {

struct CvFixture {
  SparseMatrix x;
  LabelVector labels;
  Laplacian l;
};

CvFixture cv_fixture(Index n) {
  std::mt19937_64 rng(40);
  auto d = oracle::two_class_binary(n, 30, rng);
  auto labels = oracle::partial_labels(d.truth, 0.3, rng, 10);
  auto l = laplacian(knn_graph(d.x, 5));
  return {std::move(d.x), std::move(labels), std::move(l)};
}

}  // namespace

TEST_CASE("nested cv") {
  const auto f = cv_fixture(500);
  SdaProblem s;
  s.alpha = 0.5;
  s.sample_solve = {1e-6, 200};
  s.feature_solve = {1e-6, 200};
  CvPlan plan;
  CHECK(plan.beta_grid.size() == 13);

  SUBCASE("deterministic with 5 x 5 records") {
    const auto a = nested_cv(f.x, &f.l, f.labels, Algorithm::fsda, s, plan);
    const auto b = nested_cv(f.x, &f.l, f.labels, Algorithm::fsda, s, plan);
    CHECK(a.records.size() == 25);
    CHECK(a.mean_auc == b.mean_auc);
    CHECK(a.std_auc == b.std_auc);
    for (std::size_t i = 0; i < 25; ++i) CHECK(a.records[i].chosen_beta == b.records[i].chosen_beta);
    CHECK(a.mean_auc > 0.8);
    std::vector<double> aucs;
    for (const auto& r : a.records) aucs.push_back(r.auc);
    CHECK(mean_and_std(aucs).first == a.mean_auc);
  }
  SUBCASE("a dominating beta is always chosen") {
    // ties everywhere: a single-feature data set scores every sample alike
    std::vector<Triplet> t;
    for (Index i = 0; i < 60; ++i) t.push_back({i, 0, 1.0});
    const auto x = build_sparse(t, 60, 1);
    std::vector<int> lab(60, 0);
    for (int i = 0; i < 40; ++i) lab[i] = i % 2 ? 1 : -1;
    const auto labels = LabelVector::from_ints(lab);
    SdaProblem lda = s;
    lda.alpha = 0.0;
    CvPlan p2 = plan;
    p2.seeds = {1};
    const auto r = nested_cv(x, nullptr, labels, Algorithm::lda, lda, p2);
    for (const auto& rec : r.records) CHECK(rec.chosen_beta == 1e3);
  }
  SUBCASE("infeasible folds") {
    CHECK_THROWS_AS(nested_cv(f.x, &f.l, LabelVector::from_ints(std::vector<int>(500, 0)), Algorithm::fsda, s, plan),
                    PreconditionError);
  }
}

TEST_CASE("bench_shifted") {
  std::mt19937_64 rng(41);
  const auto d = oracle::two_class_binary(400, 60, rng);
  const auto labels = oracle::partial_labels(d.truth, 0.5, rng);
  const auto one = bench_shifted(d.x, labels, ShiftGrid({1e-3}), 1e-3);
  CHECK(one.cg_per_beta[0] == one.shifted_per_beta[0]);
  const auto many = bench_shifted(d.x, labels, ShiftGrid::decades(-9, 2), 1e-3);
  CHECK(many.betas.size() == 12);
  CHECK(many.cg_per_beta.size() == 12);
  for (std::size_t s = 0; s < 12; ++s) CHECK(std::abs(many.cg_per_beta[s] - many.shifted_per_beta[s]) <= 2);
}

TEST_CASE("single-shift bench has no amortization") {
  std::mt19937_64 rng(42);
  const auto d = oracle::two_class_binary(6000, 300, rng);
  const auto labels = oracle::partial_labels(d.truth, 0.5, rng);
  double shifted = 1e30, repeated = 1e30;
  for (int rep = 0; rep < 5; ++rep) {
    const auto r = bench_shifted(d.x, labels, ShiftGrid({1e-2}), 1e-6);
    shifted = std::min(shifted, r.shifted_ms);
    repeated = std::min(repeated, r.repeated_ms);
  }
  MESSAGE("single-shift ratio " << repeated / shifted);
  CHECK(repeated / shifted <= 1.3);
  CHECK(shifted / repeated <= 1.3);
}
