#include <doctest.h>

#include <numeric>

#include "fsda/error.hpp"
#include "fsda/eval.hpp"
#include "fsda/sda.hpp"
#include "oracle.hpp"

using namespace fsda;
using oracle::MatrixXd;
using oracle::VectorXd;

namespace {

struct Fixture {
  SparseMatrix x;
  std::vector<std::int8_t> truth;
  LabelVector labels;
  Laplacian l;
};

Fixture small_problem(std::uint64_t seed, Index n = 60, Index d = 8, double label_rate = 0.3, bool intercept = true) {
  std::mt19937_64 rng(seed);
  auto data = oracle::two_class_binary(n, d, rng, intercept);
  auto labels = oracle::partial_labels(data.truth, label_rate, rng);
  auto l = laplacian(knn_graph(data.x, 3));
  return {std::move(data.x), std::move(data.truth), std::move(labels), std::move(l)};
}

SdaProblem tight_settings(double alpha, std::vector<double> betas, double tol = 1e-10) {
  SdaProblem s;
  s.alpha = alpha;
  s.betas = ShiftGrid(std::move(betas));
  s.sample_solve = {tol, 5000};
  s.feature_solve = {tol, 5000};
  return s;
}

// AUC of restored scores on samples whose label is hidden.
double heldout_auc(const Fixture& f, const Vector& scores) {
  std::vector<std::int8_t> t(f.truth.size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (f.labels[i] == 0) t[i] = f.truth[i];
  return auc_roc(scores, t);
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j - 1);
    i = j;
  }
  return r;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = oracle::vec(ranks(a)), rb = oracle::vec(ranks(b));
  const VectorXd ca = ra.array() - ra.mean(), cb = rb.array() - rb.mean();
  return ca.dot(cb) / (ca.norm() * cb.norm());
}

}  // namespace

TEST_CASE("smoother and W") {
  const auto f = small_problem(1, 12, 6);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3}));
  const auto& lab = p.problem.labels;
  const auto& lp = *p.problem.laplacian;
  const MatrixXd ld = oracle::dense(lp.l);
  const VectorXd z = VectorXd::Random(12);
  const auto zs = oracle::stdvec(z);
  const auto n_l = static_cast<Index>(lab.n_labeled());

  SUBCASE("alpha = 0 masks") {
    const auto y = apply_smoother(lab, &lp, 0.0, zs);
    for (Index i = 0; i < 12; ++i) CHECK(y[i] == (i < n_l ? zs[i] : 0.0));
  }
  SUBCASE("alpha = 1 is L z") {
    CHECK((oracle::vec(apply_smoother(lab, &lp, 1.0, zs)) - ld * z).norm() <= 1e-13);
  }
  SUBCASE("all-ones") {
    const auto y = apply_smoother(lab, &lp, 0.3, std::vector<double>(12, 1.0));
    for (Index i = 0; i < 12; ++i) CHECK(y[i] == doctest::Approx(i < n_l ? 0.7 : 0.0));
  }
  SUBCASE("W against dense") {
    CHECK((oracle::vec(apply_w(lab, zs)) - oracle::dense_w(lab) * z).norm() <= 1e-13);
    std::vector<double> zd(12, 0.0), ones(12, 0.0);
    for (Index i = 0; i < n_l; ++i) zd[i] = lab[i], ones[i] = 1.0;
    CHECK(apply_w(lab, zd) == zd);
    CHECK(apply_w(lab, ones) == ones);
  }
  SUBCASE("2 + 3 split") {
    const auto l5 = LabelVector::from_ints(std::vector<int>{1, 1, -1, -1, -1, 0});
    const std::vector<double> v{1, 3, 2, 4, 9, 7};
    CHECK(apply_w(l5, v) == std::vector<double>{2, 2, 5, 5, 5, 0});
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(apply_w(lab, std::vector<double>(3, 0.0)), DimensionError);
  }
}

TEST_CASE("fsda direction matches the dense pencil") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto f = small_problem(seed);
    const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3}));
    const auto sol = fsda_solve(p.problem);
    const VectorXd ref = oracle::sda_pencil_direction(oracle::dense(*p.problem.x), oracle::dense(p.problem.laplacian->l),
                                                      p.problem.labels, 0.5, 1e-3);
    CHECK(std::abs(oracle::cosine(oracle::vec(sol.directions[0]), ref)) >= 0.999);
    CHECK(sol.all_converged());
  }
}

TEST_CASE("alpha = 0 is regularized LDA") {
  const auto f = small_problem(4);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.0, {1e-2}));
  const auto sol = fsda_solve(p.problem);
  const VectorXd ref = oracle::lda_direction(oracle::dense(*p.problem.x), p.problem.labels, 1e-2);
  CHECK(std::abs(oracle::cosine(oracle::vec(sol.directions[0]), ref)) >= 0.999);

  // lda is an alias of fsda with alpha 0, whatever alpha the problem carries
  auto q = p.problem;
  q.alpha = 0.8;
  const auto lda = lda_solve(q);
  CHECK(lda.ratings[0].scores == sol.ratings[0].scores);
  CHECK(solve(Algorithm::lda, q).ratings[0].scores == sol.ratings[0].scores);
}

TEST_CASE("separable 1-D feature gives perfect held-out AUC") {
  // feature 0 marks class +1, feature 1 class -1; unlabeled points interleaved
  std::vector<Triplet> t;
  std::vector<int> lab;
  std::vector<std::int8_t> truth;
  for (Index i = 0; i < 40; ++i) {
    const bool pos = i % 2 == 0;
    t.push_back({i, pos ? 0 : 1, 1.0});
    t.push_back({i, 2 + i % 5, 1.0});
    truth.push_back(pos ? 1 : -1);
    lab.push_back(i % 4 < 2 ? (pos ? 1 : -1) : 0);
  }
  const auto x = build_sparse(t, 40, 7);
  const auto labels = LabelVector::from_ints(lab);
  const auto l = laplacian(knn_graph(x, 3));
  const auto p = prepare_problem(x, &l, labels, tight_settings(0.5, {1e-3}));
  const auto s = p.restore(fsda_solve(p.problem).ratings[0].scores);
  std::vector<std::int8_t> held(40, 0);
  for (std::size_t i = 0; i < 40; ++i)
    if (labels[i] == 0) held[i] = truth[i];
  CHECK(auc_roc(s, held) == 1.0);
  CHECK(oracle::pairwise_auc(s, held) == 1.0);
}

TEST_CASE("csr-sda agrees with fsda") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = small_problem(seed, 200, 20);
    const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3}));
    const double a = heldout_auc(f, p.restore(csr_sda_solve(p.problem).ratings[0].scores));
    const double b = heldout_auc(f, p.restore(fsda_solve(p.problem).ratings[0].scores));
    CHECK(std::abs(a - b) <= 0.02);
  }
}

TEST_CASE("csr-sda") {
  const auto f = small_problem(5);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3}));
  const auto csr = csr_sda_solve(p.problem);

  // z stays orthogonal to the all-ones (non-discriminative) vector
  CHECK(std::abs(sum(csr.spectral)) <= 1e-8 * norm2(csr.spectral) * std::sqrt(60.0));

  // a 12-value grid costs one D-dimensional basis
  auto q = p.problem;
  q.betas = ShiftGrid::decades(-9, 2);
  const auto many = csr_sda_solve(q);
  int longest = 0;
  for (int it : many.report.shifted_iterations) longest = std::max(longest, it);
  CHECK(many.report.feature_applications <= longest + 1);
  CHECK(many.ratings.size() == 12);
}

TEST_CASE("sa-sda") {
  SUBCASE("alpha = 0 is rejected") {
    const auto f = small_problem(6);
    const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.0, {1e-3}));
    CHECK_THROWS_AS(sa_sda_solve(p.problem), PreconditionError);
    try {
      sa_sda_solve(p.problem);
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
  }
  SUBCASE("two components") {
    // chains 0..9 and 10..19, labels of one class per chain
    std::vector<Triplet> s, t;
    for (Index i = 0; i < 20; ++i) {
      if (i != 9 && i != 19) {
        s.push_back({i, i + 1, 1});
        s.push_back({i + 1, i, 1});
      }
      t.push_back({i, i, 1});
    }
    const auto x = build_sparse(t, 20, 20);
    const auto l = laplacian(graph_from_adjacency(build_sparse(s, 20, 20)));
    std::vector<int> lab(20, 0);
    lab[0] = lab[3] = 1;
    lab[12] = lab[17] = -1;
    const auto labels = LabelVector::from_ints(lab);
    const auto p = prepare_problem(x, &l, labels, tight_settings(0.99, {1e-6}));
    const auto z = p.restore(sa_sda_solve(p.problem).ratings[0].scores);
    for (Index i = 0; i < 20; ++i) CHECK((i < 10 ? z[i] > 0 : z[i] < 0));
  }
  SUBCASE("labeled ranking consistent with csr-sda") {
    const auto f = small_problem(7);
    const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-6}, 1e-12));
    const auto sa = sa_sda_solve(p.problem);
    const auto csr = csr_sda_solve(p.problem);
    const auto n_l = static_cast<std::size_t>(p.problem.labels.n_labeled());
    const std::span<const double> a(sa.ratings[0].scores.data(), n_l), b(csr.spectral.data(), n_l);
    CHECK(spearman(a, b) >= 0.95);
  }
}

TEST_CASE("sr-sda matches csr-sda") {
  for (std::uint64_t seed : {8, 9}) {
    const auto f = small_problem(seed, 80, 12);
    const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-9}, 1e-12));
    const auto sr = sr_sda_solve(p.problem);
    const auto csr = csr_sda_solve(p.problem);
    CHECK(std::abs(heldout_auc(f, p.restore(sr.ratings[0].scores)) - heldout_auc(f, p.restore(csr.ratings[0].scores))) <=
          1e-6);
    CHECK(sr.report.lambda_nondiscriminative == doctest::Approx(1.0 / (1.0 - 0.5)).epsilon(1e-6));
    CHECK(sr.report.lambda_nondiscriminative >= sr.report.lambda_discriminative);
  }
}

TEST_CASE("centered operator annihilates the non-discriminative direction") {
  // the last column is all ones, so X e_8 = 1
  const auto f = small_problem(10, 50, 9);
  SdaProblem s = tight_settings(0.5, {1e-3});
  const auto p = prepare_problem(f.x, &f.l, f.labels, s);
  const auto c = labeled_mean(*p.problem.x, p.problem.labels);
  const auto op = fsda_operator(p.problem, c);
  std::vector<double> w(9, 0.0);
  w[8] = 1.0;
  for (double y : op(w)) CHECK(std::abs(y) <= 1e-10 * p.problem.x->frobenius_norm());
}

TEST_CASE("operator is symmetric") {
  const auto f = small_problem(11);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.4, {1e-3}));
  const auto c = labeled_mean(*p.problem.x, p.problem.labels);
  const auto op = fsda_operator(p.problem, c);
  const auto mc = centered_smoother_operator(p.problem);
  for (int k = 0; k < 10; ++k) {
    const VectorXd v = VectorXd::Random(8), w = VectorXd::Random(8);
    CHECK(oracle::vec(op(oracle::stdvec(v))).dot(w) ==
          doctest::Approx(v.dot(oracle::vec(op(oracle::stdvec(w))))).epsilon(1e-10));
    const VectorXd a = VectorXd::Random(60), b = VectorXd::Random(60);
    CHECK(oracle::vec(mc(oracle::stdvec(a))).dot(b) ==
          doctest::Approx(a.dot(oracle::vec(mc(oracle::stdvec(b))))).epsilon(1e-10));
  }
}

TEST_CASE("scaling w keeps the AUC") {
  const auto f = small_problem(12);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3}));
  const auto sol = fsda_solve(p.problem);
  auto w = sol.directions[0];
  const double a0 = heldout_auc(f, p.restore(project(*p.problem.x, w)));
  scale(37.5, w);
  CHECK(heldout_auc(f, p.restore(project(*p.problem.x, w))) == a0);
}

TEST_CASE("problem validation") {
  const auto f = small_problem(13);
  auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3})).problem;
  p.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), PreconditionError);
  p.alpha = 0.5;
  p.laplacian.reset();
  CHECK_THROWS_AS(p.validate(), PreconditionError);
  auto q = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3})).problem;
  std::vector<std::int8_t> one_class(60, 0);
  one_class[0] = 1;
  q.labels = LabelVector(one_class);
  CHECK_THROWS_AS(q.validate(), PreconditionError);
  CHECK(parse_algorithm("csr-sda") == Algorithm::csr_sda);
  CHECK(to_string(Algorithm::sr_sda) == "sr-sda");
  CHECK_THROWS_AS(parse_algorithm("svm"), PreconditionError);
}

TEST_CASE("solves are deterministic") {
  const auto f = small_problem(14);
  const auto p = prepare_problem(f.x, &f.l, f.labels, tight_settings(0.5, {1e-3, 1e-1}));
  for (auto a : {Algorithm::fsda, Algorithm::csr_sda, Algorithm::sa_sda, Algorithm::sr_sda}) {
    const auto s1 = solve(a, p.problem), s2 = solve(a, p.problem);
    for (std::size_t b = 0; b < 2; ++b) CHECK(s1.ratings[b].scores == s2.ratings[b].scores);
  }
}
