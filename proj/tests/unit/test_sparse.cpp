#include <doctest.h>

#include <chrono>

#include "fsda/error.hpp"
#include "fsda/labels.hpp"
#include "fsda/parallel.hpp"
#include "fsda/sparse.hpp"
#include "oracle.hpp"

using namespace fsda;

TEST_CASE("build_sparse canonical form") {
  SUBCASE("empty 2x2") {
    const auto m = build_sparse({}, 2, 2);
    CHECK(m.nnz() == 0);
    CHECK(std::vector<Index>(m.row_offsets().begin(), m.row_offsets().end()) == std::vector<Index>{0, 0, 0});
  }
  SUBCASE("permutation-like") {
    const std::vector<Triplet> t{{0, 1, 1}, {1, 0, 1}};
    const auto m = build_sparse(t, 2, 2);
    CHECK(matvec(m, std::vector<double>{1, 2}) == std::vector<double>{2, 1});
  }
  SUBCASE("unordered input is sorted, zeros dropped") {
    const std::vector<Triplet> t{{1, 2, 3}, {0, 1, 0}, {1, 0, 4}, {0, 2, 5}};
    const auto m = build_sparse(t, 2, 3);
    CHECK(m.nnz() == 3);
    CHECK(std::vector<Index>(m.col_indices().begin(), m.col_indices().end()) == std::vector<Index>{2, 0, 2});
  }
  SUBCASE("errors") {
    const std::vector<Triplet> out{{2, 0, 1}};
    CHECK_THROWS_AS(build_sparse(out, 2, 2), StructuralError);
    const std::vector<Triplet> neg{{0, -1, 1}};
    CHECK_THROWS_AS(build_sparse(neg, 2, 2), StructuralError);
    const std::vector<Triplet> dup{{0, 1, 1}, {0, 1, 2}};
    CHECK_THROWS_AS(build_sparse(dup, 2, 2), StructuralError);
  }
  SUBCASE("CSR constructor validates") {
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1, 1}), StructuralError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1, 1}), StructuralError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {0}, {0.0}), StructuralError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), StructuralError);
  }
}

TEST_CASE("matvec against dense oracle") {
  std::mt19937_64 rng(11);
  CHECK(matvec(identity(3), std::vector<double>{1, 2, 3}) == std::vector<double>{1, 2, 3});
  CHECK(matvec_transpose(identity(3), std::vector<double>{4, 5, 6}) == std::vector<double>{4, 5, 6});
  CHECK(matvec(build_sparse({}, 3, 2), std::vector<double>{1, 2}) == std::vector<double>{0, 0, 0});

  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_sparse(30, 20, 0.2, rng);
    const auto xd = oracle::dense(x);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(20), w = Eigen::VectorXd::Random(30);
    const auto y = oracle::vec(matvec(x, oracle::stdvec(v)));
    const auto yt = oracle::vec(matvec_transpose(x, oracle::stdvec(w)));
    CHECK((y - xd * v).norm() <= 1e-13 * std::max(1.0, (xd * v).norm()));
    CHECK((yt - xd.transpose() * w).norm() <= 1e-13 * std::max(1.0, (xd.transpose() * w).norm()));
    // adjoint identity
    CHECK(std::abs(y.dot(w) - v.dot(yt)) <= 1e-12 * std::max(1.0, std::abs(y.dot(w))));
  }

  const auto x = oracle::random_sparse(5, 4, 0.5, rng);
  std::vector<double> e(5, 0.0);
  e[3] = 1.0;
  CHECK(oracle::vec(matvec_transpose(x, e)).isApprox(oracle::dense(x).row(3).transpose()));
}

TEST_CASE("dimension mismatch is an error") {
  const auto x = identity(3);
  CHECK_THROWS_AS(matvec(x, std::vector<double>{1, 2}), DimensionError);
  CHECK_THROWS_AS(matvec_transpose(x, std::vector<double>{1}), DimensionError);
}

TEST_CASE("parallel matvec agrees with serial") {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_sparse(2000, 400, 0.2, rng);  // above the parallel threshold
  std::vector<double> v(400, 0.5), w(2000, -0.25);
  set_num_threads(1);
  const auto y1 = matvec(x, v), t1 = matvec_transpose(x, w);
  set_num_threads(4);
  const auto y4 = matvec(x, v), t4 = matvec_transpose(x, w);
  set_num_threads(1);
  CHECK(y1 == y4);
  for (std::size_t j = 0; j < t1.size(); ++j) CHECK(t4[j] == doctest::Approx(t1[j]).epsilon(1e-12));
}

TEST_CASE("transpose and permutations") {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_sparse(7, 6, 0.4, rng);
  CHECK(oracle::dense(transpose(x)) == oracle::dense(x).transpose());
  const std::vector<Index> order{3, 0, 6, 1, 5, 2, 4};
  const auto p = permute_rows(x, order);
  for (Index i = 0; i < 7; ++i) CHECK(oracle::dense(p).row(i) == oracle::dense(x).row(order[i]));
  const auto s = oracle::random_adjacency(7, 0.5, rng);
  const auto ps = permute_symmetric(s, order);
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 7; ++j) CHECK(oracle::dense(ps)(i, j) == oracle::dense(s)(order[i], order[j]));
  CHECK(to_triplets(x).size() == static_cast<std::size_t>(x.nnz()));
}

TEST_CASE("checksum identifies content") {
  std::mt19937_64 rng(9);
  const auto a = oracle::random_sparse(10, 10, 0.3, rng);
  const auto t = to_triplets(a);
  CHECK(build_sparse(t, 10, 10).checksum() == a.checksum());
  auto t2 = t;
  t2[0].value += 1.0;
  CHECK(build_sparse(t2, 10, 10).checksum() != a.checksum());
  CHECK(build_sparse(t, 10, 11).checksum() != a.checksum());
}

TEST_CASE("labels") {
  const auto l = LabelVector::from_ints(std::vector<int>{1, 0, -1, 1, 0});
  CHECK(l.n_labeled() == 3);
  CHECK(l.n_class1() == 2);
  CHECK(l.n_class2() == 1);
  CHECK_FALSE(l.labeled_prefix());
  const auto order = labeled_first_order(l);
  CHECK(order == std::vector<Index>{0, 2, 3, 1, 4});
  CHECK(permute_labels(l, order).labeled_prefix());
  const std::vector<double> permuted{10, 12, 13, 11, 14};
  CHECK(unpermute(permuted, order) == std::vector<double>{10, 11, 12, 13, 14});
  CHECK_THROWS_AS(LabelVector::from_ints(std::vector<int>{2}), PreconditionError);
}

TEST_CASE("labeled mean") {
  const std::vector<Triplet> t{{0, 0, 1}, {0, 2, 2}, {1, 1, 4}, {2, 0, 7}, {3, 2, 1}, {4, 1, 1}};
  const auto x = build_sparse(t, 5, 3);
  SUBCASE("two labeled rows") {
    const auto c = labeled_mean(x, LabelVector::from_ints(std::vector<int>{1, -1, 0, 0, 0}));
    CHECK(c.mu_labeled == std::vector<double>{0.5, 2.0, 1.0});
  }
  SUBCASE("single labeled row") {
    const auto c = labeled_mean(x, LabelVector::from_ints(std::vector<int>{1, 0, 0, 0, 0}));
    CHECK(c.mu_labeled == std::vector<double>{1, 0, 2});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(labeled_mean(x, LabelVector::from_ints(std::vector<int>{0, 0, 0, 0, 0})), PreconditionError);
    CHECK_THROWS_AS(labeled_mean(x, LabelVector::from_ints(std::vector<int>{0, 1, 0, 0, 0})), PreconditionError);
  }
}

TEST_CASE("centered matvecs against dense oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_sparse(25, 12, 0.3, rng);
    std::vector<std::int8_t> lab(25, 0);
    for (int i = 0; i < 10; ++i) lab[static_cast<std::size_t>(i)] = i % 3 ? 1 : -1;
    const LabelVector labels(lab);
    const auto c = labeled_mean(x, labels);
    const auto xc = oracle::dense_centered(oracle::dense(x), labels);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(12), w = Eigen::VectorXd::Random(25);
    CHECK((oracle::vec(centered_matvec(x, c, oracle::stdvec(v))) - xc * v).norm() <= 1e-12);
    CHECK((oracle::vec(centered_matvec_transpose(x, c, oracle::stdvec(w))) - xc.transpose() * w).norm() <=
          1e-12);

    std::vector<double> ones_l(25, 0.0);
    std::fill(ones_l.begin(), ones_l.begin() + 10, 1.0);
    for (double y : centered_matvec_transpose(x, c, ones_l)) CHECK(std::abs(y) <= 1e-12 * x.frobenius_norm());
    for (double y : centered_matvec(x, c, std::vector<double>(12, 0.0))) CHECK(y == 0.0);
  }
}

TEST_CASE("identical labeled rows center to zero") {
  const std::vector<Triplet> t{{0, 0, 1}, {0, 2, 1}, {1, 0, 1}, {1, 2, 1}, {2, 0, 1}, {2, 2, 1}};
  const auto x = build_sparse(t, 3, 3);
  const auto labels = LabelVector::from_ints(std::vector<int>{1, -1, 1});
  const auto c = labeled_mean(x, labels);
  CHECK(c.mu_labeled == std::vector<double>{1, 0, 1});
  for (double y : centered_matvec(x, c, std::vector<double>{0.3, -2, 7})) CHECK(y == 0.0);
}

TEST_CASE("matvec time grows linearly with nnz") {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_sparse(4000, 500, 0.02, rng);
  const auto b = oracle::random_sparse(4000, 500, 0.04, rng);
  const std::vector<double> v(500, 1.0);
  auto best = [&](const SparseMatrix& m) {
    double t = 1e30;
    for (int rep = 0; rep < 7; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      for (int k = 0; k < 20; ++k) (void)matvec(m, v);
      t = std::min(t, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return t;
  };
  const double ratio = best(b) / best(a);
  MESSAGE("time ratio for 2x nnz: " << ratio);
  CHECK(ratio <= 3.0);
}
