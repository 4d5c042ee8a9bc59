#include "fsda/sda.hpp"

#include <chrono>
#include <cmath>

#include "fsda/error.hpp"

namespace fsda {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

SolverOptions options(const SolveBudget& b) {
  SolverOptions o;
  o.tol = b.tol;
  o.max_iter = b.max_iter;
  return o;
}

// Flips the sign (of scores and, if given, w) so that labeled class +1
// scores higher on average than class -1. Eigenvector signs are arbitrary;
// AUC is not.
void orient(const LabelVector& labels, Vector& scores, Vector* w) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) m1 += scores[i];
    if (labels[i] == -1) m2 += scores[i];
  }
  m1 /= static_cast<double>(labels.n_class1());
  m2 /= static_cast<double>(labels.n_class2());
  if (m1 < m2) {
    scale(-1.0, scores);
    if (w) scale(-1.0, *w);
  }
}

// r ~ U[-1, 1]^N with its labeled mean removed from every entry, which makes
// W r orthogonal to the all-ones vector.
Vector orthogonalized_start(const SdaProblem& p) {
  Vector r = uniform_block(p.x->rows(), 1, p.seed).front();
  const auto l = static_cast<std::size_t>(p.labels.n_labeled());
  double s = 0.0;
  for (std::size_t i = 0; i < l; ++i) s += r[i];
  const double shift = s / static_cast<double>(l);
  for (double& v : r) v -= shift;
  return r;
}

// Regression phase: (X^T X + beta I) w = X^T z for every beta, one basis.
ShiftedSolveResult regress(const SdaProblem& p, std::span<const double> z, std::int64_t& applications) {
  const auto gram = gram_operator(*p.x);
  const Vector rhs = matvec_transpose(*p.x, z);
  auto res = shifted_cg(gram, rhs, p.betas, options(p.feature_solve));
  applications += gram.applications();
  return res;
}

void fill_projection(const SdaProblem& p, ShiftedSolveResult& shifted, SdaSolution& out) {
  out.betas = shifted.betas;
  for (auto& w : shifted.solutions) {
    RatingVector rv{matvec(*p.x, w), RatingSource::projection};
    orient(p.labels, rv.scores, &w);
    out.ratings.push_back(std::move(rv));
  }
  out.directions = std::move(shifted.solutions);
  out.report.shifted_iterations = shifted.iterations;
  out.report.residual_norms = shifted.residual_norms;
  out.report.converged = shifted.converged;
}

}  // namespace

void SdaProblem::validate() const {
  if (!x) throw PreconditionError("problem has no data matrix");
  check_dimension("labels vs data rows", static_cast<std::size_t>(x->rows()), labels.size());
  if (!labels.labeled_prefix())
    throw PreconditionError("labeled samples must occupy the first rows (use prepare_problem)");
  if (labels.n_class1() < 1 || labels.n_class2() < 1)
    throw PreconditionError("binary SDA needs at least one labeled sample of each class");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw PreconditionError("alpha must lie in [0, 1]");
  if (alpha > 0.0) {
    if (!laplacian) throw PreconditionError("alpha > 0 requires a graph Laplacian");
    if (laplacian->l.rows() != x->rows() || laplacian->l.cols() != x->rows())
      throw DimensionError("Laplacian must be N x N with N = " + std::to_string(x->rows()));
  }
  for (const auto* b : {&sample_solve, &feature_solve}) {
    if (!(b->tol > 0.0)) throw PreconditionError("solver tolerance must be positive");
    if (b->max_iter < 0) throw PreconditionError("iteration budget must be non-negative");
  }
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fsda: return "fsda";
    case Algorithm::csr_sda: return "csr-sda";
    case Algorithm::sa_sda: return "sa-sda";
    case Algorithm::sr_sda: return "sr-sda";
    case Algorithm::lda: return "lda";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::fsda, Algorithm::csr_sda, Algorithm::sa_sda, Algorithm::sr_sda,
                 Algorithm::lda})
    if (to_string(a) == name) return a;
  throw PreconditionError("unknown algorithm '" + std::string(name) +
                          "' (expected fsda, csr-sda, sa-sda, sr-sda or lda)");
}

bool SdaSolution::all_converged() const {
  if (!report.sample_converged) return false;
  for (bool c : report.converged)
    if (!c) return false;
  return true;
}

const RatingVector& SdaSolution::rating_for(double beta) const {
  for (std::size_t s = 0; s < betas.size(); ++s)
    if (betas[s] == beta) return ratings[s];
  throw PreconditionError("beta " + std::to_string(beta) + " is not in the solved grid");
}

void apply_smoother(const LabelVector& labels, const Laplacian* l, double alpha,
                    std::span<const double> z, std::span<double> out) {
  check_dimension("smoother input", labels.size(), z.size());
  check_dimension("smoother output", labels.size(), out.size());
  if (alpha != 0.0) {
    if (!l) throw PreconditionError("alpha > 0 requires a graph Laplacian");
    matvec(l->l, z, out);
    scale(alpha, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
  const double keep = 1.0 - alpha;
  if (keep != 0.0)
    for (std::size_t i = 0; i < z.size(); ++i)
      if (labels[i] != 0) out[i] += keep * z[i];
}

Vector apply_smoother(const LabelVector& labels, const Laplacian* l, double alpha,
                      std::span<const double> z) {
  Vector out(z.size());
  apply_smoother(labels, l, alpha, z, out);
  return out;
}

void apply_w(const LabelVector& labels, std::span<const double> z, std::span<double> out) {
  check_dimension("W input", labels.size(), z.size());
  check_dimension("W output", labels.size(), out.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (labels[i] == 1) s1 += z[i];
    if (labels[i] == -1) s2 += z[i];
  }
  const double m1 = labels.n_class1() > 0 ? s1 / static_cast<double>(labels.n_class1()) : 0.0;
  const double m2 = labels.n_class2() > 0 ? s2 / static_cast<double>(labels.n_class2()) : 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = labels[i] == 1 ? m1 : (labels[i] == -1 ? m2 : 0.0);
}

Vector apply_w(const LabelVector& labels, std::span<const double> z) {
  Vector out(z.size());
  apply_w(labels, z, out);
  return out;
}

LinearOperator smoother_operator(const SdaProblem& p) {
  return LinearOperator(p.x->rows(), [&p](std::span<const double> z, std::span<double> y) {
    apply_smoother(p.labels, p.laplacian.get(), p.alpha, z, y);
  });
}

LinearOperator centered_smoother_operator(const SdaProblem& p) {
  // (I - 1 1_l^T / l)^T M z = M z - 1_l * sum(M z) / l
  return LinearOperator(p.x->rows(), [&p](std::span<const double> z, std::span<double> y) {
    apply_smoother(p.labels, p.laplacian.get(), p.alpha, z, y);
    const auto l = static_cast<std::size_t>(p.labels.n_labeled());
    const double shift = sum(y) / static_cast<double>(l);
    for (std::size_t i = 0; i < l; ++i) y[i] -= shift;
  });
}

LinearOperator w_operator(const SdaProblem& p) {
  return LinearOperator(p.x->rows(), [&p](std::span<const double> z, std::span<double> y) {
    apply_w(p.labels, z, y);
  });
}

LinearOperator gram_operator(const SparseMatrix& x) {
  auto tmp = std::make_shared<Vector>(static_cast<std::size_t>(x.rows()));
  return LinearOperator(x.cols(), [&x, tmp](std::span<const double> v, std::span<double> y) {
    matvec(x, v, *tmp);
    matvec_transpose(x, *tmp, y);
  });
}

LinearOperator fsda_operator(const SdaProblem& p, const CenteringVector& c) {
  const auto n = static_cast<std::size_t>(p.x->rows());
  auto xw = std::make_shared<Vector>(n);
  auto mxw = std::make_shared<Vector>(n);
  // Right to left: X, then the smoother, then the centered X^T.
  return LinearOperator(p.x->cols(), [&p, &c, xw, mxw](std::span<const double> w,
                                                       std::span<double> y) {
    matvec(*p.x, w, *xw);
    apply_smoother(p.labels, p.laplacian.get(), p.alpha, *xw, *mxw);
    centered_matvec_transpose(*p.x, c, *mxw, y);
  });
}

Vector project(const SparseMatrix& x, std::span<const double> w) { return matvec(x, w); }

SdaSolution fsda_solve(const SdaProblem& p) {
  p.validate();
  const auto start = Clock::now();
  const CenteringVector c = labeled_mean(*p.x, p.labels);
  const Vector r = uniform_block(p.x->cols(), 1, p.seed).front();
  const Vector rhs = centered_matvec_transpose(*p.x, c, apply_w(p.labels, matvec(*p.x, r)));
  const auto op = fsda_operator(p, c);
  auto shifted = shifted_cg(op, rhs, p.betas, options(p.feature_solve));

  SdaSolution out;
  out.report.feature_applications = op.applications();
  fill_projection(p, shifted, out);
  out.report.wall_ms = elapsed_ms(start);
  return out;
}

SdaSolution lda_solve(const SdaProblem& p) {
  SdaProblem q = p;
  q.alpha = 0.0;
  return fsda_solve(q);
}

SdaSolution csr_sda_solve(const SdaProblem& p) {
  p.validate();
  const auto start = Clock::now();
  const Vector r = orthogonalized_start(p);
  const Vector rhs = apply_w(p.labels, r);
  const auto mc = centered_smoother_operator(p);
  const CgResult spectral = cg(mc, rhs, options(p.sample_solve));

  SdaSolution out;
  out.report.sample_iterations = spectral.iterations;
  out.report.sample_converged = spectral.converged;
  out.report.sample_applications = mc.applications();
  auto shifted = regress(p, spectral.solution, out.report.feature_applications);
  fill_projection(p, shifted, out);
  out.spectral = spectral.solution;
  orient(p.labels, out.spectral, nullptr);
  out.report.wall_ms = elapsed_ms(start);
  return out;
}

SdaSolution sa_sda_solve(const SdaProblem& p) {
  if (p.alpha == 0.0)
    throw PreconditionError(
        "sa-sda requires alpha != 0: with alpha = 0 the Laplacian term vanishes and every "
        "unlabeled sample is rated zero");
  p.validate();
  const auto start = Clock::now();
  const Vector r = orthogonalized_start(p);
  const Vector rhs = apply_w(p.labels, r);
  const auto mc = centered_smoother_operator(p);
  auto shifted = shifted_cg(mc, rhs, p.betas, options(p.sample_solve));

  SdaSolution out;
  out.betas = shifted.betas;
  out.report.sample_iterations = shifted.base_iterations;
  out.report.sample_applications = mc.applications();
  out.report.shifted_iterations = shifted.iterations;
  out.report.residual_norms = shifted.residual_norms;
  out.report.converged = shifted.converged;
  for (auto& z : shifted.solutions) {
    RatingVector rv{std::move(z), RatingSource::spectral};
    orient(p.labels, rv.scores, nullptr);
    out.ratings.push_back(std::move(rv));
  }
  out.report.wall_ms = elapsed_ms(start);
  return out;
}

SdaSolution sr_sda_solve(const SdaProblem& p) {
  p.validate();
  const auto start = Clock::now();
  const auto m = smoother_operator(p);
  const auto w = w_operator(p);

  auto block = uniform_block(p.x->rows(), 2, p.seed);
  for (auto& col : block) col = apply_w(p.labels, col);
  const BlockCgResult z = block_cg(m, block, options(p.sample_solve));
  const RitzPairs ritz = rayleigh_ritz_2x2(z.solutions, w, m);

  SdaSolution out;
  out.report.sample_iterations = z.iterations;
  out.report.sample_converged = true;
  for (bool c : z.converged) out.report.sample_converged = out.report.sample_converged && c;
  out.report.lambda_nondiscriminative = ritz.lambda1;
  out.report.lambda_discriminative = ritz.lambda2;

  auto combine = [&](const std::array<double, 2>& q) {
    Vector v(z.solutions[0].size());
    axpy(q[0], z.solutions[0], v);
    axpy(q[1], z.solutions[1], v);
    return v;
  };
  const Vector z_nd = combine(ritz.q[0]);
  const Vector z_d = combine(ritz.q[1]);
  out.report.sample_applications = m.applications();

  // Both eigenvectors go through the regression phase; only z_d rates.
  regress(p, z_nd, out.report.feature_applications);
  auto shifted = regress(p, z_d, out.report.feature_applications);
  fill_projection(p, shifted, out);
  out.spectral = z_d;
  orient(p.labels, out.spectral, nullptr);
  out.report.wall_ms = elapsed_ms(start);
  return out;
}

SdaSolution solve(Algorithm algorithm, const SdaProblem& p) {
  switch (algorithm) {
    case Algorithm::fsda: return fsda_solve(p);
    case Algorithm::csr_sda: return csr_sda_solve(p);
    case Algorithm::sa_sda: return sa_sda_solve(p);
    case Algorithm::sr_sda: return sr_sda_solve(p);
    case Algorithm::lda: return lda_solve(p);
  }
  throw PreconditionError("unknown algorithm");
}

Vector PreparedProblem::restore(std::span<const double> permuted) const {
  return unpermute(permuted, order);
}

PreparedProblem prepare_problem(const SparseMatrix& x, const Laplacian* l,
                                const LabelVector& labels, SdaProblem settings) {
  check_dimension("labels vs data rows", static_cast<std::size_t>(x.rows()), labels.size());
  PreparedProblem out;
  out.order = labeled_first_order(labels);
  settings.x = std::make_shared<const SparseMatrix>(permute_rows(x, out.order));
  settings.labels = permute_labels(labels, out.order);
  if (l) {
    if (l->l.rows() != x.rows())
      throw DimensionError("Laplacian must be N x N with N = " + std::to_string(x.rows()));
    settings.laplacian =
        std::make_shared<const Laplacian>(Laplacian{permute_symmetric(l->l, out.order)});
  } else {
    settings.laplacian.reset();
  }
  out.problem = std::move(settings);
  return out;
}

}  // namespace fsda
