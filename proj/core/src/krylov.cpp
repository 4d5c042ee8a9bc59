#include "fsda/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fsda/error.hpp"

namespace fsda {

LinearOperator::LinearOperator(Index dim, Apply apply)
    : dim_(dim), apply_(std::move(apply)), count_(std::make_shared<std::int64_t>(0)) {
  if (dim_ < 0) throw DimensionError("operator dimension must be non-negative");
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  check_dimension("operator input", static_cast<std::size_t>(dim_), x.size());
  check_dimension("operator output", static_cast<std::size_t>(dim_), y.size());
  ++*count_;
  apply_(x, y);
}

Vector LinearOperator::operator()(std::span<const double> x) const {
  Vector y(static_cast<std::size_t>(dim_));
  apply(x, y);
  return y;
}

LinearOperator as_operator(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("operator matrix must be square");
  return LinearOperator(a.rows(), [&a](std::span<const double> x, std::span<double> y) {
    matvec(a, x, y);
  });
}

ShiftGrid::ShiftGrid(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw PreconditionError("shift grid must not be empty");
  for (std::size_t s = 0; s < betas_.size(); ++s) {
    if (!std::isfinite(betas_[s]) || betas_[s] < 0.0)
      throw PreconditionError("shift grid values must be finite and non-negative");
    if (s > 0 && !(betas_[s] > betas_[s - 1]))
      throw PreconditionError("shift grid must be strictly ascending");
  }
}

ShiftGrid ShiftGrid::decades(int lo_exponent, int hi_exponent) {
  std::vector<double> betas;
  for (int e = lo_exponent; e <= hi_exponent; ++e) betas.push_back(std::pow(10.0, e));
  return ShiftGrid(std::move(betas));
}

namespace {

double threshold(const SolverOptions& opts, double rhs_norm) {
  return opts.relative ? opts.tol * rhs_norm : opts.tol;
}

void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in ") + where);
}

}  // namespace

CgResult cg(const LinearOperator& b_op, std::span<const double> rhs, const SolverOptions& opts) {
  const auto n = static_cast<std::size_t>(b_op.dim());
  check_dimension("cg right-hand side", n, rhs.size());
  if (!all_finite(rhs)) throw NumericalError("cg: right-hand side is not finite");

  CgResult res;
  res.solution.assign(n, 0.0);
  Vector r(rhs.begin(), rhs.end());
  Vector p = r;
  Vector q(n);
  double rr = dot(r, r);
  const double thr = threshold(opts, std::sqrt(rr));
  res.residual_history.push_back(std::sqrt(rr));
  if (std::sqrt(rr) <= thr || rr == 0.0) {
    res.converged = true;
    return res;
  }

  for (int it = 0; it < opts.max_iter; ++it) {
    b_op.apply(p, q);
    const double pq = dot(p, q);
    require_finite(pq, "cg <p, Bp>");
    if (pq <= 0.0) {
      throw BreakdownError("cg: <p, Bp> = " + std::to_string(pq) + " at iteration " +
                           std::to_string(it) + " (singular direction)");
    }
    const double gamma = -rr / pq;
    axpy(-gamma, p, res.solution);
    axpy(gamma, q, r);
    const double rr_next = dot(r, r);
    require_finite(rr_next, "cg residual");
    res.iterations = it + 1;
    res.residual_history.push_back(std::sqrt(rr_next));
    if (opts.on_iteration) {
      const double rn = std::sqrt(rr_next);
      opts.on_iteration({res.iterations, std::span<const double>(&rn, 1)});
    }
    if (std::sqrt(rr_next) <= thr) {
      res.converged = true;
      break;
    }
    const double alpha = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + alpha * p[i];
    rr = rr_next;
  }
  return res;
}

ShiftedSolveResult shifted_cg(const LinearOperator& b_op, std::span<const double> rhs,
                              const ShiftGrid& grid, const SolverOptions& opts) {
  const auto n = static_cast<std::size_t>(b_op.dim());
  const std::size_t ns = grid.size();
  check_dimension("shifted_cg right-hand side", n, rhs.size());
  if (!all_finite(rhs)) throw NumericalError("shifted_cg: right-hand side is not finite");

  ShiftedSolveResult res;
  res.betas.assign(grid.betas().begin(), grid.betas().end());
  res.solutions.assign(ns, Vector(n, 0.0));
  res.residual_norms.assign(ns, 0.0);
  res.iterations.assign(ns, 0);
  res.converged.assign(ns, false);

  Vector r(rhs.begin(), rhs.end());
  Vector p = r;
  Vector q(n);
  std::vector<Vector> dirs(ns, r);  // P^beta
  double rr = dot(r, r);
  const double thr = threshold(opts, std::sqrt(rr));
  std::vector<bool> active(ns, true);
  std::size_t n_active = ns;
  for (std::size_t s = 0; s < ns; ++s) {
    res.residual_norms[s] = std::sqrt(rr);
    if (std::sqrt(rr) <= thr || rr == 0.0) {
      res.converged[s] = true;
      active[s] = false;
      --n_active;
    }
  }

  double gamma_prev = 1.0;
  double alpha = 0.0;
  std::vector<double> zeta_prev(ns, 1.0), zeta(ns, 1.0), zeta_next(ns, 1.0), gamma_s(ns, 0.0);

  for (int it = 0; it < opts.max_iter && n_active > 0; ++it) {
    b_op.apply(p, q);
    const double pq = dot(p, q);
    require_finite(pq, "shifted_cg <p, Bp>");
    if (pq <= 0.0) {
      throw BreakdownError("shifted_cg: <p, Bp> = " + std::to_string(pq) + " at iteration " +
                           std::to_string(it) + " (singular direction)");
    }
    const double gamma = -rr / pq;

    for (std::size_t s = 0; s < ns; ++s) {
      if (!active[s]) continue;
      const double denom = gamma * alpha * (zeta_prev[s] - zeta[s]) +
                           zeta_prev[s] * gamma_prev * (1.0 - grid[s] * gamma);
      zeta_next[s] = zeta_prev[s] * zeta[s] * gamma_prev / denom;
      if (!std::isfinite(zeta_next[s]) || zeta[s] == 0.0) {
        // Underflowed recurrence: keep the last iterate, flag the shift.
        active[s] = false;
        --n_active;
        res.iterations[s] = it;
        continue;
      }
      gamma_s[s] = gamma * zeta_next[s] / zeta[s];
      axpy(-gamma_s[s], dirs[s], res.solutions[s]);
    }

    axpy(gamma, q, r);
    const double rr_next = dot(r, r);
    require_finite(rr_next, "shifted_cg residual");
    const double rnorm = std::sqrt(rr_next);
    res.base_iterations = it + 1;

    for (std::size_t s = 0; s < ns; ++s) {
      if (!active[s]) continue;
      res.residual_norms[s] = std::abs(zeta_next[s]) * rnorm;
      res.iterations[s] = it + 1;
      if (res.residual_norms[s] <= thr) {
        res.converged[s] = true;
        active[s] = false;
        --n_active;
      }
    }
    if (opts.on_iteration) opts.on_iteration({res.base_iterations, res.residual_norms});
    if (n_active == 0) break;

    const double alpha_next = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + alpha_next * p[i];
    for (std::size_t s = 0; s < ns; ++s) {
      if (!active[s]) continue;
      // Uses the freshly computed alpha_{i+1}; the base direction update and
      // the shifted one must share the same step.
      const double alpha_s = alpha_next * zeta_next[s] * gamma_s[s] / (zeta[s] * gamma);
      auto& d = dirs[s];
      const double z = zeta_next[s];
      for (std::size_t i = 0; i < n; ++i) d[i] = z * r[i] + alpha_s * d[i];
      zeta_prev[s] = zeta[s];
      zeta[s] = zeta_next[s];
    }
    gamma_prev = gamma;
    alpha = alpha_next;
    rr = rr_next;
  }
  return res;
}

namespace {

// In-place Cholesky of a small SPD matrix (row-major p x p). Returns false
// if a pivot is not positive.
bool small_cholesky(std::vector<double>& a, std::size_t p) {
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * p + j] = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = s / ljj;
    }
  }
  return true;
}

// Solves (L L^T) x = b with the factor from small_cholesky.
std::vector<double> small_solve(const std::vector<double>& l, std::size_t p, std::vector<double> b) {
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * p + k] * b[k];
    b[i] /= l[i * p + i];
  }
  for (std::size_t ii = p; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < p; ++k) b[ii] -= l[k * p + ii] * b[k];
    b[ii] /= l[ii * p + ii];
  }
  return b;
}

// Modified Gram-Schmidt with one reorthogonalization pass; drops columns
// whose remaining norm falls below `drop_tol` times their original norm.
void orthonormalize(std::vector<Vector>& cols, double drop_tol) {
  std::vector<Vector> kept;
  for (auto& v : cols) {
    const double original = norm2(v);
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : kept) axpy(-dot(u, v), u, v);
    const double remaining = norm2(v);
    if (remaining <= drop_tol * original) continue;
    scale(1.0 / remaining, v);
    kept.push_back(std::move(v));
  }
  cols = std::move(kept);
}

}  // namespace

BlockCgResult block_cg(const LinearOperator& b_op, std::span<const Vector> rhs,
                       const SolverOptions& opts) {
  const auto n = static_cast<std::size_t>(b_op.dim());
  const std::size_t m = rhs.size();
  if (m == 0) throw PreconditionError("block_cg needs at least one right-hand side");
  for (const auto& b : rhs) {
    check_dimension("block_cg right-hand side", n, b.size());
    if (!all_finite(b)) throw NumericalError("block_cg: right-hand side is not finite");
  }

  BlockCgResult res;
  res.solutions.assign(m, Vector(n, 0.0));
  res.residual_norms.assign(m, 0.0);
  res.converged.assign(m, false);
  std::vector<Vector> r(rhs.begin(), rhs.end());
  std::vector<double> thr(m);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < m; ++j) {
    res.residual_norms[j] = norm2(r[j]);
    thr[j] = threshold(opts, res.residual_norms[j]);
    if (res.residual_norms[j] <= thr[j] || res.residual_norms[j] == 0.0) {
      res.converged[j] = true;
    } else {
      active.push_back(j);
    }
  }

  std::vector<Vector> dirs;
  for (std::size_t j : active) dirs.push_back(r[j]);
  std::vector<Vector> q;

  constexpr double kDropTol = 1e-10;
  while (!active.empty() && res.iterations < opts.max_iter) {
    orthonormalize(dirs, kDropTol);
    if (dirs.empty())
      throw BreakdownError("block_cg: every search direction deflated with " +
                           std::to_string(active.size()) + " unconverged column(s)");
    const std::size_t pcount = dirs.size();
    q.assign(pcount, Vector(n));
    for (std::size_t k = 0; k < pcount; ++k) b_op.apply(dirs[k], q[k]);

    std::vector<double> gram(pcount * pcount);
    for (std::size_t a = 0; a < pcount; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const double v = 0.5 * (dot(dirs[a], q[b]) + dot(dirs[b], q[a]));
        require_finite(v, "block_cg P^T B P");
        gram[a * pcount + b] = gram[b * pcount + a] = v;
      }
    if (!small_cholesky(gram, pcount))
      throw BreakdownError("block_cg: P^T B P is not positive definite at iteration " +
                           std::to_string(res.iterations));

    for (std::size_t j : active) {
      std::vector<double> c(pcount);
      for (std::size_t k = 0; k < pcount; ++k) c[k] = dot(dirs[k], r[j]);
      const auto step = small_solve(gram, pcount, std::move(c));
      for (std::size_t k = 0; k < pcount; ++k) {
        axpy(step[k], dirs[k], res.solutions[j]);
        axpy(-step[k], q[k], r[j]);
      }
      res.residual_norms[j] = norm2(r[j]);
      require_finite(res.residual_norms[j], "block_cg residual");
    }
    ++res.iterations;
    if (opts.on_iteration) opts.on_iteration({res.iterations, res.residual_norms});

    std::vector<std::size_t> still;
    for (std::size_t j : active) {
      if (res.residual_norms[j] <= thr[j]) {
        res.converged[j] = true;
      } else {
        still.push_back(j);
      }
    }
    active = std::move(still);
    if (active.empty()) break;

    // New directions: residuals made B-conjugate to the current block.
    std::vector<Vector> next;
    next.reserve(active.size());
    for (std::size_t j : active) {
      std::vector<double> c(pcount);
      for (std::size_t k = 0; k < pcount; ++k) c[k] = dot(q[k], r[j]);
      const auto coef = small_solve(gram, pcount, std::move(c));
      Vector d = r[j];
      for (std::size_t k = 0; k < pcount; ++k) axpy(-coef[k], dirs[k], d);
      next.push_back(std::move(d));
    }
    dirs = std::move(next);
  }
  return res;
}

std::vector<Vector> uniform_block(Index dim, int n_vectors, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vector> out(static_cast<std::size_t>(n_vectors), Vector(static_cast<std::size_t>(dim)));
  for (auto& col : out)
    for (auto& v : col) v = dist(gen);
  return out;
}

std::vector<Vector> subspace_iteration(const LinearOperator& a_op, const BlockSolver& b_solve,
                                       int n_vectors, std::uint64_t seed) {
  if (n_vectors < 1) throw PreconditionError("subspace_iteration needs n_vectors >= 1");
  auto block = uniform_block(a_op.dim(), n_vectors, seed);
  for (auto& col : block) col = a_op(col);
  return b_solve(block);
}

RitzPairs rayleigh_ritz_2x2(std::span<const Vector> z, const LinearOperator& a_op,
                            const LinearOperator& b_op) {
  if (z.size() != 2) throw PreconditionError("rayleigh_ritz_2x2 needs exactly two columns");
  const Vector az0 = a_op(z[0]), az1 = a_op(z[1]);
  const Vector bz0 = b_op(z[0]), bz1 = b_op(z[1]);
  const double a00 = dot(z[0], az0), a11 = dot(z[1], az1);
  const double a01 = 0.5 * (dot(z[0], az1) + dot(z[1], az0));
  const double b00 = dot(z[0], bz0), b11 = dot(z[1], bz1);
  const double b01 = 0.5 * (dot(z[0], bz1) + dot(z[1], bz0));
  for (double v : {a00, a01, a11, b00, b01, b11}) require_finite(v, "rayleigh_ritz_2x2");

  // Cholesky of the projected B; a (near) zero Schur complement means the
  // two columns are dependent in the B-inner product.
  if (!(b00 > 0.0) || !(b11 > 0.0)) throw BreakdownError("rayleigh_ritz_2x2: Z^T B Z is singular");
  const double l00 = std::sqrt(b00);
  const double l10 = b01 / l00;
  const double schur = b11 - l10 * l10;
  if (!(schur > 1e-12 * b11)) throw BreakdownError("rayleigh_ritz_2x2: Z^T B Z is singular");
  const double l11 = std::sqrt(schur);

  // C = L^{-1} A L^{-T}
  const double c00 = a00 / b00;
  const double c01 = (a01 - l10 * a00 / l00) / (l00 * l11);
  const double c11 = (a11 - 2.0 * l10 * a01 / l00 + l10 * l10 * a00 / b00) / schur;

  const double mean = 0.5 * (c00 + c11);
  const double half_gap = std::hypot(0.5 * (c00 - c11), c01);
  RitzPairs out;
  out.lambda1 = mean + half_gap;
  out.lambda2 = mean - half_gap;

  std::array<double, 2> u1;
  if (c01 == 0.0) {
    u1 = c00 >= c11 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  } else {
    const std::array<double, 2> x{out.lambda1 - c11, c01};
    const std::array<double, 2> y{c01, out.lambda1 - c00};
    u1 = std::hypot(x[0], x[1]) >= std::hypot(y[0], y[1]) ? x : y;
    const double nu = std::hypot(u1[0], u1[1]);
    u1 = {u1[0] / nu, u1[1] / nu};
  }
  const std::array<double, 2> u2{-u1[1], u1[0]};

  auto back = [&](const std::array<double, 2>& u) {
    const double q1 = u[1] / l11;
    return std::array<double, 2>{(u[0] - l10 * q1) / l00, q1};
  };
  out.q = {back(u1), back(u2)};
  return out;
}

}  // namespace fsda
