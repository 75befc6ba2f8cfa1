#pragma once

// Finite 2-summing norm of a synthesis operator on the sup-norm space and the
// resulting factorization phi_n = alpha_n f_n with (f_n) a Bessel sequence.
//
// The squared 2-summing norm is the value of the semidefinite pair
//
//   primal:  minimize sum_i v_i       subject to  diag(v) - G >= 0
//   dual:    maximize <G, X>          subject to  X >= 0, X_ii = 1
//
// where G is the Gram matrix of the sequence. Every solution carries both
// sides, so the optimum is certified by the duality gap.

#include "ucfactor/core.hpp"

namespace ucfactor {

struct SolverConfig {
  double tol = 1e-8;              ///< relative duality-gap target
  std::size_t max_iterations = 0; ///< 0 selects max(10 N^2, 100)
  std::size_t max_dim = 512;

  std::size_t iteration_budget(std::size_t n) const {
    if (max_iterations != 0) return max_iterations;
    return std::max<std::size_t>(10 * n * n, 100);
  }
};

struct PietschSolution {
  Weights v;           ///< primal weights, v_i >= 0
  double pi2_sq = 0.0; ///< sum of v
  DenseMatrix dualX;   ///< dual certificate, unit diagonal
  double gap = 0.0;    ///< pi2_sq - <G, dualX>
  bool certified = false;
  std::size_t iterations = 0;
};

struct NuclearFactorization {
  DenseMatrix B;   ///< N x N, rows of l1 norm <= 1
  Weights lambda;  ///< nonnegative
  DenseMatrix S;   ///< d x N, spectral norm <= 1
  PietschSolution solution;
};

struct Factorization {
  Weights alpha;
  VectorSequence frame;
  double bessel = 0.0;
  double cost = 0.0;  ///< ||alpha||^2 * bessel
  PietschSolution solution;
};

namespace detail {

inline double hermitian_defect(const DenseMatrix& g) {
  return (g - g.adjoint()).cwiseAbs().maxCoeff();
}

inline void symmetrize(DenseMatrix& m) {
  m = 0.5 * (m + m.adjoint()).eval();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = Complex(m(i, i).real(), 0.0);
}

inline bool is_positive_definite(const DenseMatrix& m) {
  Eigen::LLT<DenseMatrix> llt(m);
  return llt.info() == Eigen::Success;
}

/// Largest step in (0, 1] keeping `base + t*dir` positive definite, found by
/// backtracking, then shortened to keep away from the boundary.
inline double pd_step(const DenseMatrix& base, const DenseMatrix& dir) {
  double t = 1.0;
  while (!is_positive_definite(base + t * dir)) {
    t *= 0.8;
    if (t < 1e-14) return 0.0;
  }
  if (t < 1.0) t *= 0.95;
  return t;
}

struct IpmResult {
  Weights y;
  DenseMatrix X;
  std::size_t iterations = 0;
};

/// Primal-dual interior point method (HKM direction) for
///   max <C, X>  s.t.  diag(X) = b, X >= 0
///   min b'y     s.t.  Diag(y) - C >= 0
/// with C Hermitian and b > 0. Stops once the relative gap reaches
/// `target` or progress stalls; returns the iterate with the smallest gap.
inline IpmResult weighted_unit_diagonal_ipm(const DenseMatrix& c, const Weights& b,
                                            double target, std::size_t budget) {
  const Eigen::Index n = c.rows();
  Weights y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = 1.1 * c.row(i).cwiseAbs().sum() + 1e-3;
  DenseMatrix z = -c;
  z.diagonal() += y.cast<Complex>();
  DenseMatrix x = DenseMatrix::Zero(n, n);
  x.diagonal() = b.cast<Complex>();

  auto pairing = [](const DenseMatrix& p, const DenseMatrix& q) {
    return (p.array() * q.conjugate().array()).sum().real();
  };

  IpmResult best{y, x, 0};
  double best_gap = std::numeric_limits<double>::infinity();
  double mu = pairing(z, x) / (2.0 * static_cast<double>(n));
  int stalls = 0;

  for (std::size_t it = 1; it <= budget; ++it) {
    DenseMatrix zi = Eigen::LLT<DenseMatrix>(z).solve(DenseMatrix::Identity(n, n));
    symmetrize(zi);

    Eigen::MatrixXd schur = (zi.array() * x.conjugate().array()).real().matrix();
    Eigen::VectorXd rhs = mu * zi.diagonal().real() - b;
    Eigen::VectorXd dy = schur.ldlt().solve(rhs);

    DenseMatrix dx = mu * zi - x - zi * dy.cast<Complex>().asDiagonal() * x;
    symmetrize(dx);
    DenseMatrix dz = DenseMatrix::Zero(n, n);
    dz.diagonal() = dy.cast<Complex>();

    const double ap = pd_step(x, dx);
    const double ad = pd_step(z, dz);
    x += ap * dx;
    y += ad * dy;
    z = -c;
    z.diagonal() += y.cast<Complex>();
    symmetrize(x);

    const double phi = b.dot(y);
    const double psi = pairing(c, x);
    const double gap = phi - psi;
    if (gap < best_gap && is_positive_definite(z)) {
      best_gap = gap;
      best = {y, x, it};
    } else {
      ++stalls;
    }
    best.iterations = it;
    if (gap <= target * std::max(1.0, std::abs(phi))) break;
    if ((ap < 1e-10 && ad < 1e-10) || stalls > 8) break;

    mu = pairing(z, x) / (2.0 * static_cast<double>(n));
    if (ap + ad > 1.6) mu *= 0.5;
    if (ap + ad > 1.9) mu *= 0.2;
  }
  return best;
}

struct RefineResult {
  Weights v;
  DenseMatrix factor;  // N x r, unit rows
  bool ok = false;
};

/// Gauss-Newton on the optimality system of the unit-diagonal pair
///   (diag(v) - G) V = 0,   ||V_i||^2 = 1,
/// with V an N x r factor of the dual optimum. The unitary gauge V -> VU
/// makes the Jacobian rank deficient; minimum-norm steps handle it and
/// converge quadratically on the solution manifold.
inline RefineResult refine_complementarity(const DenseMatrix& g, Weights v, DenseMatrix vf,
                                           std::size_t max_steps = 25) {
  const Eigen::Index n = g.rows();
  const Eigen::Index r = vf.cols();
  const Eigen::Index nr = n * r;
  const Eigen::Index unknowns = 2 * nr + n;
  auto residual = [&](const Weights& vv, const DenseMatrix& f) {
    Eigen::VectorXd res(unknowns);
    DenseMatrix m = -g;
    m.diagonal() += vv.cast<Complex>();
    const DenseMatrix rr = m * f;
    for (Eigen::Index k = 0; k < r; ++k)
      for (Eigen::Index i = 0; i < n; ++i) {
        res(2 * (k * n + i)) = rr(i, k).real();
        res(2 * (k * n + i) + 1) = rr(i, k).imag();
      }
    for (Eigen::Index i = 0; i < n; ++i) res(2 * nr + i) = f.row(i).squaredNorm() - 1.0;
    return res;
  };

  RefineResult out;
  Eigen::VectorXd res = residual(v, vf);
  double norm = res.norm();
  for (std::size_t step = 0; step < max_steps && norm > 1e-15; ++step) {
    DenseMatrix m = -g;
    m.diagonal() += v.cast<Complex>();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(unknowns, unknowns);
    for (Eigen::Index k = 0; k < r; ++k)
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index row = 2 * (k * n + i);
        for (Eigen::Index j = 0; j < n; ++j) {
          const Eigen::Index col = 2 * (k * n + j);
          jac(row, col) = m(i, j).real();
          jac(row, col + 1) = -m(i, j).imag();
          jac(row + 1, col) = m(i, j).imag();
          jac(row + 1, col + 1) = m(i, j).real();
        }
        jac(row, 2 * nr + i) = vf(i, k).real();
        jac(row + 1, 2 * nr + i) = vf(i, k).imag();
        jac(2 * nr + i, 2 * (k * n + i)) = 2.0 * vf(i, k).real();
        jac(2 * nr + i, 2 * (k * n + i) + 1) = 2.0 * vf(i, k).imag();
      }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-9);
    cod.compute(jac);
    const Eigen::VectorXd delta = cod.solve(-res);
    // backtrack along the Gauss-Newton direction until the residual drops
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 30 && !accepted; ++halvings, t *= 0.5) {
      DenseMatrix trial_f = vf;
      for (Eigen::Index k = 0; k < r; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
          trial_f(i, k) += t * Complex(delta(2 * (k * n + i)), delta(2 * (k * n + i) + 1));
      Weights trial_v = v + t * delta.tail(n);
      Eigen::VectorXd trial_res = residual(trial_v, trial_f);
      if (trial_res.norm() < norm) {
        vf = std::move(trial_f);
        v = std::move(trial_v);
        res = std::move(trial_res);
        accepted = true;
      }
    }
    if (!accepted) break;
    norm = res.norm();
  }
  if (!(norm <= 1e-12)) return out;
  for (Eigen::Index i = 0; i < n; ++i) vf.row(i).normalize();
  out.v = std::move(v);
  out.factor = std::move(vf);
  out.ok = true;
  return out;
}

/// Refinement is skipped above this many real unknowns.
inline constexpr Eigen::Index kRefineMaxUnknowns = 720;

inline double frobenius_pairing(const DenseMatrix& g, const DenseMatrix& x) {
  return (g.array() * x.conjugate().array()).sum().real();
}

}  // namespace detail

/// Minimal-trace dominating diagonal of a Hermitian PSD matrix together with
/// a unit-diagonal dual certificate.
///
/// Zero rows are removed before solving (their weight is 0 and their dual
/// block is the identity). The rest is rescaled to a unit-diagonal
/// correlation matrix with trace-normalized weights, solved by a primal-dual
/// interior point method, refined by Gauss-Newton on the complementarity
/// conditions, and polished.
inline PietschSolution min_dominating_diagonal(const DenseMatrix& g,
                                               const SolverConfig& cfg = {}) {
  if (g.rows() != g.cols() || g.rows() < 1)
    throw DimensionError("min_dominating_diagonal: matrix must be square and non-empty");
  const Eigen::Index n = g.rows();
  if (static_cast<std::size_t>(n) > cfg.max_dim)
    throw PreconditionError("min_dominating_diagonal: N = " + std::to_string(n) +
                            " exceeds " + std::to_string(cfg.max_dim));
  if (!all_finite(g)) throw PreconditionError("min_dominating_diagonal: non-finite entry");
  const double scale = std::max(g.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (detail::hermitian_defect(g) > 1e-12 * scale)
    throw PreconditionError("min_dominating_diagonal: matrix is not Hermitian");

  DenseMatrix gh = g;
  detail::symmetrize(gh);
  const double g_norm = std::max(max_eigenvalue(gh), 0.0);
  if (min_eigenvalue(gh) < -1e-10 * g_norm)
    throw PreconditionError("min_dominating_diagonal: matrix is not positive semidefinite");

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i)
    if (gh(i, i).real() > 0.0) active.push_back(i);
  const auto na = static_cast<Eigen::Index>(active.size());

  PietschSolution sol;
  sol.v = Weights::Zero(n);
  sol.dualX = DenseMatrix::Identity(n, n);

  if (na == 1) {
    sol.v(active[0]) = gh(active[0], active[0]).real();
  } else if (na > 1) {
    Weights diag(na);
    for (Eigen::Index a = 0; a < na; ++a) diag(a) = gh(active[a], active[a]).real();
    const Weights dsqrt = diag.cwiseSqrt();
    DenseMatrix corr(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b)
        corr(a, b) = gh(active[a], active[b]) / (dsqrt(a) * dsqrt(b));
    for (Eigen::Index a = 0; a < na; ++a) corr(a, a) = 1.0;
    const double total = diag.sum();
    const Weights bw = diag / total;

    // solve harder than requested; the polish step needs an accurate iterate
    const double target = std::min(cfg.tol * 1e-3, 1e-12);
    auto ipm = detail::weighted_unit_diagonal_ipm(corr, bw, target,
                                                  cfg.iteration_budget(static_cast<std::size_t>(na)));
    sol.iterations = ipm.iterations;

    // back to trace-normalized original coordinates with a unit-diagonal dual
    DenseMatrix ghat(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b) ghat(a, b) = gh(active[a], active[b]) / total;
    Weights vhat = diag.cwiseProduct(ipm.y) / total;
    DenseMatrix xu(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b)
        xu(a, b) = ipm.X(a, b) / std::sqrt(ipm.X(a, a).real() * ipm.X(b, b).real());
    detail::symmetrize(xu);

    // interior iterates are accurate in the gap but only to about its square
    // root in the weights; solve the complementarity system on the dual's
    // numerical range to recover full precision
    Eigen::SelfAdjointEigenSolver<DenseMatrix> xes(xu);
    const double xtop = xes.eigenvalues()(na - 1);
    Eigen::Index rank = 0;
    for (Eigen::Index a = 0; a < na; ++a)
      if (xes.eigenvalues()(a) > 1e-6 * xtop) ++rank;
    if ((2 * rank + 1) * na <= detail::kRefineMaxUnknowns) {
      DenseMatrix factor = xes.eigenvectors().rightCols(rank) *
                           xes.eigenvalues().tail(rank).cwiseSqrt().cast<Complex>().asDiagonal();
      auto ref = detail::refine_complementarity(ghat, vhat, factor);
      if (ref.ok && (ref.v.array() > 0.0).all()) {
        DenseMatrix slack = -ghat;
        slack.diagonal() += ref.v.cast<Complex>();
        if (min_eigenvalue(slack) >= -1e-12) {
          vhat = ref.v;
          xu = ref.factor * ref.factor.adjoint();
          detail::symmetrize(xu);
        }
      }
    }

    // polish the primal: scaling by the top eigenvalue of
    // diag(v)^{-1/2} G diag(v)^{-1/2} keeps it feasible and tight
    const Weights vs = vhat.cwiseSqrt();
    DenseMatrix scaled(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b) scaled(a, b) = ghat(a, b) / (vs(a) * vs(b));
    const double top = max_eigenvalue(scaled);
    for (Eigen::Index a = 0; a < na; ++a) sol.v(active[a]) = total * (top * vhat(a));

    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b) sol.dualX(active[a], active[b]) = xu(a, b);
    for (Eigen::Index i = 0; i < n; ++i) sol.dualX(i, i) = 1.0;
  }

  sol.pi2_sq = sol.v.sum();
  const double raw_gap = sol.pi2_sq - detail::frobenius_pairing(gh, sol.dualX);
  sol.gap = std::max(raw_gap, 0.0);
  sol.certified = sol.gap <= cfg.tol * std::max(1.0, sol.pi2_sq) &&
                  raw_gap >= -cfg.tol * std::max(1.0, sol.pi2_sq);
  return sol;
}

/// T = S diag(lambda) B with B the identity, lambda_i = sqrt(v_i) and
/// S = A diag(lambda)^+. Columns of S with lambda_i = 0 are zero.
inline NuclearFactorization pietsch_factorize(const VectorSequence& seq,
                                              const SolverConfig& cfg = {}) {
  NuclearFactorization out;
  out.solution = min_dominating_diagonal(gram(seq), cfg);
  const auto n = static_cast<Eigen::Index>(seq.size());
  out.lambda = out.solution.v.cwiseSqrt();
  out.B = DenseMatrix::Identity(n, n);
  out.S = DenseMatrix::Zero(seq.dim(), n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (out.lambda(k) > 0.0) out.S.col(k) = seq[static_cast<std::size_t>(k)] / out.lambda(k);
  return out;
}

struct AlphaFrame {
  Weights alpha;
  VectorSequence frame;
};

/// General construction from weights lambda and a matrix B whose rows b^i
/// have l1 norm at most 1 (entry (i, k) is b^i_k):
///   alpha_k^2 = sum_i lambda_i^2 |b^i_k|,   f_k = (lambda_i b^i_k)_i / alpha_k.
inline AlphaFrame construct_alpha_f(const Weights& lambda, const DenseMatrix& b) {
  if (lambda.size() != b.rows())
    throw DimensionError("construct_alpha_f: lambda length must equal the row count of B");
  if (b.rows() < 1 || b.cols() < 1) throw DimensionError("construct_alpha_f: empty B");
  if ((lambda.array() < 0.0).any() || !all_finite(lambda))
    throw PreconditionError("construct_alpha_f: lambda must be finite and nonnegative");
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    const double l1 = b.row(i).cwiseAbs().sum();
    if (l1 > 1.0 + 1e-12)
      throw PreconditionError("construct_alpha_f: row " + std::to_string(i) +
                                  " of B has l1 norm " + std::to_string(l1) + " > 1",
                              static_cast<std::size_t>(i));
  }
  const Weights lsq = lambda.cwiseAbs2();
  AlphaFrame out;
  out.alpha = Weights(b.cols());
  std::vector<HVector> f;
  f.reserve(static_cast<std::size_t>(b.cols()));
  for (Eigen::Index k = 0; k < b.cols(); ++k) {
    out.alpha(k) = std::sqrt(lsq.dot(b.col(k).cwiseAbs()));
    HVector fk = lambda.cast<Complex>().cwiseProduct(b.col(k));
    if (out.alpha(k) > 0.0)
      fk /= out.alpha(k);
    else
      fk.setZero();
    f.push_back(std::move(fk));
  }
  out.frame = VectorSequence(std::move(f));
  return out;
}

/// ||alpha||^2 times the optimal Bessel bound of f.
inline double factorization_cost(const Weights& alpha, const VectorSequence& f) {
  if (static_cast<std::size_t>(alpha.size()) != f.size())
    throw DimensionError("factorization_cost: length mismatch");
  return alpha.squaredNorm() * bessel_bound(f);
}

/// Optimal factorization phi_k = alpha_k f_k with alpha_k = sqrt(v_k).
/// Zero terms get alpha_k = 0 and f_k = 0.
inline Factorization factorize(const VectorSequence& seq, const SolverConfig& cfg = {}) {
  Factorization out;
  out.solution = min_dominating_diagonal(gram(seq), cfg);
  out.alpha = out.solution.v.cwiseSqrt();
  std::vector<HVector> f;
  f.reserve(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const double a = out.alpha(static_cast<Eigen::Index>(k));
    f.push_back(a > 0.0 ? HVector(seq[k] / a) : HVector(HVector::Zero(seq.dim())));
  }
  out.frame = VectorSequence(std::move(f));
  out.bessel = bessel_bound(out.frame);
  out.cost = out.alpha.squaredNorm() * out.bessel;
  return out;
}

/// max_n ||phi_n - alpha_n f_n||.
inline double reconstruction_residual(const VectorSequence& seq, const Weights& alpha,
                                      const VectorSequence& frame) {
  double r = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k)
    r = std::max(r, (seq[k] - alpha(static_cast<Eigen::Index>(k)) * frame[k]).norm());
  return r;
}

inline double max_term_norm(const VectorSequence& seq) {
  double m = 0.0;
  for (const auto& x : seq) m = std::max(m, x.norm());
  return m;
}

}  // namespace ucfactor
