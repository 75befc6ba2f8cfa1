#pragma once

// Naive reference computations for cross-checking the solver paths. Slow by
// construction and independent of the interior point / Gray-code code paths.

#include "ucfactor/pietsch.hpp"

namespace ucfactor::oracle {

inline constexpr std::size_t kBrutePietschMaxN = 3;
inline constexpr std::size_t kBruteSignMaxN = 20;

namespace detail {

/// Largest eigenvalue of a 3x3 Hermitian matrix (trigonometric solution of
/// the characteristic cubic).
inline double max_eigenvalue_3(const Eigen::Matrix3cd& h) {
  const double q = (h(0, 0).real() + h(1, 1).real() + h(2, 2).real()) / 3.0;
  Eigen::Matrix3cd b = h;
  b.diagonal().array() -= q;
  const double p2 = b.squaredNorm() / 6.0;
  if (p2 <= 0.0) return q;
  const double p = std::sqrt(p2);
  const double r = std::clamp((b / p).determinant().real() / 2.0, -1.0, 1.0);
  return q + 2.0 * p * std::cos(std::acos(r) / 3.0);
}

inline double max_eigenvalue_2(double a, double d, double off_abs) {
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  return mean + std::sqrt(half * half + off_abs * off_abs);
}

/// min t with t diag(w) >= G, for w on the simplex; +inf when some w_i = 0
/// carries a nonzero diagonal.
inline double scaled_top(const DenseMatrix& g, const double* w) {
  const Eigen::Index n = g.rows();
  double s[3] = {0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gii = g(i, i).real();
    if (gii == 0.0) continue;
    if (w[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s[i] = 1.0 / std::sqrt(w[i]);
  }
  if (n == 1) return g(0, 0).real() * s[0] * s[0];
  if (n == 2)
    return max_eigenvalue_2(g(0, 0).real() * s[0] * s[0], g(1, 1).real() * s[1] * s[1],
                            std::abs(g(0, 1)) * s[0] * s[1]);
  Eigen::Matrix3cd h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(i, j) = g(i, j) * (s[i] * s[j]);
  return max_eigenvalue_3(h);
}

}  // namespace detail

/// Exhaustive search over the dyadic grid of the weight simplex. The grid
/// step is 1/R with R the smallest power of two >= `resolution`, so finer
/// resolutions refine coarser grids and the result is non-increasing.
/// Every grid point is feasible, so the value bounds the optimum from above.
inline double brute_pietsch(const DenseMatrix& g, std::size_t resolution) {
  const auto n = static_cast<std::size_t>(g.rows());
  if (g.rows() != g.cols() || n < 1) throw DimensionError("brute_pietsch: matrix must be square");
  if (n > kBrutePietschMaxN)
    throw PreconditionError("brute_pietsch: N = " + std::to_string(n) + " exceeds 3");
  if (resolution < 1) throw PreconditionError("brute_pietsch: resolution must be >= 1");
  std::size_t steps = 1;
  while (steps < resolution) steps <<= 1;
  const double h = 1.0 / static_cast<double>(steps);

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  if (trace <= 0.0) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  double w[3] = {1.0, 0.0, 0.0};
  if (n == 1) return g(0, 0).real();
  if (n == 2) {
    for (std::size_t i = 0; i <= steps; ++i) {
      w[0] = static_cast<double>(i) * h;
      w[1] = static_cast<double>(steps - i) * h;
      best = std::min(best, detail::scaled_top(g, w));
    }
    return best;
  }
  for (std::size_t i = 0; i <= steps; ++i)
    for (std::size_t j = 0; i + j <= steps; ++j) {
      w[0] = static_cast<double>(i) * h;
      w[1] = static_cast<double>(j) * h;
      w[2] = static_cast<double>(steps - i - j) * h;
      best = std::min(best, detail::scaled_top(g, w));
    }
  return best;
}

/// Calls `visit(eps)` for all 2^N sign patterns, in binary counting order.
template <typename Visit>
void for_each_sign_pattern(std::size_t n, Visit&& visit) {
  if (n > kBruteSignMaxN)
    throw PreconditionError("sign enumeration: N = " + std::to_string(n) + " exceeds 20");
  SignPattern eps(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < count; ++code) {
    for (std::size_t i = 0; i < n; ++i) eps[i] = ((code >> i) & 1u) ? -1 : 1;
    visit(static_cast<const SignPattern&>(eps));
  }
}

/// max over all eps of ||sum_n eps_n phi_n||, each sum formed from scratch.
inline double brute_sign_norm(const VectorSequence& seq) {
  double best = 0.0;
  for_each_sign_pattern(seq.size(), [&](const SignPattern& eps) {
    HVector s = HVector::Zero(seq.dim());
    for (std::size_t n = 0; n < seq.size(); ++n) s += static_cast<double>(eps[n]) * seq[n];
    best = std::max(best, s.norm());
  });
  return best;
}

struct DualCheck {
  double value = 0.0;          ///< Re <G, X>
  double min_eigenvalue = 0.0; ///< of X
  double max_diag_defect = 0.0;
  bool feasible = false;
};

/// <G, X> with a feasibility check X >= -tol, X_ii = 1.
inline DualCheck dual_value(const DenseMatrix& g, const DenseMatrix& x, double psd_tol = 1e-10,
                            double diag_tol = 1e-12) {
  if (g.rows() != x.rows() || g.cols() != x.cols() || g.rows() != g.cols())
    throw DimensionError("dual_value: shape mismatch");
  DualCheck c;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      c.value += (g(i, j) * std::conj(x(i, j))).real();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    c.max_diag_defect = std::max(c.max_diag_defect, std::abs(x(i, i) - 1.0));
  const DenseMatrix xh = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(xh, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues()(0);
  const double herm = (x - x.adjoint()).cwiseAbs().maxCoeff();
  c.feasible = c.min_eigenvalue >= -psd_tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()) &&
               c.max_diag_defect <= diag_tol && herm <= 1e-12;
  return c;
}

/// Minimum of factorization_cost over `trials` random positive column
/// weights (log-uniform in [e^-3, e^3]); +inf for zero trials.
inline double random_factorization_cost(const VectorSequence& seq, std::size_t trials,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(seq.size());
  for (std::size_t t = 0; t < trials; ++t) {
    Weights w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(6.0 * uniform01(rng) - 3.0);
    std::vector<HVector> f;
    f.reserve(seq.size());
    for (Eigen::Index k = 0; k < n; ++k) f.emplace_back(seq[static_cast<std::size_t>(k)] / w(k));
    // each (w, f) reproduces seq exactly: seq_k = w_k f_k
    best = std::min(best, factorization_cost(w, VectorSequence(std::move(f))));
  }
  return best;
}

}  // namespace ucfactor::oracle
