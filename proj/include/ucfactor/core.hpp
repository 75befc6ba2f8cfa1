#pragma once

// Complex inner-product space primitives for finite truncations of sequences
// in a Hilbert space: vectors, sequences, Gram matrices, spectral norms,
// Bessel bounds and sign-pattern (sup-norm) operator norms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ucfactor {

using Complex = std::complex<double>;
using HVector = Eigen::VectorXcd;
using ScalarSequence = Eigen::VectorXcd;
using Weights = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXcd;
using SignPattern = std::vector<int>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition. `index()` names the offending sequence position
/// when the failure is local to one term.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what,
                             std::optional<std::size_t> index = std::nullopt)
      : Error(what), index_(index) {}
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Configuration

inline constexpr std::size_t kDefaultC0EnumerationCap = 20;
inline constexpr std::size_t kDefaultUCEnumerationCap = 16;

enum class NormMode { exact, sampled };

struct SignSearch {
  NormMode mode = NormMode::exact;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t max_enum = kDefaultC0EnumerationCap;
};

// ---------------------------------------------------------------------------
// Validation helpers

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto& z = m(i, j);
      if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      } else {
        if (!std::isfinite(z)) return false;
      }
    }
  return true;
}

inline void check_vector(const HVector& v, const char* what = "vector") {
  if (v.size() < 1)
    throw DimensionError(std::string(what) + ": dimension must be >= 1");
  if (!all_finite(v))
    throw PreconditionError(std::string(what) + ": non-finite entry");
}

// ---------------------------------------------------------------------------
// VectorSequence

/// Ordered, non-empty list of vectors of one common dimension.
class VectorSequence {
 public:
  VectorSequence() = default;

  explicit VectorSequence(std::vector<HVector> vectors)
      : vectors_(std::move(vectors)) {
    if (vectors_.empty())
      throw PreconditionError("VectorSequence: at least one vector required");
    dim_ = vectors_.front().size();
    for (std::size_t n = 0; n < vectors_.size(); ++n) {
      check_vector(vectors_[n], "VectorSequence");
      if (vectors_[n].size() != dim_)
        throw DimensionError("VectorSequence: vector " + std::to_string(n) +
                             " has dimension " +
                             std::to_string(vectors_[n].size()) +
                             ", expected " + std::to_string(dim_));
    }
  }

  /// Columns of `m` become the sequence terms.
  static VectorSequence from_columns(const DenseMatrix& m) {
    std::vector<HVector> v;
    v.reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) v.emplace_back(m.col(j));
    return VectorSequence(std::move(v));
  }

  std::size_t size() const noexcept { return vectors_.size(); }
  Eigen::Index dim() const noexcept { return dim_; }
  const HVector& operator[](std::size_t n) const { return vectors_[n]; }
  const std::vector<HVector>& vectors() const noexcept { return vectors_; }
  auto begin() const noexcept { return vectors_.begin(); }
  auto end() const noexcept { return vectors_.end(); }

  VectorSequence scaled(double t) const {
    std::vector<HVector> v = vectors_;
    for (auto& x : v) x *= t;
    return VectorSequence(std::move(v));
  }

  VectorSequence appended(const HVector& x) const {
    std::vector<HVector> v = vectors_;
    v.push_back(x);
    return VectorSequence(std::move(v));
  }

 private:
  std::vector<HVector> vectors_;
  Eigen::Index dim_ = 0;
};

// ---------------------------------------------------------------------------
// Basic operations

/// Linear in `f`, conjugate-linear in `g`.
inline Complex inner(const HVector& f, const HVector& g) {
  if (f.size() != g.size())
    throw DimensionError("inner: dimension mismatch (" +
                         std::to_string(f.size()) + " vs " +
                         std::to_string(g.size()) + ")");
  return g.dot(f);  // Eigen conjugates the left operand
}

inline HVector unit_vector(Eigen::Index dim, Eigen::Index k) {
  HVector e = HVector::Zero(dim);
  e(k) = 1.0;
  return e;
}

/// d x N matrix whose column n is the n-th term.
inline DenseMatrix synthesis_matrix(const VectorSequence& seq) {
  DenseMatrix a(seq.dim(), static_cast<Eigen::Index>(seq.size()));
  for (std::size_t n = 0; n < seq.size(); ++n)
    a.col(static_cast<Eigen::Index>(n)) = seq[n];
  return a;
}

/// G(j, k) = inner(phi_k, phi_j). Exactly Hermitian with a real diagonal.
inline DenseMatrix gram(const VectorSequence& seq) {
  const auto n = static_cast<Eigen::Index>(seq.size());
  DenseMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = Complex(seq[j].squaredNorm(), 0.0);
    for (Eigen::Index k = j + 1; k < n; ++k) {
      g(j, k) = inner(seq[k], seq[j]);
      g(k, j) = std::conj(g(j, k));
    }
  }
  return g;
}

/// Largest eigenvalue of a Hermitian matrix (only the lower triangle is read).
inline double max_eigenvalue(const DenseMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

inline double min_eigenvalue(const DenseMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Largest singular value.
inline double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

/// Optimal Bessel constant: the top eigenvalue of the Gram matrix, evaluated
/// on whichever of A^H A and A A^H is smaller.
inline double bessel_bound(const VectorSequence& seq) {
  const DenseMatrix a = synthesis_matrix(seq);
  double top = a.rows() <= a.cols() ? max_eigenvalue(a * a.adjoint())
                                    : max_eigenvalue(gram(seq));
  return std::max(top, 0.0);
}

/// Sum_n |<phi_n, g>|.
inline double weak_l1_sum(const VectorSequence& seq, const HVector& g) {
  if (g.size() != seq.dim())
    throw DimensionError("weak_l1_sum: probe dimension mismatch");
  double s = 0.0;
  for (const auto& phi : seq) s += std::abs(inner(phi, g));
  return s;
}

/// Sum_n ||phi_n||^2.
inline double orlicz_sum(const VectorSequence& seq) {
  double s = 0.0;
  for (const auto& phi : seq) s += phi.squaredNorm();
  return s;
}

// ---------------------------------------------------------------------------
// Deterministic sampling

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline SignPattern random_signs(std::size_t n, std::mt19937_64& rng) {
  SignPattern eps(n);
  std::uint64_t bits = 0;
  int left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    eps[i] = (bits & 1u) ? -1 : 1;
    bits >>= 1;
    --left;
  }
  return eps;
}

/// Calls `visit(eps, flipped)` for every sign pattern with eps[0] = +1 in
/// Gray-code order; `flipped` is the index changed from the previous pattern
/// (npos for the first, all-plus pattern). Patterns with eps[0] = -1 are
/// global negations and are skipped.
template <typename Visit>
void for_each_sign_pattern_mod_global(std::size_t n, Visit&& visit) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  SignPattern eps(n, 1);
  visit(static_cast<const SignPattern&>(eps), npos);
  if (n <= 1) return;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 1; step < count; ++step) {
    // lowest set bit of the step selects the flipped position among 1..n-1
    std::size_t bit = 0;
    while (((step >> bit) & 1u) == 0) ++bit;
    const std::size_t k = bit + 1;
    eps[k] = -eps[k];
    visit(static_cast<const SignPattern&>(eps), k);
  }
}

inline double signed_sum_norm(const VectorSequence& seq, const SignPattern& eps) {
  HVector s = HVector::Zero(seq.dim());
  for (std::size_t n = 0; n < seq.size(); ++n)
    s += static_cast<double>(eps[n]) * seq[n];
  return s.norm();
}

struct C0NormResult {
  double value = 0.0;
  SignPattern witness;
};

/// Norm of the synthesis map on the sup-norm unit ball, as the maximum of
/// ||sum eps_n phi_n|| over real sign patterns. Exact for real data; a lower
/// bound within a factor pi/2 for complex data.
///
/// Sampled mode: the all-plus pattern followed by `trials` random patterns,
/// each improved by single-flip ascent. A prefix of the same stream is used
/// for fewer trials, so the value is monotone in `trials`. Every flip-local
/// maximum satisfies ||s||^2 >= trace(G), so the sampled value still
/// dominates sqrt(bessel_bound).
inline C0NormResult c0_operator_norm_detailed(const VectorSequence& seq,
                                              const SignSearch& opt = {}) {
  const std::size_t n = seq.size();
  C0NormResult best;
  best.value = -1.0;

  if (opt.mode == NormMode::exact) {
    if (n > opt.max_enum)
      throw EnumerationCapError("c0_operator_norm: N = " + std::to_string(n) +
                                " exceeds enumeration cap " +
                                std::to_string(opt.max_enum));
    HVector s = HVector::Zero(seq.dim());
    for (const auto& phi : seq) s += phi;
    double best_sq = -1.0;
    for_each_sign_pattern_mod_global(n, [&](const SignPattern& eps, std::size_t k) {
      if (k != static_cast<std::size_t>(-1)) s += (2.0 * eps[k]) * seq[k];
      const double v = s.squaredNorm();
      if (v > best_sq) {
        best_sq = v;
        best.witness = eps;
      }
    });
    // recompute at the witness so the value carries no Gray-code drift
    best.value = signed_sum_norm(seq, best.witness);
    return best;
  }

  std::mt19937_64 rng(opt.seed);
  auto climb = [&](SignPattern eps) {
    HVector s = HVector::Zero(seq.dim());
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(eps[i]) * seq[i];
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < n; ++i) {
        // flipping i changes ||s||^2 by 4(||phi_i||^2 - eps_i Re<s, phi_i>)
        const double delta =
            seq[i].squaredNorm() - eps[i] * inner(s, seq[i]).real();
        if (delta > 1e-15 * std::max(1.0, s.squaredNorm())) {
          s -= (2.0 * eps[i]) * seq[i];
          eps[i] = -eps[i];
          improved = true;
        }
      }
    }
    const double v = signed_sum_norm(seq, eps);
    if (v > best.value) {
      best.value = v;
      best.witness = eps;
    }
  };
  climb(SignPattern(n, 1));
  for (std::size_t t = 0; t < opt.trials; ++t) climb(random_signs(n, rng));
  return best;
}

inline double c0_operator_norm(const VectorSequence& seq, const SignSearch& opt = {}) {
  return c0_operator_norm_detailed(seq, opt).value;
}

}  // namespace ucfactor
