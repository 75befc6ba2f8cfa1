#pragma once

#include <random>
#include <set>

#include "ucfactor.hpp"

namespace ucfactor::testing {

inline HVector cvec(std::initializer_list<Complex> xs) {
  HVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const Complex& x : xs) v(i++) = x;
  return v;
}

inline HVector e(Eigen::Index dim, Eigen::Index k) { return unit_vector(dim, k); }

inline VectorSequence seq(std::initializer_list<HVector> xs) {
  return VectorSequence(std::vector<HVector>(xs));
}

inline HVector random_vector(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  HVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
  return v;
}

inline HVector random_unit(Eigen::Index d, std::mt19937_64& rng) {
  HVector v = random_vector(d, rng);
  return v / v.norm();
}

inline VectorSequence random_sequence(std::size_t n, Eigen::Index d, std::mt19937_64& rng) {
  std::vector<HVector> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(random_vector(d, rng));
  return VectorSequence(std::move(v));
}

inline ScalarSequence random_symbol(std::size_t n, std::mt19937_64& rng) {
  return random_vector(static_cast<Eigen::Index>(n), rng);
}

/// Columns of the Q factor of a random square matrix.
inline VectorSequence random_orthonormal_basis(Eigen::Index d, std::mt19937_64& rng) {
  DenseMatrix a(d, d);
  for (Eigen::Index j = 0; j < d; ++j) a.col(j) = random_vector(d, rng);
  const DenseMatrix q = Eigen::HouseholderQR<DenseMatrix>(a).householderQ();
  return VectorSequence::from_columns(q);
}

/// Largest eigenvalue of a Hermitian matrix through the general complex
/// eigensolver, independent of the self-adjoint path used in the library.
inline double oracle_top_eigenvalue(const DenseMatrix& h) {
  Eigen::ComplexEigenSolver<DenseMatrix> es(h, false);
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    top = std::max(top, es.eigenvalues()(i).real());
  return top;
}

/// sum_n |<f, x_n>|^2, summed term by term.
inline double bessel_sum(const VectorSequence& s, const HVector& f) {
  double total = 0.0;
  for (const auto& x : s) total += std::norm(f.dot(x));
  return total;
}

}  // namespace ucfactor::testing
