#pragma once

// Symbol splittings m_n = a_n conj(b_n) with (a_n Phi_n) and (b_n Psi_n)
// Bessel, built from the optimal factorization in pietsch.hpp:
//
//   split_weak      Psi has a finite weak witness bounding |<f_k, Psi_n/|Psi_n|>|
//                   away from zero
//   split_absolute  the multiplier series converges absolutely
//   split_measure   the rank-one tensors m_n Psi_n (x) Phi_n are summed in the
//                   Hilbert-Schmidt space, tested against a discrete
//                   probability measure on the unit ball

#include "ucfactor/multiplier.hpp"
#include "ucfactor/pietsch.hpp"

namespace ucfactor {

struct SymbolSplit {
  ScalarSequence a;
  ScalarSequence b;
  double bessel_a_phi = 0.0;  ///< optimal Bessel bound of (a_n Phi_n)
  double bessel_b_psi = 0.0;  ///< optimal Bessel bound of (b_n Psi_n)
  double max_residual = 0.0;  ///< max_n |m_n - a_n conj(b_n)|
  Weights weights;            ///< factorization weights (beta, c or alpha)
  PietschSolution solution;
};

struct WeakWitness {
  std::vector<HVector> vectors;
  double margin = 0.0;  ///< min_n sum_k |<f_k, Psi_n / ||Psi_n||>|
};

/// Finitely supported probability measure on the closed unit ball.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<HVector> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty()) throw PreconditionError("DiscreteMeasure: empty support");
    if (points_.size() != weights_.size())
      throw DimensionError("DiscreteMeasure: points and weights differ in length");
    double total = 0.0;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      check_vector(points_[j], "DiscreteMeasure point");
      if (points_[j].size() != points_.front().size())
        throw DimensionError("DiscreteMeasure: points differ in dimension");
      if (points_[j].norm() > 1.0 + 1e-12)
        throw PreconditionError("DiscreteMeasure: point outside the unit ball", j);
      if (!(weights_[j] >= 0.0) || !std::isfinite(weights_[j]))
        throw PreconditionError("DiscreteMeasure: weights must be finite and nonnegative", j);
      total += weights_[j];
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw PreconditionError("DiscreteMeasure: weights must sum to 1");
  }

  const std::vector<HVector>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }
  Eigen::Index dim() const noexcept { return points_.front().size(); }

  /// sum_j w_j |<x, g_j>|^2
  double second_moment(const HVector& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += weights_[j] * std::norm(inner(x, points_[j]));
    return s;
  }

 private:
  std::vector<HVector> points_;
  std::vector<double> weights_;
};

/// The rank-one operators m_n (Psi_n (x) Phi_n), with (Psi (x) Phi) h = <h, Phi> Psi,
/// i.e. the matrix m_n Psi_n Phi_n^H.
struct HSSequence {
  std::vector<DenseMatrix> tensors;
};

namespace detail {

inline double split_residual(const ScalarSequence& m, const ScalarSequence& a,
                             const ScalarSequence& b) {
  double r = 0.0;
  for (Eigen::Index n = 0; n < m.size(); ++n)
    r = std::max(r, std::abs(m(n) - a(n) * std::conj(b(n))));
  return r;
}

inline VectorSequence weighted(const ScalarSequence& w, const VectorSequence& seq) {
  std::vector<HVector> out;
  out.reserve(seq.size());
  for (std::size_t n = 0; n < seq.size(); ++n) out.emplace_back(w(static_cast<Eigen::Index>(n)) * seq[n]);
  return VectorSequence(std::move(out));
}

inline void finish(SymbolSplit& s, const MultiplierSpec& spec) {
  s.bessel_a_phi = bessel_bound(weighted(s.a, spec.phi()));
  s.bessel_b_psi = bessel_bound(weighted(s.b, spec.psi()));
  s.max_residual = split_residual(spec.m(), s.a, s.b);
}

inline void require_nonzero(const VectorSequence& seq, const char* what) {
  for (std::size_t n = 0; n < seq.size(); ++n)
    if (seq[n].squaredNorm() == 0.0)
      throw PreconditionError(std::string(what) + ": zero vector at index " + std::to_string(n), n);
}

}  // namespace detail

inline WeakWitness verify_witness(const VectorSequence& psi, const std::vector<HVector>& witness) {
  detail::require_nonzero(psi, "verify_witness");
  for (const auto& f : witness)
    if (f.size() != psi.dim()) throw DimensionError("verify_witness: witness dimension mismatch");
  WeakWitness w{witness, std::numeric_limits<double>::infinity()};
  for (const auto& p : psi) {
    const HVector u = p / p.norm();
    double s = 0.0;
    for (const auto& f : witness) s += std::abs(inner(f, u));
    w.margin = std::min(w.margin, s);
  }
  if (witness.empty()) w.margin = 0.0;
  return w;
}

/// Factorizes theta_n = m_n ||Psi_n|| Phi_n = beta_n g_n and sets
/// a_n = m_n ||Psi_n|| / beta_n, b_n = beta_n / ||Psi_n||, so that a_n Phi_n = g_n.
/// Indices with m_n = 0 get a_n = b_n = 0; indices with Phi_n = 0 but
/// m_n != 0 get a_n = m_n, b_n = 1.
inline SymbolSplit split_weak(const MultiplierSpec& spec, const std::vector<HVector>& witness,
                              const SolverConfig& cfg = {}) {
  const WeakWitness w = verify_witness(spec.psi(), witness);
  if (w.margin < 1.0 - 1e-10)
    throw PreconditionError("split_weak: witness margin " + std::to_string(w.margin) + " < 1");

  const auto n = static_cast<Eigen::Index>(spec.size());
  std::vector<HVector> theta;
  theta.reserve(spec.size());
  Weights psi_norm(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    psi_norm(k) = spec.psi()[ku].norm();
    theta.emplace_back(spec.m()(k) * psi_norm(k) * spec.phi()[ku]);
  }
  const Factorization fac = factorize(VectorSequence(std::move(theta)), cfg);

  SymbolSplit s;
  s.a = ScalarSequence::Zero(n);
  s.b = ScalarSequence::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex mk = spec.m()(k);
    const double beta = fac.alpha(k);
    if (mk == Complex(0.0)) continue;
    if (beta > 0.0) {
      s.a(k) = mk * psi_norm(k) / beta;
      s.b(k) = beta / psi_norm(k);
    } else {
      s.a(k) = mk;
      s.b(k) = 1.0;
    }
  }
  s.weights = fac.alpha;
  s.solution = fac.solution;
  detail::finish(s, spec);
  return s;
}

/// Factorizes conj(m_n) Psi_n = c_n Psi'_n and sets b_n = conj(m_n) / c_n,
/// a_n = m_n / conj(b_n) = c_n; then (b_n Psi_n) is the factorization frame
/// and (a_n Phi_n) = (c_n Phi_n) carries the norms of Phi.
inline SymbolSplit split_absolute(const MultiplierSpec& spec, const SolverConfig& cfg = {}) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  std::vector<HVector> scaled;
  scaled.reserve(spec.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Complex mk = spec.m()(k);
    if (mk != Complex(0.0)) {
      if (spec.psi()[ku].squaredNorm() == 0.0)
        throw PreconditionError("split_absolute: nonzero symbol with zero psi at index " +
                                    std::to_string(k), ku);
      if (spec.phi()[ku].squaredNorm() == 0.0)
        throw PreconditionError("split_absolute: nonzero symbol with zero phi at index " +
                                    std::to_string(k), ku);
    }
    scaled.emplace_back(std::conj(mk) * spec.psi()[ku]);
  }
  const Factorization fac = factorize(VectorSequence(std::move(scaled)), cfg);

  SymbolSplit s;
  s.a = ScalarSequence::Zero(n);
  s.b = ScalarSequence::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex mk = spec.m()(k);
    const double c = fac.alpha(k);
    if (mk == Complex(0.0) || c == 0.0) continue;
    s.b(k) = std::conj(mk) / c;
    s.a(k) = mk / std::conj(s.b(k));
  }
  s.weights = fac.alpha;
  s.solution = fac.solution;
  detail::finish(s, spec);
  return s;
}

inline HSSequence hs_tensor_sequence(const MultiplierSpec& spec) {
  HSSequence hs;
  hs.tensors.reserve(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k)
    hs.tensors.emplace_back(spec.m()(static_cast<Eigen::Index>(k)) * spec.psi()[k] *
                            spec.phi()[k].adjoint());
  return hs;
}

/// Frobenius inner product <A, B> = trace(B^H A).
inline Complex frobenius_inner(const DenseMatrix& a, const DenseMatrix& b) {
  return (a.array() * b.conjugate().array()).sum();
}

/// j_mu(x) on the support: component j is sqrt(w_j) <x, g_j>.
inline HVector jmu_embed(const DiscreteMeasure& mu, const HVector& x) {
  if (x.size() != mu.dim()) throw DimensionError("jmu_embed: dimension mismatch");
  HVector out(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t j = 0; j < mu.size(); ++j)
    out(static_cast<Eigen::Index>(j)) = std::sqrt(mu.weights()[j]) * inner(x, mu.points()[j]);
  return out;
}

struct MeasureSplit {
  SymbolSplit split;
  Weights alpha;                 ///< Hilbert-Schmidt factorization weights
  double measure_identity = 0.0; ///< sum_n sum_j w_j |<g_j, b_n Phi_n>|^2
  double alpha_sq_sum = 0.0;     ///< sum_n alpha_n^2
  double hs_bessel = 0.0;        ///< Bessel bound of the tensor frame
  double bessel_a_psi = 0.0;     ///< Bessel bound of (a_n Psi_n)
  double jmu_bessel = 0.0;       ///< Bessel bound of (j_mu(b_n Phi_n)) on the support
};

/// Factorizes the tensors m_n Psi_n (x) Phi_n = alpha_n F_n in Frobenius
/// geometry, then a_n^2 = |m_n / alpha_n|^2 sum_j w_j |<g_j, Phi_n>|^2 and
/// b_n = conj(m_n) / a_n.
inline MeasureSplit split_measure(const MultiplierSpec& spec, const DiscreteMeasure& mu,
                                  const SolverConfig& cfg = {}) {
  if (mu.dim() != spec.dim()) throw DimensionError("split_measure: measure dimension mismatch");
  const auto n = static_cast<Eigen::Index>(spec.size());
  const Eigen::Index d = spec.dim();

  Weights moment(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    moment(k) = mu.second_moment(spec.phi()[static_cast<std::size_t>(k)]);
    if (spec.m()(k) != Complex(0.0) && !(moment(k) > 0.0))
      throw PreconditionError("split_measure: measure is degenerate at index " + std::to_string(k),
                              static_cast<std::size_t>(k));
  }

  const HSSequence hs = hs_tensor_sequence(spec);
  std::vector<HVector> flat;
  flat.reserve(hs.tensors.size());
  for (const auto& t : hs.tensors) flat.emplace_back(Eigen::Map<const HVector>(t.data(), d * d));
  const Factorization fac = factorize(VectorSequence(std::move(flat)), cfg);

  MeasureSplit out;
  out.alpha = fac.alpha;
  out.hs_bessel = fac.bessel;
  SymbolSplit& s = out.split;
  s.a = ScalarSequence::Zero(n);
  s.b = ScalarSequence::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex mk = spec.m()(k);
    if (mk == Complex(0.0)) continue;
    if (!(fac.alpha(k) > 0.0))
      throw PreconditionError("split_measure: zero factorization weight with nonzero symbol at index " +
                                  std::to_string(k),
                              static_cast<std::size_t>(k));
    const double ak = std::abs(mk) / fac.alpha(k) * std::sqrt(moment(k));
    s.a(k) = ak;
    s.b(k) = std::conj(mk) / ak;
  }
  s.weights = fac.alpha;
  s.solution = fac.solution;
  detail::finish(s, spec);

  for (Eigen::Index k = 0; k < n; ++k)
    out.measure_identity += mu.second_moment(s.b(k) * spec.phi()[static_cast<std::size_t>(k)]);
  out.alpha_sq_sum = fac.alpha.squaredNorm();
  out.bessel_a_psi = bessel_bound(detail::weighted(s.a, spec.psi()));
  std::vector<HVector> embedded;
  embedded.reserve(spec.size());
  for (Eigen::Index k = 0; k < n; ++k)
    embedded.push_back(jmu_embed(mu, s.b(k) * spec.phi()[static_cast<std::size_t>(k)]));
  out.jmu_bessel = bessel_bound(VectorSequence(std::move(embedded)));
  return out;
}

}  // namespace ucfactor
