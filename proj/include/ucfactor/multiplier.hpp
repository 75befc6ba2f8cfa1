#pragma once

// Multipliers M_{m,Phi,Psi} : f -> sum_n m_n <f, Psi_n> Phi_n.

#include "ucfactor/core.hpp"

namespace ucfactor {

/// Symbol m with the synthesis sequence Phi and the analysis sequence Psi.
class MultiplierSpec {
 public:
  MultiplierSpec(ScalarSequence m, VectorSequence phi, VectorSequence psi)
      : m_(std::move(m)), phi_(std::move(phi)), psi_(std::move(psi)) {
    if (static_cast<std::size_t>(m_.size()) != phi_.size() || phi_.size() != psi_.size())
      throw DimensionError("MultiplierSpec: symbol, phi and psi lengths differ (" +
                           std::to_string(m_.size()) + ", " + std::to_string(phi_.size()) +
                           ", " + std::to_string(psi_.size()) + ")");
    if (phi_.dim() != psi_.dim())
      throw DimensionError("MultiplierSpec: phi and psi dimensions differ");
    if (!all_finite(m_)) throw PreconditionError("MultiplierSpec: non-finite symbol entry");
  }

  const ScalarSequence& m() const noexcept { return m_; }
  const VectorSequence& phi() const noexcept { return phi_; }
  const VectorSequence& psi() const noexcept { return psi_; }
  std::size_t size() const noexcept { return phi_.size(); }
  Eigen::Index dim() const noexcept { return phi_.dim(); }

  MultiplierSpec with_symbol(ScalarSequence m) const { return {std::move(m), phi_, psi_}; }

 private:
  ScalarSequence m_;
  VectorSequence phi_;
  VectorSequence psi_;
};

/// d x d matrix: synthesis(Phi) diag(m) synthesis(Psi)^H.
inline DenseMatrix assemble(const MultiplierSpec& spec) {
  return synthesis_matrix(spec.phi()) * spec.m().asDiagonal() *
         synthesis_matrix(spec.psi()).adjoint();
}

/// Direct summation; no matrix is formed.
inline HVector apply(const MultiplierSpec& spec, const HVector& f) {
  if (f.size() != spec.dim()) throw DimensionError("apply: dimension mismatch");
  HVector out = HVector::Zero(spec.dim());
  for (std::size_t n = 0; n < spec.size(); ++n)
    out += (spec.m()(static_cast<Eigen::Index>(n)) * inner(f, spec.psi()[n])) * spec.phi()[n];
  return out;
}

/// (conj(m), Psi, Phi).
inline MultiplierSpec adjoint_spec(const MultiplierSpec& spec) {
  return {spec.m().conjugate(), spec.psi(), spec.phi()};
}

/// Phi_n = T u_n, Psi_n = u_n, m_n = 1 for an orthonormal basis (u_n).
inline MultiplierSpec from_operator(const DenseMatrix& t, const VectorSequence& basis) {
  if (t.rows() != t.cols()) throw DimensionError("from_operator: operator must be square");
  if (basis.dim() != t.rows() || static_cast<Eigen::Index>(basis.size()) != t.rows())
    throw DimensionError("from_operator: basis must have dim(T) vectors of dimension dim(T)");
  const DenseMatrix defect =
      gram(basis) - DenseMatrix::Identity(t.rows(), t.rows());
  if (defect.cwiseAbs().maxCoeff() > 1e-10)
    throw PreconditionError("from_operator: basis is not orthonormal");
  std::vector<HVector> phi;
  phi.reserve(basis.size());
  for (const auto& u : basis) phi.emplace_back(t * u);
  return {ScalarSequence::Ones(t.rows()), VectorSequence(std::move(phi)), basis};
}

struct UCReport {
  double constant = 0.0;
  SignPattern witness_signs;
  NormMode method = NormMode::exact;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Maximum over eps in {+-1}^N of ||assemble((eps_n m_n), Phi, Psi)||.
/// Sampled mode evaluates the all-plus pattern and then `trials` seeded
/// random patterns.
inline UCReport uc_constant(const MultiplierSpec& spec,
                            SignSearch opt = {.max_enum = kDefaultUCEnumerationCap}) {
  const std::size_t n = spec.size();
  UCReport rep;
  rep.method = opt.mode;
  rep.trials = opt.mode == NormMode::sampled ? opt.trials : 0;
  rep.seed = opt.seed;
  rep.constant = -1.0;

  // rank-one terms m_n Phi_n Psi_n^H
  std::vector<DenseMatrix> terms;
  terms.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    terms.emplace_back(spec.m()(static_cast<Eigen::Index>(k)) * spec.phi()[k] *
                       spec.psi()[k].adjoint());

  auto consider = [&](const SignPattern& eps, const DenseMatrix& sum) {
    const double v = spectral_norm(sum);
    if (v > rep.constant) {
      rep.constant = v;
      rep.witness_signs = eps;
    }
  };

  if (opt.mode == NormMode::exact) {
    if (n > opt.max_enum)
      throw EnumerationCapError("uc_constant: N = " + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(opt.max_enum));
    DenseMatrix sum = DenseMatrix::Zero(spec.dim(), spec.dim());
    for (const auto& t : terms) sum += t;
    for_each_sign_pattern_mod_global(n, [&](const SignPattern& eps, std::size_t k) {
      if (k != static_cast<std::size_t>(-1)) sum += (2.0 * eps[k]) * terms[k];
      consider(eps, sum);
    });
    // re-evaluate the witness from scratch
    DenseMatrix w = DenseMatrix::Zero(spec.dim(), spec.dim());
    for (std::size_t k = 0; k < n; ++k) w += static_cast<double>(rep.witness_signs[k]) * terms[k];
    rep.constant = spectral_norm(w);
    return rep;
  }

  std::mt19937_64 rng(opt.seed);
  auto evaluate = [&](const SignPattern& eps) {
    DenseMatrix sum = DenseMatrix::Zero(spec.dim(), spec.dim());
    for (std::size_t k = 0; k < n; ++k) sum += static_cast<double>(eps[k]) * terms[k];
    consider(eps, sum);
  };
  evaluate(SignPattern(n, 1));
  for (std::size_t t = 0; t < opt.trials; ++t) evaluate(random_signs(n, rng));
  return rep;
}

/// Per probe f: sum_n |m_n| |<f, Psi_n>| ||Phi_n||.
inline std::vector<double> absolute_profile(const MultiplierSpec& spec,
                                            const std::vector<HVector>& probes) {
  std::vector<double> out;
  out.reserve(probes.size());
  for (const auto& f : probes) {
    if (f.size() != spec.dim()) throw DimensionError("absolute_profile: probe dimension mismatch");
    double s = 0.0;
    for (std::size_t n = 0; n < spec.size(); ++n)
      s += std::abs(spec.m()(static_cast<Eigen::Index>(n))) * std::abs(inner(f, spec.psi()[n])) *
           spec.phi()[n].norm();
    out.push_back(s);
  }
  return out;
}

}  // namespace ucfactor
