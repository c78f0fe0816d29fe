#pragma once

#include "stripes/coefficients.hpp"

namespace stripes {

enum class BlockKind { L1, L2_square, L2_hex, L2_quasihex };

// One 2x2 block of the centre-manifold linearisation about a stripe, kept in
// unscaled variables: entries are O(A^2) resp. O(A q + ...) and the formal
// scaling order is eps^2 under (A,alpha,beta,kt,lt) = (eps A',...).
struct LatticeBlock {
  BlockKind kind;
  Mat2c entries = Mat2c::Zero();
  double ev_minus = 0.0, ev_plus = 0.0;  // exact block eigenvalues, both real
  // Lemma-form eigenvalues (stripe equation substituted) for cross-checking
  double lemma_minus = 0.0, lemma_plus = 0.0;
  // reduced forms valid under the Q = eps Q' smallness hypothesis
  double hyp1_minus = 0.0, hyp1_plus = 0.0;
  double A = 0.0;
  Unfolding mu;
  double ell_tilde = 0.0;
  double theta = 0.0;
  bool amplitude_consistent = true;
};

namespace detail {
inline void check_amplitude(const TuringData& t, const CoefficientSet& cs, const Unfolding& mu,
                            double A, bool throw_on_mismatch, LatticeBlock& blk) {
  auto branch = stripe_amplitude(t, cs, mu);
  const double expected = branch ? *branch : -1.0;
  blk.amplitude_consistent = branch && std::abs(A - expected) <= 1e-8 * std::max(1.0, expected);
  if (!blk.amplitude_consistent && throw_on_mismatch) throw InconsistentAmplitude(A, expected);
}
}  // namespace detail

// 1D block in the (e0, e0bar) coordinates: A^2 rho_nl * ones; eigenvalues
// {0, 2 rho_nl A^2}.
inline LatticeBlock block_L1(const CoefficientSet& cs, double A) {
  LatticeBlock blk;
  blk.kind = BlockKind::L1;
  blk.A = A;
  blk.entries = Mat2c::Constant(Complex(A * A * cs.rho_nl, 0.0));
  blk.ev_minus = 2.0 * cs.rho_nl * A * A;
  blk.ev_plus = 0.0;
  blk.lemma_minus = blk.ev_minus;
  blk.lemma_plus = 0.0;
  blk.hyp1_minus = blk.ev_minus;
  blk.hyp1_plus = 0.0;
  return blk;
}

// Quasi-square block: diagonal with double eigenvalue lambda_lt + A^2 xi.
inline LatticeBlock block_L2_square(const TuringData& t, const CoefficientSet& cs, double A,
                                    const Unfolding& mu, double ell_tilde,
                                    bool throw_on_mismatch = true) {
  LatticeBlock blk;
  blk.kind = BlockKind::L2_square;
  blk.A = A;
  blk.mu = mu;
  blk.ell_tilde = ell_tilde;
  detail::check_amplitude(t, cs, mu, A, throw_on_mismatch, blk);
  const double lam_lt = mu.alpha + t.rho_kappa * ell_tilde * ell_tilde;
  const double diag = lam_lt + A * A * cs.xi;
  blk.entries = (Mat2::Identity() * diag).cast<Complex>();
  blk.ev_minus = blk.ev_plus = diag;
  blk.lemma_minus = blk.lemma_plus =
      A * A * (3.0 * cs.k0 - cs.q2 + 8.0 * cs.q11) - t.rho_beta * mu.beta * mu.beta +
      t.rho_kappa * (ell_tilde * ell_tilde - mu.kappa_tilde * mu.kappa_tilde);
  blk.hyp1_minus = blk.hyp1_plus =
      -mu.alpha - 2.0 * t.rho_beta * mu.beta * mu.beta +
      t.rho_kappa * (ell_tilde * ell_tilde - 2.0 * mu.kappa_tilde * mu.kappa_tilde);
  return blk;
}

namespace detail {
inline void hex_like_fill(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs,
                          double A, const Unfolding& mu, double ell_tilde, LatticeBlock& blk) {
  const double b = mu.beta, kt = mu.kappa_tilde, lt = ell_tilde;
  const double lam_diag = mu.alpha + 0.25 * t.rho_beta * b * b +
                          (t.rho_kappa / 16.0) * (kt + 3.0 * lt) * (kt + 3.0 * lt);
  const Complex p = p_quasihex(sys, t, cs, b, kt, lt);
  const Complex off = 2.0 * A * cs.q_eff() + A * p;
  const double a = lam_diag + A * A * cs.eta;
  blk.entries << Complex(a, 0.0), off, std::conj(off), Complex(a, 0.0);
  blk.ev_plus = a + std::abs(off);
  blk.ev_minus = a - std::abs(off);
  const double omega = (9.0 * lt + 15.0 * kt) * (lt - kt) * t.rho_kappa / 16.0;
  const double lemma_a = A * A * (3.0 * cs.k0 - cs.q2 + 8.0 * cs.q1) -
                         0.75 * t.rho_beta * b * b + omega;
  blk.lemma_plus = lemma_a + std::abs(off);
  blk.lemma_minus = lemma_a - std::abs(off);
  // reduced form: amplitude at cubic coefficient 3 k0, coupling through q only
  const double rad = -(mu.alpha + t.rho_beta * b * b + t.rho_kappa * kt * kt) / (3.0 * cs.k0);
  const double At = rad > 0.0 ? std::sqrt(rad) : 0.0;
  const double core = 3.0 * cs.k0 * At * At - 0.75 * t.rho_beta * b * b + omega;
  blk.hyp1_plus = core + 2.0 * At * std::abs(cs.q_eff());
  blk.hyp1_minus = core - 2.0 * At * std::abs(cs.q_eff());
}
}  // namespace detail

inline LatticeBlock block_L2_hex(const SystemSpec& sys, const TuringData& t,
                                 const CoefficientSet& cs, double A, const Unfolding& mu,
                                 bool throw_on_mismatch = true) {
  LatticeBlock blk;
  blk.kind = BlockKind::L2_hex;
  blk.A = A;
  blk.mu = mu;
  blk.ell_tilde = mu.kappa_tilde;  // hexagonal scaling: lt = kt
  detail::check_amplitude(t, cs, mu, A, throw_on_mismatch, blk);
  detail::hex_like_fill(sys, t, cs, A, mu, mu.kappa_tilde, blk);
  return blk;
}

inline LatticeBlock block_L2_quasihex(const SystemSpec& sys, const TuringData& t,
                                      const CoefficientSet& cs, double A, const Unfolding& mu,
                                      double ell_tilde, bool throw_on_mismatch = true) {
  LatticeBlock blk;
  blk.kind = BlockKind::L2_quasihex;
  blk.A = A;
  blk.mu = mu;
  blk.ell_tilde = ell_tilde;
  detail::check_amplitude(t, cs, mu, A, throw_on_mismatch, blk);
  detail::hex_like_fill(sys, t, cs, A, mu, ell_tilde, blk);
  return blk;
}

// omega = -theta rho_kappa kt^2 parametrises how much more unstable a
// quasi-hex mode is than the hexagonal one; the two ell_tilde realising a
// given omega are kt*(-1 +- 4 sqrt(1-theta))/3, collapsing to -kt/3 at theta=1.
struct OmegaParam {
  double theta = 1.0;
  double omega = 0.0;
  double ell_choice = 0.0;      // branch connected to the hexagonal one as theta -> 0
  double ell_other = 0.0;

  OmegaParam(const TuringData& t, double kappa_tilde, double theta_in) : theta(theta_in) {
    if (!(theta > 0.0) || theta > 1.0) throw ThetaOutOfRange(theta);
    omega = -theta * t.rho_kappa * kappa_tilde * kappa_tilde;
    const double root = 4.0 * std::sqrt(std::max(0.0, 1.0 - theta));
    ell_choice = kappa_tilde * (-1.0 + root) / 3.0;
    ell_other = kappa_tilde * (-1.0 - root) / 3.0;
  }
};

}  // namespace stripes
