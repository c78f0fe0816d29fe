#pragma once

#include <cmath>

#include "stripes/system.hpp"

namespace stripes {

struct TuringData {
  double kc = 0.0;
  Vec2 E0 = Vec2::Zero();
  Vec2 E0_star = Vec2::Zero();
  double lambda_beta = 0.0;
  double lambda_betabeta = 0.0;
  double lambda_M = 0.0;
  double lambda_Mbeta = 0.0;
  int a_M = 1;  // 0 iff M == Id
  double rho_beta = 0.0;
  double rho_kappa = 0.0;
};

struct TuringReport {
  bool base_state_stable = false;      // tr L < 0, det L > 0
  bool critical_circle = false;        // dispersion quadratic in s has a double root at kc^2
  bool simple_root = false;            // d_lambda d != 0 at (0,kc,0)
  double det_at_kc = 0.0;
  double discriminant = 0.0;           // of det(-sD+L) as quadratic in s
  double product_identity_defect = 0.0;  // a2 a3 - (a1-kc^2 d1)(a4-kc^2 d2)
  double kc = 0.0;
  bool all() const { return base_state_stable && critical_circle && simple_root; }
};

// det(-(k^2+l^2) D + L + alpha_check*M + i*k*beta*B(c) - lambda*Id)
inline Complex dispersion(const SystemSpec& sys, Complex lambda, double k, double l,
                          double alpha_check, double beta, double c) {
  Mat2c m = (-(k * k + l * l) * sys.D() + sys.L + alpha_check * sys.M).cast<Complex>();
  m += Complex(0.0, 1.0) * k * beta * sys.B(c).cast<Complex>();
  m -= lambda * Mat2c::Identity();
  return m.determinant();
}

inline double critical_wavenumber(const SystemSpec& sys) {
  const double num = sys.d1 * sys.L(1, 1) + sys.d2 * sys.L(0, 0);
  if (!(num > 0.0)) throw NoTuringWavenumber();
  return std::sqrt(num / (2.0 * sys.d1 * sys.d2));
}

// det(-sD+L) is the quadratic d1 d2 s^2 - (d1 a4 + d2 a1) s + det L in s = k^2+l^2;
// condition (2) holds exactly iff its discriminant vanishes with the vertex at
// positive s, so the check is algebraic rather than a grid scan.
inline TuringReport verify_turing(const SystemSpec& sys, double tol = 1e-10) {
  TuringReport r;
  const Mat2& L = sys.L;
  r.base_state_stable = (L.trace() < 0.0) && (L.determinant() > 0.0);

  const double p1 = sys.d1 * L(1, 1) + sys.d2 * L(0, 0);
  const double scale = std::max({1.0, p1 * p1, 4.0 * sys.d1 * sys.d2 * std::abs(L.determinant())});
  r.discriminant = p1 * p1 - 4.0 * sys.d1 * sys.d2 * L.determinant();
  if (p1 > 0.0) {
    r.kc = std::sqrt(p1 / (2.0 * sys.d1 * sys.d2));
    const double kc2 = r.kc * r.kc;
    r.det_at_kc = (-kc2 * sys.D() + L).determinant();
    const double b1 = L(0, 0) - kc2 * sys.d1;
    const double b4 = L(1, 1) - kc2 * sys.d2;
    r.product_identity_defect = L(0, 1) * L(1, 0) - b1 * b4;
    r.critical_circle = std::abs(r.discriminant) <= tol * scale && std::abs(r.det_at_kc) <= tol * scale;
    r.simple_root = std::abs(b1 + b4) > tol;
  }
  return r;
}

inline void require_turing(const SystemSpec& sys, double tol = 1e-10) {
  TuringReport r = verify_turing(sys, tol);
  if (!r.base_state_stable) throw ConditionFailed(1, sys.L.trace());
  if (!r.critical_circle) throw ConditionFailed(2, r.discriminant);
  if (!r.simple_root) throw ConditionFailed(3, 0.0);
}

// Kernel chart of Remark-type form: for b = -kc^2 D + L with det b = 0,
// E0 = (b2,-b1)/c0, E0* = (b3,-b1)/c0*, normalised to <E0,E0> = <E0,E0*> = 1.
inline void kernel_eigenvectors(const SystemSpec& sys, double kc, Vec2& E0, Vec2& E0_star) {
  const Mat2 b = -kc * kc * sys.D() + sys.L;
  const double b1 = b(0, 0), b2 = b(0, 1), b3 = b(1, 0), b4 = b(1, 1);
  const double scale = b.cwiseAbs().maxCoeff() + 1.0;
  if (std::abs(b1) < 1e-12 * scale || std::abs(b1 + b4) < 1e-12 * scale)
    throw DegenerateKernelChart();
  const double c0 = std::sqrt(b2 * b2 + b1 * b1);
  const double c0s = (b1 * b4 + b1 * b1) / c0;
  E0 = Vec2(b2, -b1) / c0;
  E0_star = Vec2(b3, -b1) / c0s;
}

inline TuringData linear_coeffs(const SystemSpec& sys) {
  require_turing(sys);
  TuringData t;
  t.kc = critical_wavenumber(sys);
  kernel_eigenvectors(sys, t.kc, t.E0, t.E0_star);
  const double kc2 = t.kc * t.kc;
  const double b1 = sys.L(0, 0) - kc2 * sys.d1;
  const double b4 = sys.L(1, 1) - kc2 * sys.d2;
  const double tr = b1 + b4;  // = d_lambda d up to sign
  t.lambda_beta = b4 / tr;
  t.lambda_betabeta = b1 * b4 / (tr * tr * tr);
  if (!(t.lambda_betabeta > 0.0)) throw LambdaBetaBetaNonPositive(t.lambda_betabeta);
  const Mat2& M = sys.M;
  t.lambda_M = (M(0, 0) * b4 - M(0, 1) * sys.L(1, 0) - M(1, 0) * sys.L(0, 1) + M(1, 1) * b1) / tr;
  if (t.lambda_M == 0.0) throw LambdaMZero();
  t.a_M = M.isIdentity(0.0) ? 0 : 1;
  t.lambda_Mbeta = t.kc *
      (M(1, 1) - t.lambda_M - (2.0 * t.lambda_M - M(0, 0) - M(1, 1)) * t.lambda_beta) /
      (t.lambda_M * tr);
  t.rho_beta = kc2 * t.lambda_betabeta;
  // rho_kappa = -d_k^2 d / (2 d_lambda d) at (0,kc); with d_k d = 0 there this
  // evaluates to 4 kc^2 d1 d2 / (b1 + b4) < 0.
  t.rho_kappa = 4.0 * kc2 * sys.d1 * sys.d2 / tr;
  return t;
}

enum class HomMode { stripe, hex, square };

// Onset of instability of the homogeneous state against the named planar mode
// family, in terms of the effective parameter alpha = lambda_M * alpha_check.
inline double hom_instability_threshold(const TuringData& t, double beta, HomMode mode) {
  const double base = -t.kc * t.kc * t.lambda_betabeta * beta * beta;
  switch (mode) {
    case HomMode::stripe: return base;
    case HomMode::hex: return base / 4.0;
    case HomMode::square: return 0.0;
  }
  return 0.0;
}

}  // namespace stripes
