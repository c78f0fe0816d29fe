#pragma once

#include <optional>
#include <vector>

#include "stripes/turing.hpp"

namespace stripes {

// Solves S w = rhs on the range of the singular operator S (1D kernel spanned
// by E0, cokernel by E0*), gauge <w,E0*> = 0, via the bordered system
// [S, E0; E0*^T, 0]. rhs must satisfy <rhs,E0*> = 0 up to tol.
inline Vec2 reduced_inverse(const Mat2& S, const Vec2& rhs, const Vec2& E0, const Vec2& E0_star,
                            double tol = 1e-10) {
  const double defect = inner(rhs, E0_star);
  if (std::abs(defect) > tol * std::max(1.0, rhs.norm())) throw RhsNotInRange(defect);
  Eigen::Matrix3d A;
  A << S(0, 0), S(0, 1), E0(0), S(1, 0), S(1, 1), E0(1), E0_star(0), E0_star(1), 0.0;
  Eigen::Vector3d b(rhs(0), rhs(1), 0.0);
  Eigen::Vector3d x = A.fullPivLu().solve(b);
  return Vec2(x(0), x(1));
}

struct CoefficientSet {
  // scalars of the expansion; q_raw is the plain triad contraction and
  // gamma_cal the oracle-fixed convention factor (see calibrate_q_convention)
  double q0 = 0.0, q2 = 0.0, k0 = 0.0, rho_nl = 0.0;
  double q_raw = 0.0, q1 = 0.0, q11 = 0.0;
  double xi = 0.0, eta = 0.0;
  double gamma_cal = 1.0;
  Vec2 Q0 = Vec2::Zero(), Q2 = Vec2::Zero(), Q1 = Vec2::Zero(), Q11 = Vec2::Zero();
  Vec2 w_Aalpha = Vec2::Zero(), w_Abeta = Vec2::Zero(), w_Akappa = Vec2::Zero(),
       w_Abetabeta = Vec2::Zero();
  double c = 0.0;  // stripe velocity parameter, -lambda_beta at leading order

  double q_eff() const { return gamma_cal * q_raw; }
};

// All nonlinear expansion coefficients. The auxiliary inverses use the
// operators L, -2kc^2 D + L, -4kc^2 D + L; the singular -kc^2 D + L enters
// only through the bordered reduced inverse.
inline CoefficientSet compute_coefficients(const SystemSpec& sys, const TuringData& t,
                                           bool enforce_supercritical = true) {
  CoefficientSet cs;
  const double kc2 = t.kc * t.kc;
  const Mat2 D = sys.D();
  const Mat2 L0 = -kc2 * D + sys.L;
  const Vec2 QEE = sys.Q(t.E0, t.E0);
  cs.q_raw = inner(QEE, t.E0_star);
  cs.c = -t.lambda_beta;

  auto solve_regular = [&](const Mat2& A, const Vec2& rhs, const char* name) {
    Eigen::FullPivLU<Mat2> lu(A);
    if (!lu.isInvertible()) throw SingularAuxiliaryOperator(name);
    return Vec2(lu.solve(rhs));
  };
  cs.Q0 = -2.0 * solve_regular(sys.L, QEE, "L");
  cs.Q2 = -2.0 * solve_regular(Mat2(-4.0 * kc2 * D + sys.L), QEE, "-4kc^2 D + L");
  cs.Q11 = -solve_regular(Mat2(-2.0 * kc2 * D + sys.L), QEE, "-2kc^2 D + L");
  cs.Q1 = reduced_inverse(L0, Vec2(cs.q_raw * t.E0 - QEE), t.E0, t.E0_star);
  cs.q0 = inner(sys.Q(t.E0, cs.Q0), t.E0_star);
  cs.q2 = inner(sys.Q(t.E0, cs.Q2), t.E0_star);
  cs.q1 = inner(sys.Q(t.E0, cs.Q1), t.E0_star);
  cs.q11 = inner(sys.Q(t.E0, cs.Q11), t.E0_star);
  cs.k0 = inner(sys.K(t.E0, t.E0, t.E0), t.E0_star);
  cs.rho_nl = 3.0 * cs.k0 + 2.0 * cs.q0 + cs.q2;
  cs.xi = 6.0 * cs.k0 + 2.0 * cs.q0 + 8.0 * cs.q11;
  cs.eta = 6.0 * cs.k0 + 2.0 * cs.q0 + 8.0 * cs.q1;
  if (enforce_supercritical && !(cs.rho_nl < 0.0)) throw SupercriticalityViolated(cs.rho_nl);

  // response vectors; B is evaluated in the comoving frame c = -lambda_beta,
  // where <B E0, E0*> = 0
  const Mat2 Bc = sys.B(cs.c);
  cs.w_Aalpha = reduced_inverse(L0, Vec2(inner(Vec2(sys.M * t.E0), t.E0_star) * t.E0 - sys.M * t.E0),
                                t.E0, t.E0_star);
  cs.w_Abeta = t.kc * reduced_inverse(L0, Vec2(inner(Vec2(Bc * t.E0), t.E0_star) * t.E0 - Bc * t.E0),
                                      t.E0, t.E0_star);
  cs.w_Akappa = 2.0 * t.kc * reduced_inverse(L0, Vec2(D * t.E0), t.E0, t.E0_star);
  const Vec2 Bw = Bc * cs.w_Abeta;
  cs.w_Abetabeta = 2.0 * t.kc * reduced_inverse(L0, Vec2(Bw - inner(Bw, t.E0_star) * t.E0),
                                                t.E0, t.E0_star);
  return cs;
}

// rho_beta and rho_kappa through the response vectors; must agree with the
// dispersion-based values in TuringData.
inline double rho_beta_alt(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs) {
  return -t.kc * inner(Vec2(sys.B(cs.c) * cs.w_Abeta), t.E0_star);
}
inline double rho_kappa_alt(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs) {
  return -2.0 * t.kc * inner(Vec2(sys.D() * cs.w_Akappa), t.E0_star);
}

struct Unfolding {
  double alpha = 0.0;        // effective parameter, alpha = lambda_M * alpha_check
  double beta = 0.0;
  double kappa_tilde = 0.0;
};

inline double bifurcation_radicand(const TuringData& t, const CoefficientSet& cs,
                                   const Unfolding& mu) {
  return -(mu.alpha + t.rho_beta * mu.beta * mu.beta + t.rho_kappa * mu.kappa_tilde * mu.kappa_tilde) /
         cs.rho_nl;
}

// A = sqrt(-(alpha + rho_b b^2 + rho_k k^2)/rho_nl); empty below the
// bifurcation surface.
inline std::optional<double> stripe_amplitude(const TuringData& t, const CoefficientSet& cs,
                                              const Unfolding& mu) {
  const double r = bifurcation_radicand(t, cs, mu);
  if (r < 0.0) return std::nullopt;
  return std::sqrt(r);
}

inline double stripe_velocity(const CoefficientSet& cs) { return cs.c; }

// Real stripe profile on the rescaled period [0,2pi]:
//   U(x) = 2A[(E0 + ac w_Aa + kt w_Ak + b^2 w_Abb) cos x - b w_Ab sin x]
//        + A^2 (Q2 cos 2x + Q0) + O(A^3)
inline std::vector<Vec2> stripe_profile(const TuringData& t, const CoefficientSet& cs, double A,
                                        const Unfolding& mu, const std::vector<double>& x_grid) {
  const double ac = mu.alpha / t.lambda_M;
  const Vec2 cos_part = t.E0 + ac * cs.w_Aalpha + mu.kappa_tilde * cs.w_Akappa +
                        mu.beta * mu.beta * cs.w_Abetabeta;
  std::vector<Vec2> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    Vec2 u = 2.0 * A * (cos_part * std::cos(x) - mu.beta * cs.w_Abeta * std::sin(x));
    u += A * A * (cs.Q2 * std::cos(2.0 * x) + cs.Q0);
    out.push_back(u);
  }
  return out;
}

// p(mu_1) of the hexagonal block: linear in (beta', kappa'), complex through
// the i*beta' terms.
inline Complex p_hex(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs,
                     double beta_p, double kappa_p) {
  const Complex i(0.0, 1.0);
  const Vec2c arg = i * beta_p * cs.w_Abeta.cast<Complex>() + 4.0 * kappa_p * cs.w_Akappa.cast<Complex>();
  Complex term1 = inner(Vec2c(sys.Q(arg, t.E0.cast<Complex>().eval())), t.E0_star);
  const Mat2c op = (-4.0 * kappa_p * t.kc * sys.D()).cast<Complex>() -
                   i * beta_p * t.kc * sys.B(cs.c).cast<Complex>();
  Complex term2 = inner(Vec2c(op * cs.Q1.cast<Complex>()), t.E0_star);
  return term1 + term2;
}

// quasi-hexagonal variant; reduces to p_hex when ell_p = kappa_p
inline Complex p_quasihex(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs,
                          double beta_p, double kappa_p, double ell_p) {
  const Complex i(0.0, 1.0);
  const Vec2c arg = i * beta_p * cs.w_Abeta.cast<Complex>() +
                    (2.5 * kappa_p + 1.5 * ell_p) * cs.w_Akappa.cast<Complex>();
  Complex term1 = inner(Vec2c(sys.Q(arg, t.E0.cast<Complex>().eval())), t.E0_star);
  const Mat2c op = i * beta_p * t.kc * sys.B(cs.c).cast<Complex>() +
                   ((kappa_p + 3.0 * ell_p) * t.kc * sys.D()).cast<Complex>();
  Complex term2 = -inner(Vec2c(op * cs.Q1.cast<Complex>()), t.E0_star);
  return term1 + term2;
}

}  // namespace stripes
