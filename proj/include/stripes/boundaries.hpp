#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stripes/lattice_blocks.hpp"

namespace stripes {

// ---------------------------------------------------------------------------
// closed-form boundary curves, all as alpha over the named abscissa

inline double bifurcation_alpha(const TuringData& t, double kt, double beta) {
  return -(t.rho_kappa * kt * kt + t.rho_beta * beta * beta);
}

inline double eckhaus_alpha(const TuringData& t, double kt, double beta) {
  return -(3.0 * t.rho_kappa * kt * kt + t.rho_beta * beta * beta);
}

// leading order: stretched stripes (kt < 0) are zigzag unstable
inline bool zigzag_unstable(double kt) { return kt < 0.0; }

inline double square_alpha(const TuringData& t, double kt, double beta, double lt) {
  return -2.0 * t.rho_beta * beta * beta + t.rho_kappa * (lt * lt - 2.0 * kt * kt);
}

struct HexBoundaries {
  double H_plus = 0.0, H_minus = 0.0;
  double delta_H = 0.0;
  bool valid = false;  // false when delta_H < 0: no boundary in real parameters
};

inline HexBoundaries hex_boundaries(const TuringData& t, const CoefficientSet& cs, double kt,
                                    double beta, double q_eff) {
  HexBoundaries h;
  const double q2 = q_eff * q_eff;
  const double term1 = 4.0 * q2 * q2, term2 = 9.0 * cs.k0 * q2 * t.rho_beta * beta * beta;
  h.delta_H = term1 + term2;
  // a discriminant that is zero up to rounding (the collapse at |beta| =
  // beta_tp) counts as zero
  if (h.delta_H < 0.0 && h.delta_H >= -1e-12 * (term1 + std::abs(term2))) h.delta_H = 0.0;
  const double base = -1.75 * t.rho_beta * beta * beta - t.rho_kappa * kt * kt;
  if (h.delta_H >= 0.0) {
    const double s = std::sqrt(h.delta_H);
    h.H_plus = base - (2.0 * q2 + s) / (3.0 * cs.k0);
    h.H_minus = base - (2.0 * q2 - s) / (3.0 * cs.k0);
    h.valid = true;
  }
  return h;
}

// eigenvalues of the hexagonal block, leading (reduced) form; classification
// always goes through these signs rather than boundary-curve lookup
struct EigenPair {
  double minus = 0.0, plus = 0.0;
};

inline EigenPair hex_eigen_leading(const TuringData& t, const CoefficientSet& cs, double alpha,
                                   double beta, double kt, double q_eff) {
  const double rad = -(alpha + t.rho_beta * beta * beta + t.rho_kappa * kt * kt) / (3.0 * cs.k0);
  if (rad < 0.0) throw NumericalError("hex_eigen_leading: no stripe at these parameters");
  const double At = std::sqrt(rad);
  const double core = 3.0 * cs.k0 * At * At - 0.75 * t.rho_beta * beta * beta;
  return {core - 2.0 * At * std::abs(q_eff), core + 2.0 * At * std::abs(q_eff)};
}

inline EigenPair quasihex_eigen_leading(const TuringData& t, const CoefficientSet& cs, double alpha,
                                        double beta, double kt, double theta, double q_eff) {
  if (!(theta > 0.0) || theta > 1.0) throw ThetaOutOfRange(theta);
  const double rad = -(alpha + t.rho_beta * beta * beta + t.rho_kappa * kt * kt) / (3.0 * cs.k0);
  if (rad < 0.0) throw NumericalError("quasihex_eigen_leading: no stripe at these parameters");
  const double At = std::sqrt(rad);
  const double omega = -theta * t.rho_kappa * kt * kt;
  const double core = 3.0 * cs.k0 * At * At + omega - 0.75 * t.rho_beta * beta * beta;
  return {core - 2.0 * At * std::abs(q_eff), core + 2.0 * At * std::abs(q_eff)};
}

struct HexThresholds {
  double q_tp = 0.0, alpha_tp = 0.0, beta_tp = 0.0;
};

inline HexThresholds hex_thresholds(const TuringData& t, const CoefficientSet& cs, double beta,
                                    double q_eff) {
  HexThresholds h;
  const double m = std::sqrt(-cs.k0 * t.rho_beta);
  h.q_tp = 1.5 * std::abs(beta) * m;
  h.alpha_tp = -0.25 * t.rho_beta * beta * beta;
  h.beta_tp = 2.0 * std::abs(q_eff) / (3.0 * m);
  return h;
}

// shifted hex boundaries in (beta, alpha~) with alpha~ = alpha + rho_b b^2 + rho_k kt^2
inline HexBoundaries hex_boundaries_shifted(const TuringData& t, const CoefficientSet& cs,
                                            double beta, double q_eff) {
  HexBoundaries h = hex_boundaries(t, cs, 0.0, beta, q_eff);
  const double shift = t.rho_beta * beta * beta;  // H(kt=0) + b^2 rho_b = -3/4 rho_b b^2 - ...
  if (h.valid) {
    h.H_plus += shift;
    h.H_minus += shift;
  }
  return h;
}

struct QuasihexBoundaries {
  double M_qh = 0.0, M_qH_plus = 0.0, M_qH_minus = 0.0;
  double delta_M = 0.0;
  bool valid = false;  // refers to the +- pair
};

inline QuasihexBoundaries quasihex_boundaries(const TuringData& t, const CoefficientSet& cs,
                                              double kt, double beta, double q_eff, double theta) {
  if (!(theta > 0.0) || theta > 1.0) throw ThetaOutOfRange(theta);
  QuasihexBoundaries m;
  const double q2 = q_eff * q_eff;
  m.M_qh = -1.75 * t.rho_beta * beta * beta - (theta + 1.0) * t.rho_kappa * kt * kt;
  const double term1 = 4.0 * q2 * q2, term2 = 9.0 * cs.k0 * t.rho_beta * beta * beta * q2,
               term3 = 12.0 * cs.k0 * theta * t.rho_kappa * kt * kt * q2;
  m.delta_M = term1 + term2 + term3;
  if (m.delta_M < 0.0 && m.delta_M >= -1e-12 * (term1 + std::abs(term2) + std::abs(term3)))
    m.delta_M = 0.0;
  if (m.delta_M >= 0.0) {
    const double s = std::sqrt(m.delta_M);
    m.M_qH_plus = m.M_qh - (2.0 * q2 + s) / (3.0 * cs.k0);
    m.M_qH_minus = m.M_qh - (2.0 * q2 - s) / (3.0 * cs.k0);
    m.valid = true;
  }
  return m;
}

struct ThresholdSet {
  double q_tp = 0.0, alpha_tp = 0.0;
  double beta_tp = 0.0;
  double q_tp_theta = 0.0, alpha_tp_theta = 0.0;
  bool q_tp_theta_valid = false;
  double beta_ep = 0.0;
  double beta_ex = 0.0;
  double q_ex = 0.0;
  double kappa_ep = 0.0, alpha_ep = 0.0;
  double kappa_mp = 0.0, alpha_mp = 0.0;
  bool kappa_mp_valid = false;
  double alpha_sec = 0.0;
  double alpha_sec_beta_plus = 0.0, alpha_sec_beta_minus = 0.0;
  bool alpha_sec_beta_valid = false;
};

// The printed q_ex radicand has k0(2-theta) < 0; the sign is fixed here with
// -k0 and validated against sgn(|b|-b_ex) = -sgn(|q|-q_ex) in the tests.
inline ThresholdSet quasihex_thresholds(const TuringData& t, const CoefficientSet& cs, double kt,
                                        double beta, double q_eff, double theta) {
  if (!(theta > 0.0) || theta > 1.0) throw ThetaOutOfRange(theta);
  ThresholdSet s;
  const HexThresholds h = hex_thresholds(t, cs, beta, q_eff);
  s.q_tp = h.q_tp;
  s.alpha_tp = h.alpha_tp;
  s.beta_tp = h.beta_tp;
  const double b2 = beta * beta, kt2 = kt * kt, q2 = q_eff * q_eff;
  const double rad_tp = -12.0 * cs.k0 * theta * t.rho_kappa * kt2 - 9.0 * cs.k0 * t.rho_beta * b2;
  s.q_tp_theta_valid = rad_tp >= 0.0;
  s.q_tp_theta = s.q_tp_theta_valid ? 0.5 * std::sqrt(rad_tp) : 0.0;
  s.alpha_tp_theta = -0.25 * t.rho_beta * b2 + (theta - 1.0) * t.rho_kappa * kt2;
  s.beta_ep = 2.0 * std::abs(kt) * std::sqrt(-theta * t.rho_kappa / (3.0 * t.rho_beta));
  s.beta_ex = (2.0 / 3.0) * std::abs(q_eff) * std::sqrt(2.0 / (cs.k0 * (theta - 2.0) * t.rho_beta));
  s.q_ex = 1.5 * std::abs(beta) * std::sqrt(-cs.k0 * (2.0 - theta) * t.rho_beta / 2.0);
  s.kappa_ep = std::abs(beta) * std::sqrt(-3.0 * t.rho_beta / (4.0 * theta * t.rho_kappa));
  s.alpha_ep = (3.0 / (4.0 * theta) - 1.0) * t.rho_beta * b2;
  const double rad_mp = -3.0 * t.rho_beta * b2 / (4.0 * theta * t.rho_kappa) -
                        q2 / (3.0 * cs.k0 * theta * t.rho_kappa);
  s.kappa_mp_valid = rad_mp >= 0.0;
  s.kappa_mp = s.kappa_mp_valid ? std::sqrt(rad_mp) : 0.0;
  s.alpha_mp = (4.0 * q2 * (1.0 - theta) + 3.0 * cs.k0 * (3.0 - 4.0 * theta) * t.rho_beta * b2) /
               (12.0 * cs.k0 * theta);
  const double tm2 = 2.0 - theta;
  s.alpha_sec = -8.0 * q2 / (cs.k0 * tm2 * tm2);
  const double rad_sec = 16.0 * q2 * q2 + 18.0 * cs.k0 * tm2 * q2 * t.rho_beta * b2;
  s.alpha_sec_beta_valid = rad_sec >= 0.0;
  if (s.alpha_sec_beta_valid) {
    const double root = 4.0 * std::sqrt(rad_sec);
    const double pre = -1.0 / (4.0 * cs.k0 * tm2 * tm2);
    const double mid = 16.0 * q2 + cs.k0 * t.rho_beta * b2 * (4.0 * theta * theta - 25.0 * theta + 34.0);
    s.alpha_sec_beta_plus = pre * (mid + root);
    s.alpha_sec_beta_minus = pre * (mid - root);
  }
  return s;
}

// ---------------------------------------------------------------------------
// classification

struct RegionLabel {
  bool exists = false;
  bool zigzag_unstable = false;
  bool eckhaus_unstable = false;
  bool square_unstable = false;
  bool hex_unstable = false;
  bool quasihex_unstable = false;
  bool stable_all_checked = false;
  bool marginal = false;
};

// Classifies one parameter point purely by eigenvalue signs. Marginal points
// (an eigenvalue exactly zero at leading order, or kt = 0 for zigzag) count
// as stable and carry the marginal annotation.
inline RegionLabel classify_point(const TuringData& t, const CoefficientSet& cs, double alpha,
                                  double beta, double kt, double q_eff, double theta,
                                  double ell_tilde_square) {
  RegionLabel r;
  Unfolding mu{alpha, beta, kt};
  auto A = stripe_amplitude(t, cs, mu);
  if (!A) return r;
  r.exists = true;
  auto flag = [&r](double eigenvalue) {
    if (eigenvalue == 0.0) r.marginal = true;
    return eigenvalue > 0.0;
  };
  // zigzag: sign of the l^2 curvature coefficient kc rho_k kt
  const double zz = t.kc * t.rho_kappa * kt;
  r.zigzag_unstable = flag(zz);
  if (kt == 0.0) r.marginal = true;
  // Eckhaus: gamma^2 curvature -kc^2 rho_k/(rho_nl A^2) (alpha + rho_b b^2 + 3 rho_k kt^2)
  if (*A > 0.0) {
    const double eh = -t.kc * t.kc * (t.rho_kappa / (cs.rho_nl * *A * *A)) *
                      (alpha + t.rho_beta * beta * beta + 3.0 * t.rho_kappa * kt * kt);
    r.eckhaus_unstable = flag(eh);
  } else {
    r.marginal = true;
  }
  const double lam_sq = -alpha - 2.0 * t.rho_beta * beta * beta +
                        t.rho_kappa * (ell_tilde_square * ell_tilde_square - 2.0 * kt * kt);
  r.square_unstable = flag(lam_sq);
  r.hex_unstable = flag(hex_eigen_leading(t, cs, alpha, beta, kt, q_eff).plus);
  r.quasihex_unstable = flag(quasihex_eigen_leading(t, cs, alpha, beta, kt, theta, q_eff).plus);
  r.stable_all_checked = r.exists && !r.zigzag_unstable && !r.eckhaus_unstable &&
                         !r.square_unstable && !r.hex_unstable && !r.quasihex_unstable;
  return r;
}

// ---------------------------------------------------------------------------
// diagram grids

enum class DiagramPlane { kappa_alpha, q_alpha, beta_alphatilde, epsilon_alpha };

struct BoundaryCurve {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct DiagramGrid {
  DiagramPlane plane;
  std::vector<double> x;  // abscissa samples
  std::vector<double> y;  // ordinate samples
  std::vector<RegionLabel> labels;  // row-major: labels[iy * x.size() + ix]
  std::vector<BoundaryCurve> boundaries;

  const RegionLabel& at(std::size_t ix, std::size_t iy) const { return labels[iy * x.size() + ix]; }
};

struct GridSpec {
  double x_min = 0.0, x_max = 1.0;
  std::size_t x_count = 2;
  double y_min = 0.0, y_max = 1.0;
  std::size_t y_count = 2;
};

struct DiagramParams {
  double beta = 0.0;
  double kappa_tilde = 0.0;
  double q_eff = 0.0;
  double theta = 1.0;
  double ell_tilde_square = 0.0;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n > 1 ? lo + (hi - lo) * double(i) / double(n - 1) : lo;
  return v;
}

// Rectangular grid of region labels plus the boundary graphs for overlay.
// The epsilon_alpha plane rescales Q per column, so it needs system + turing;
// the other planes only consume the fixed coefficient set.
inline DiagramGrid diagram_grid(const SystemSpec& sys, const TuringData& t,
                                const CoefficientSet& cs, DiagramPlane plane,
                                const DiagramParams& par, const GridSpec& grid,
                                std::size_t cell_cap = 10000000) {
  if (grid.x_count < 2 || grid.y_count < 2) {
    if (grid.x_count == 0 || grid.y_count == 0) return {plane, {}, {}, {}, {}};
  }
  if (grid.x_count * grid.y_count > cell_cap) throw GridTooFine(grid.x_count * grid.y_count);
  DiagramGrid g;
  g.plane = plane;
  g.x = linspace(grid.x_min, grid.x_max, grid.x_count);
  g.y = linspace(grid.y_min, grid.y_max, grid.y_count);
  g.labels.resize(g.x.size() * g.y.size());

  // classification of one point of this plane, alpha overridable
  auto classify_at = [&](double xv, double alpha) -> RegionLabel {
    switch (plane) {
      case DiagramPlane::kappa_alpha:
        return classify_point(t, cs, alpha, par.beta, xv, par.q_eff, par.theta,
                              par.ell_tilde_square);
      case DiagramPlane::q_alpha:
        return classify_point(t, cs, alpha, par.beta, par.kappa_tilde, xv, par.theta,
                              par.ell_tilde_square);
      case DiagramPlane::beta_alphatilde:
        return classify_point(t, cs,
                              alpha - t.rho_beta * xv * xv -
                                  t.rho_kappa * par.kappa_tilde * par.kappa_tilde,
                              xv, par.kappa_tilde, par.q_eff, par.theta, par.ell_tilde_square);
      case DiagramPlane::epsilon_alpha: {
        CoefficientSet col = compute_coefficients(sys.with_quadratic_scaled(xv), t,
                                                  /*enforce_supercritical=*/false);
        col.gamma_cal = cs.gamma_cal;
        if (!(col.rho_nl < 0.0)) return RegionLabel{};
        return classify_point(t, col, alpha, par.beta, par.kappa_tilde, col.q_eff(), par.theta,
                              par.ell_tilde_square);
      }
    }
    return RegionLabel{};
  };

  for (std::size_t iy = 0; iy < g.y.size(); ++iy)
    for (std::size_t ix = 0; ix < g.x.size(); ++ix)
      g.labels[iy * g.x.size() + ix] = classify_at(g.x[ix], g.y[iy]);

  // Boundary graphs are emitted only where crossing them flips the named flag
  // (the classifier is the source of truth; curve pieces on foreign branches
  // or outside the existence region are dropped).
  const double d_off = 1e-6;
  auto add_curve = [&](const std::string& name, bool RegionLabel::*flag,
                       const std::function<double(double)>& f,
                       const std::function<bool(double)>& ok = nullptr) {
    BoundaryCurve c;
    c.name = name;
    for (double xv : g.x) {
      if (ok && !ok(xv)) continue;
      const double yv = f(xv);
      const RegionLabel above = classify_at(xv, yv + d_off);
      const RegionLabel below = classify_at(xv, yv - d_off);
      if (above.*flag == below.*flag) continue;
      c.x.push_back(xv);
      c.y.push_back(yv);
    }
    if (!c.x.empty()) g.boundaries.push_back(std::move(c));
  };

  switch (plane) {
    case DiagramPlane::kappa_alpha: {
      add_curve("bifurcation", &RegionLabel::exists,
                [&](double kt) { return bifurcation_alpha(t, kt, par.beta); });
      add_curve("eckhaus", &RegionLabel::eckhaus_unstable,
                [&](double kt) { return eckhaus_alpha(t, kt, par.beta); });
      add_curve("square", &RegionLabel::square_unstable,
                [&](double kt) { return square_alpha(t, kt, par.beta, par.ell_tilde_square); });
      auto hexb = [&](double kt) { return hex_boundaries(t, cs, kt, par.beta, par.q_eff); };
      add_curve("hex_plus", &RegionLabel::hex_unstable,
                [&](double kt) { return hexb(kt).H_plus; },
                [&](double kt) { return hexb(kt).valid; });
      add_curve("hex_minus", &RegionLabel::hex_unstable,
                [&](double kt) { return hexb(kt).H_minus; },
                [&](double kt) { return hexb(kt).valid; });
      auto qhb = [&](double kt) {
        return quasihex_boundaries(t, cs, kt, par.beta, par.q_eff, par.theta);
      };
      add_curve("quasihex_plus", &RegionLabel::quasihex_unstable,
                [&](double kt) { return qhb(kt).M_qH_plus; },
                [&](double kt) { return qhb(kt).valid; });
      add_curve("quasihex_minus", &RegionLabel::quasihex_unstable,
                [&](double kt) { return qhb(kt).M_qH_minus; },
                [&](double kt) { return qhb(kt).valid; });
      break;
    }
    case DiagramPlane::q_alpha: {
      add_curve("bifurcation", &RegionLabel::exists,
                [&](double) { return bifurcation_alpha(t, par.kappa_tilde, par.beta); });
      auto qhb = [&](double q) {
        return quasihex_boundaries(t, cs, par.kappa_tilde, par.beta, q, par.theta);
      };
      add_curve("quasihex_plus", &RegionLabel::quasihex_unstable,
                [&](double q) { return qhb(q).M_qH_plus; },
                [&](double q) { return qhb(q).valid; });
      add_curve("quasihex_minus", &RegionLabel::quasihex_unstable,
                [&](double q) { return qhb(q).M_qH_minus; },
                [&](double q) { return qhb(q).valid; });
      break;
    }
    case DiagramPlane::beta_alphatilde: {
      auto hs = [&](double b) { return hex_boundaries_shifted(t, cs, b, par.q_eff); };
      add_curve("hex_shifted_plus", &RegionLabel::hex_unstable,
                [&](double b) { return hs(b).H_plus; },
                [&](double b) { return hs(b).valid; });
      add_curve("hex_shifted_minus", &RegionLabel::hex_unstable,
                [&](double b) { return hs(b).H_minus; },
                [&](double b) { return hs(b).valid; });
      break;
    }
    case DiagramPlane::epsilon_alpha: {
      add_curve("bifurcation", &RegionLabel::exists,
                [&](double) { return bifurcation_alpha(t, par.kappa_tilde, par.beta); });
      auto col_at = [&](double scale) {
        CoefficientSet col = compute_coefficients(sys.with_quadratic_scaled(scale), t,
                                                  /*enforce_supercritical=*/false);
        col.gamma_cal = cs.gamma_cal;
        return col;
      };
      auto qhb = [&](double scale) {
        const CoefficientSet col = col_at(scale);
        return quasihex_boundaries(t, col, par.kappa_tilde, par.beta, col.q_eff(), par.theta);
      };
      auto valid_col = [&](double scale) {
        const CoefficientSet col = col_at(scale);
        return col.rho_nl < 0.0 && qhb(scale).valid;
      };
      add_curve("quasihex_plus", &RegionLabel::quasihex_unstable,
                [&](double scale) { return qhb(scale).M_qH_plus; }, valid_col);
      add_curve("quasihex_minus", &RegionLabel::quasihex_unstable,
                [&](double scale) { return qhb(scale).M_qH_minus; }, valid_col);
      break;
    }
  }
  return g;
}

}  // namespace stripes
