// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. --fast runs criteria 1-7 (seconds to minutes), --scan runs the
// Klausmeier brute-force criteria 8-9 (tens of minutes, two worker threads).

#include <chrono>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>

#include "stripes/io/emit.hpp"
#include "stripes/oracle/compare.hpp"
#include "stripes/oracle/klausmeier_scan.hpp"

using namespace stripes;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::cout << "CRITERION " << id << ": " << (pass ? "PASS" : "FAIL") << " - " << detail
            << std::endl;
  if (!pass) ++g_failures;
}

std::string num(double v) { return io::fmt12(v); }

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---------------------------------------------------------------------- 1-4

void criterion_1(const SystemSpec& sys, const TuringData& t) {
  const bool kc_exact = t.kc == 1.0;
  const bool lm = std::abs(t.lambda_M - 12.24) <= 1e-10;
  const bool rb = std::abs(t.rho_beta - 0.112) <= 1e-10;
  const bool rk = std::abs(t.rho_kappa - (-2.8)) <= 1e-10;
  const bool eck = std::abs(3.0 * t.rho_kappa - (-8.4)) <= 1e-10;
  std::ostringstream d;
  d << "kc=" << num(t.kc) << " lambda_M=" << num(t.lambda_M) << " rho_beta=" << num(t.rho_beta)
    << " rho_kappa=" << num(t.rho_kappa) << " 3rho_kappa=" << num(3.0 * t.rho_kappa);
  report("1", kc_exact && lm && rb && rk && eck, d.str());
  (void)sys;
}

void criterion_2(const TuringData& t, const CoefficientSet& cs, double q_eff_calibrated) {
  // Threshold formulas evaluated at the published premise q_eff = -0.215;
  // whether the calibration itself reproduces that value is criterion 6.
  const double q = -0.215;
  const ThresholdSet s = quasihex_thresholds(t, cs, 0.1, 0.0, q, 1.0);
  const bool tp = std::abs(s.beta_tp - 0.3785) <= 2e-3;
  const bool ex = std::abs(s.beta_ex - 0.5353) <= 2e-3;
  const bool ep = std::abs(s.beta_ep - 0.5774) <= 2e-3;
  std::ostringstream d;
  d << "at premise q_eff=-0.215: beta_tp=" << num(s.beta_tp) << " beta_ex=" << num(s.beta_ex)
    << " beta_ep(kt=0.1)=" << num(s.beta_ep)
    << "  [calibrated q_eff(0.4)=" << num(q_eff_calibrated) << ", see criterion 6]";
  report("2", tp && ex && ep, d.str());
}

void criterion_3(const TuringData& t) {
  const double stripe = hom_instability_threshold(t, 0.2, HomMode::stripe);
  const double hex = hom_instability_threshold(t, 0.2, HomMode::hex);
  const bool ok = std::abs(stripe - (-0.00448)) <= 1e-5 && std::abs(hex - (-0.00112)) <= 1e-5;
  report("3", ok, "stripe onset=" + num(stripe) + " hex onset=" + num(hex) + " at beta=0.2");
}

void criterion_4(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs) {
  const double rb_alt = rho_beta_alt(sys, t, cs);
  const double rk_alt = rho_kappa_alt(sys, t, cs);
  const bool cross = std::abs(rb_alt - t.rho_beta) <= 1e-10 && std::abs(rk_alt - t.rho_kappa) <= 1e-10;
  const bool k0ok = std::abs(cs.k0 - (-1.28)) <= 1e-12;
  const double kc2 = t.kc * t.kc;
  const double defect = sys.L(0, 1) * sys.L(1, 0) -
                        (sys.L(0, 0) - kc2 * sys.d1) * (sys.L(1, 1) - kc2 * sys.d2);
  const bool ident = std::abs(defect) <= 1e-10;
  std::ostringstream d;
  d << "rho_beta(resp)=" << num(rb_alt) << " rho_kappa(resp)=" << num(rk_alt)
    << " k0=" << num(cs.k0) << " a2a3-identity defect=" << num(defect);
  report("4", cross && k0ok && ident, d.str());
}

// ------------------------------------------------------------------------ 5

std::vector<oracle::Scenario> acceptance_scenarios() {
  using oracle::LatticeKind;
  oracle::Scenario sq{"square", LatticeKind::square, 1.0, 0.5, 0.4, 0.0, 1.0, 32, 8};
  oracle::Scenario hx{"hex", LatticeKind::hexagonal, 1.0, 0.5, 0.3, 0.3, 1.0, 32, 8};
  oracle::Scenario qh{"quasihex(theta=1)", LatticeKind::quasihexagonal, 4.0, 0.0, 1.0,
                      -1.0 / 3.0, 1.0, 32, 8};
  return {sq, hx, qh};
}

void criterion_5(const SystemSpec& unit, double gamma_cal) {
  Timer timer;
  bool all = true;
  std::ostringstream d;
  const std::vector<double> eps = {0.05, 0.025, 0.0125};
  for (const auto& sc : acceptance_scenarios()) {
    try {
      const auto rep = oracle::compare_asymptotics(unit, sc, eps, gamma_cal);
      double min_order = 1e9, max_tr = 0.0;
      for (const auto& tr : rep.tracks) min_order = std::min(min_order, tr.at_floor ? 9.9 : tr.order_fit);
      for (double tr : rep.translation_abs) max_tr = std::max(max_tr, tr);
      const bool ok = rep.pass(2.5);
      all = all && ok;
      d << sc.name << "[min order " << num(min_order) << ", max |trans| " << num(max_tr) << "] ";
    } catch (const std::exception& e) {
      all = false;
      d << sc.name << "[threw: " << e.what() << "] ";
    }
  }
  d << "(" << num(timer.seconds()) << " s)";
  report("5", all, d.str());
}

// ------------------------------------------------------------------------ 6

struct CalOutcome {
  bool ok = false;
  double gamma = 1.0;
  double q_eff_04 = std::nan("");
  std::string error;
  oracle::CalibrationResult cal;
};

CalOutcome run_calibration(const SystemSpec& unit) {
  CalOutcome out;
  try {
    out.cal = oracle::calibrate_q_convention(unit);
    out.gamma = out.cal.gamma_cal;
    out.ok = true;
    const SystemSpec at04 = designed_example(0.4);
    const TuringData t = linear_coeffs(at04);
    CoefficientSet cs = compute_coefficients(at04, t);
    cs.gamma_cal = out.gamma;
    out.q_eff_04 = cs.q_eff();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

void criterion_6(const CalOutcome& out) {
  if (!out.ok) {
    report("6", false, "calibration threw: " + out.error);
    return;
  }
  const bool match = std::abs(out.q_eff_04 - (-0.215)) <= 1e-3;
  std::ostringstream d;
  d << "unique gamma_cal=" << num(out.gamma) << " (orders: gamma=1 -> "
    << num(out.cal.order_gamma_full) << ", gamma=1/2 -> " << num(out.cal.order_gamma_half)
    << "); q_eff(eps=0.4)=" << num(out.q_eff_04) << " vs printed -0.215";
  if (!match)
    d << " | the brute-force lattice spectra pin the raw triad contraction (gamma=1); the "
         "printed value corresponds to gamma=1/2, which only fits at order ~2";
  report("6", match, d.str());
}

// ------------------------------------------------------------------------ 7

void criterion_7(const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs) {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  bool parity = true, orderings = true, dh_zero = true, reduction = true, hex_q0 = true,
       eck_dom = true, flips = true;
  // parity and orderings on random samples
  for (int i = 0; i < 300; ++i) {
    const double kt = u(rng), beta = u(rng), q = u(rng);
    const double theta = 0.05 + 0.95 * std::abs(u(rng)) * 2.0;
    const double th = std::min(theta, 1.0);
    parity = parity &&
             std::abs(bifurcation_alpha(t, kt, beta) - bifurcation_alpha(t, kt, -beta)) <= 1e-12 &&
             std::abs(eckhaus_alpha(t, kt, beta) - eckhaus_alpha(t, kt, -beta)) <= 1e-12;
    const HexBoundaries h1 = hex_boundaries(t, cs, kt, beta, q);
    const HexBoundaries h2 = hex_boundaries(t, cs, kt, -beta, -q);
    parity = parity && h1.valid == h2.valid &&
             (!h1.valid || (std::abs(h1.H_plus - h2.H_plus) <= 1e-12 &&
                            std::abs(h1.H_minus - h2.H_minus) <= 1e-12));
    orderings = orderings && bifurcation_alpha(t, kt, beta) <= eckhaus_alpha(t, kt, beta) + 1e-14;
    eck_dom = eck_dom && eckhaus_alpha(t, kt, beta) >= square_alpha(t, kt, beta, 0.0) - 1e-14;
    // the M_qH-/M_qh/M_qH+ ordering is an isotropic (beta = 0) statement
    const QuasihexBoundaries m = quasihex_boundaries(t, cs, kt, 0.0, q, th);
    if (m.valid && q != 0.0)
      orderings = orderings && m.M_qH_minus <= m.M_qh + 1e-13 && m.M_qh < m.M_qH_plus + 1e-13;
  }
  // delta_H = 0 at beta_tp by substitution (up to roundoff of the two terms)
  for (double q : {-0.215, 0.37, -0.8}) {
    const double beta_tp = hex_thresholds(t, cs, 0.0, q).beta_tp;
    const double dh = hex_boundaries(t, cs, 0.11, beta_tp, q).delta_H;
    dh_zero = dh_zero && std::abs(dh) <= 1e-12 * 4.0 * std::pow(q, 4);
  }
  // quasi-hex -> hex reduction at lt = kt
  for (int i = 0; i < 50; ++i) {
    Unfolding mu{0.05 + 0.05 * u(rng), 0.3 * u(rng), 0.1 * u(rng)};
    auto A = stripe_amplitude(t, cs, mu);
    if (!A) continue;
    const LatticeBlock h = block_L2_hex(sys, t, cs, *A, mu);
    const LatticeBlock q = block_L2_quasihex(sys, t, cs, *A, mu, mu.kappa_tilde);
    reduction = reduction && std::abs(h.ev_plus - q.ev_plus) <= 1e-12 &&
                std::abs(h.ev_minus - q.ev_minus) <= 1e-12;
  }
  // q = 0: hex eigenvalues negative wherever stripes exist
  for (int i = 0; i < 200; ++i) {
    const double kt = 0.2 * u(rng), beta = u(rng);
    const double alpha = bifurcation_alpha(t, kt, beta) + 0.25 * std::abs(u(rng)) + 1e-6;
    const EigenPair e = hex_eigen_leading(t, cs, alpha, beta, kt, 0.0);
    hex_q0 = hex_q0 && e.plus < 0.0 && e.minus < 0.0;
  }
  // classifier flips across every emitted boundary polyline
  DiagramParams par;
  par.beta = 0.2;
  par.q_eff = -0.215;
  par.theta = 1.0;
  const DiagramGrid grid = diagram_grid(sys, t, cs, DiagramPlane::kappa_alpha, par,
                                        GridSpec{-0.22, 0.22, 45, -0.02, 0.3, 11});
  int flip_points = 0;
  for (const BoundaryCurve& c : grid.boundaries) {
    bool RegionLabel::*flag = nullptr;
    if (c.name == "bifurcation") flag = &RegionLabel::exists;
    else if (c.name == "eckhaus") flag = &RegionLabel::eckhaus_unstable;
    else if (c.name == "square") flag = &RegionLabel::square_unstable;
    else if (c.name.rfind("hex", 0) == 0) flag = &RegionLabel::hex_unstable;
    else flag = &RegionLabel::quasihex_unstable;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const RegionLabel up = classify_point(t, cs, c.y[i] + 1e-6, par.beta, c.x[i], par.q_eff,
                                            par.theta, 0.0);
      const RegionLabel dn = classify_point(t, cs, c.y[i] - 1e-6, par.beta, c.x[i], par.q_eff,
                                            par.theta, 0.0);
      if (up.*flag == dn.*flag) flips = false;
      ++flip_points;
    }
  }
  flips = flips && flip_points > 50;
  std::ostringstream d;
  d << "parity=" << parity << " orderings=" << orderings << " deltaH(beta_tp)=0:" << dh_zero
    << " qh->hex:" << reduction << " hex stable at q=0:" << hex_q0 << " E>=Q:" << eck_dom
    << " polyline flips(" << flip_points << " pts):" << flips;
  report("7", parity && orderings && dh_zero && reduction && hex_q0 && eck_dom && flips, d.str());
}

// ---------------------------------------------------------------------- 8-9

void criterion_8() {
  Timer timer;
  oracle::KlausmeierScanConfig cfg;
  cfg.beta = 0.0;
  cfg.a_min = 2.60;
  cfg.a_max = 2.885;
  cfg.a_step = 0.005;
  cfg.kappa_min = 0.40;
  cfg.kappa_max = 0.55;
  cfg.kappa_step = 0.002;
  const auto res = oracle::klausmeier_scan(cfg);
  const auto bc = oracle::find_rhomb_branch_crossing(res);
  bool cross_ok = bc.found && std::abs(bc.kappa - 0.4784) <= 0.01 * 0.4784 &&
                  std::abs(bc.a - 2.712) <= 0.01 * 2.712;
  // stripes at onset classify rhomb-unstable: topmost existing cell per column
  int onset_cells = 0, onset_rhomb = 0;
  const std::size_t nk = res.kappa_values.size(), na = res.a_values.size();
  for (std::size_t ik = 0; ik < nk; ++ik) {
    for (std::size_t ja = 0; ja < na; ++ja) {
      const auto& c = res.at(ik, na - 1 - ja);
      if (!c.exists) continue;
      ++onset_cells;
      if (c.rhomb_breakup) ++onset_rhomb;
      break;
    }
  }
  const bool onset_ok = onset_cells > 0 && onset_rhomb >= (95 * onset_cells) / 100;
  std::ostringstream d;
  if (bc.found)
    d << "crossing at (kappa, a)=(" << num(bc.kappa) << ", " << num(bc.a) << ") vs (0.4784, 2.712)";
  else
    d << "crossing not found";
  d << "; onset cells rhomb-unstable " << onset_rhomb << "/" << onset_cells;
  d << " (" << num(timer.seconds()) << " s)";
  report("8", cross_ok && onset_ok, d.str());
}

void criterion_9() {
  Timer timer;
  // beta = 40: the rhomb-unstable region has split into two components
  oracle::KlausmeierScanConfig c40;
  c40.beta = 40.0;
  c40.a_min = 2.70;
  c40.a_max = 2.95;
  c40.a_step = 0.005;
  c40.kappa_min = 0.38;
  c40.kappa_max = 0.54;
  c40.kappa_step = 0.002;
  const auto res40 = oracle::klausmeier_scan(c40);
  auto rhomb = [](const oracle::CellResult& c) { return c.exists && c.rhomb_breakup; };
  const auto sizes40 = oracle::component_sizes(res40, rhomb);
  const int comps40 = oracle::count_components(res40, rhomb, 5);
  const bool split_ok = comps40 == 2;

  // beta = 100: no breakup flags on large-wavelength-stable cells
  oracle::KlausmeierScanConfig c100;
  c100.beta = 100.0;
  c100.a_min = 2.80;
  c100.a_max = 3.10;
  c100.a_step = 0.005;
  c100.kappa_min = 0.38;
  c100.kappa_max = 0.54;
  c100.kappa_step = 0.002;
  const auto res100 = oracle::klausmeier_scan(c100);
  int violations = 0, breakup100 = 0;
  for (const auto& c : res100.cells) {
    if (!c.exists) continue;
    if (c.rect_breakup || c.rhomb_breakup) ++breakup100;
    if (!c.eckhaus && !c.zigzag && (c.rect_breakup || c.rhomb_breakup)) ++violations;
  }
  std::ostringstream d;
  d << "beta=40 rhomb components (>=5 cells): " << comps40 << " [sizes";
  for (std::size_t i = 0; i < std::min<std::size_t>(sizes40.size(), 6); ++i)
    d << " " << sizes40[i];
  d << "]; beta=100 breakup cells above the sideband/zigzag curves: " << violations << " of "
    << breakup100 << " breakup cells";
  d << " (" << num(timer.seconds()) << " s)";
  report("9", split_ok && violations == 0, d.str());
}

}  // namespace

int main(int argc, char** argv) {
  bool fast = true, scan = true;
  if (argc > 1 && std::strcmp(argv[1], "--fast") == 0) scan = false;
  if (argc > 1 && std::strcmp(argv[1], "--scan") == 0) fast = false;

  try {
    if (fast) {
      const SystemSpec sys = designed_example(0.4);
      const TuringData t = linear_coeffs(sys);
      const CoefficientSet cs = compute_coefficients(sys, t);
      const SystemSpec unit = designed_example(1.0);
      const CalOutcome cal = run_calibration(unit);  // feeds criteria 2, 5, 6
      criterion_1(sys, t);
      criterion_2(t, cs, cal.q_eff_04);
      criterion_3(t);
      criterion_4(sys, t, cs);
      criterion_5(unit, cal.ok ? cal.gamma : 1.0);
      criterion_6(cal);
      criterion_7(sys, t, cs);
    }
    if (scan) {
      criterion_8();
      criterion_9();
    }
  } catch (const std::exception& e) {
    std::cout << "acceptance suite aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (g_failures == 0 ? "all criteria passed" :
                std::to_string(g_failures) + " criterion(s) failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
