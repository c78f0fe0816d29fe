#pragma once

#include <atomic>
#include <optional>
#include <thread>

#include "stripes/oracle/lattice.hpp"

namespace stripes::oracle {

// Turing onset in a at fixed (m,d): smallest a above which the vegetated state
// is Turing-stable; located by bisection on the dispersion discriminant.
inline double klausmeier_turing_onset(double m, double d, double a_lo = 0.91, double a_hi = 10.0) {
  auto discriminant = [&](double a) {
    const SystemSpec s = klausmeier({a, m, d});
    const double p1 = s.d1 * s.L(1, 1) + s.d2 * s.L(0, 0);
    return p1 * p1 - 4.0 * s.d1 * s.d2 * s.L.determinant();
  };
  double lo = a_lo, hi = a_hi;
  if (discriminant(lo) <= 0.0) throw NumericalError("klausmeier onset: lower bracket not unstable");
  if (discriminant(hi) >= 0.0) throw NumericalError("klausmeier onset: upper bracket not stable");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (discriminant(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Klausmeier frozen at the Turing onset with the a-unfolding as M = dL/da;
// this is the normal-form instance used for calibration and eps-sweeps.
inline SystemSpec klausmeier_unfolded_at_onset(double m = 0.45, double d = 500.0) {
  const double aT = klausmeier_turing_onset(m, d);
  SystemSpec s = klausmeier({aT, m, d});
  const double h = 1e-6;
  const SystemSpec sp = klausmeier({aT + h, m, d});
  const SystemSpec sm = klausmeier({aT - h, m, d});
  s.M = (sp.L - sm.L) / (2.0 * h);
  s.poly.reset();  // the unfolded instance is tensor-defined
  return s;
}

// Leading-order stripe guess for a system that need not sit exactly at a
// Turing point: eigen-data of the advected symbol at wavenumber kappa plus the
// local pitchfork amplitude and comoving velocity. Empty when the kappa-mode
// is not unstable.
inline std::optional<std::pair<std::vector<Vec2c>, double>> local_stripe_guess(
    const SystemSpec& sys, double beta, double kappa, int N) {
  const Mat2c sym = (-kappa * kappa * sys.D() + sys.L).cast<Complex>() +
                    Complex(0.0, 1.0) * kappa * beta * sys.B(0.0).cast<Complex>();
  const Eigen::ComplexEigenSolver<Mat2c> es(sym, /*computeEigenvectors=*/true);
  int lead = es.eigenvalues()(0).real() >= es.eigenvalues()(1).real() ? 0 : 1;
  const Complex lam1 = es.eigenvalues()(lead);
  if (!(lam1.real() > 0.0)) return std::nullopt;
  Vec2c E = es.eigenvectors().col(lead);
  E /= std::sqrt(E.squaredNorm());
  // left eigenvector of sym for lam1, normalised to <E,E*> = 1
  const Eigen::ComplexEigenSolver<Mat2c> esT(sym.transpose(), /*computeEigenvectors=*/true);
  int leadT = std::abs(esT.eigenvalues()(0) - lam1) < std::abs(esT.eigenvalues()(1) - lam1) ? 0 : 1;
  Vec2c Es = esT.eigenvectors().col(leadT).conjugate();
  const Complex pairing = E(0) * std::conj(Es(0)) + E(1) * std::conj(Es(1));
  if (std::abs(pairing) < 1e-12) return std::nullopt;
  Es /= std::conj(pairing);
  auto proj = [&](const Vec2c& v) { return v(0) * std::conj(Es(0)) + v(1) * std::conj(Es(1)); };

  // comoving frame removing the linear drift of the critical mode
  const double c = beta != 0.0 ? -lam1.imag() / (kappa * beta) : 0.0;
  const Vec2c Ebar = E.conjugate();
  const Vec2c QEEbar = sys.Q(E, Ebar);
  const Vec2c QEE = sys.Q(E, E);
  Eigen::FullPivLU<Mat2c> luL(sys.L.cast<Complex>().eval());
  const Mat2c op2 = (-4.0 * kappa * kappa * sys.D() + sys.L).cast<Complex>() +
                    Complex(0.0, 2.0) * kappa * beta * sys.B(c).cast<Complex>();
  Eigen::FullPivLU<Mat2c> lu4(op2);
  if (!luL.isInvertible() || !lu4.isInvertible()) return std::nullopt;
  const Vec2c Q0 = -2.0 * Vec2c(luL.solve(QEEbar));
  const Vec2c Q2 = -2.0 * Vec2c(lu4.solve(QEE));
  const Complex q0 = proj(sys.Q(E, Q0));
  const Complex q2 = proj(sys.Q(Ebar, Q2));
  const Complex k0 = proj(sys.K(E, E, Ebar));
  const double rho_nl = (3.0 * k0 + 2.0 * q0 + q2).real();
  if (rho_nl >= 0.0) return std::nullopt;
  const double A = std::sqrt(lam1.real() / -rho_nl);
  std::vector<Vec2c> u(N + 1, Vec2c::Zero());
  Vec2c u0 = A * A * Q0;
  u[0] = u0.real().cast<Complex>();  // the DC mode is real
  u[1] = A * E;
  if (N >= 2) u[2] = 0.5 * A * A * Q2;
  // rotate the phase gauge onto Im u_1(0) = 0
  if (std::abs(u[1](0)) > 0.0) {
    const Complex phase = std::conj(u[1](0)) / std::abs(u[1](0));
    for (int n = 1; n <= std::min(N, 2); ++n)
      u[n] *= std::pow(phase, n);
  }
  return std::make_pair(std::move(u), c);
}

struct KlausmeierScanConfig {
  double m = 0.45, d = 500.0;
  double beta = 0.0;
  double a_min = 2.60, a_max = 2.89, a_step = 0.005;
  double kappa_min = 0.40, kappa_max = 0.55, kappa_step = 0.002;
  int N = 64;
  int N_lat = 6;          // retained for the slice dimension 2(2*N_lat+1)
  int N_bloch = 32;
  int ell_per_decade = 64;
  double ell_lo_frac = 0.01, ell_hi_frac = 1.5;
  int threads = 0;  // 0: hardware concurrency
};

struct CellResult {
  bool attempted = false;
  bool solver_failed = false;
  bool exists = false;
  double residual = 0.0;
  double amplitude = 0.0;
  double c_num = 0.0;
  bool eckhaus = false;
  bool zigzag = false;
  bool rect_breakup = false;
  bool rhomb_breakup = false;
  bool hex_point = false;       // instability on the exact hexagonal lattice
  bool quasihex_point = false;  // instability at the critical-circle oblique mode
  double max_re_rect = 0.0;
  double max_re_rhomb = 0.0;
  std::vector<double> rhomb_profile;  // max Re over the slice, per swept ell
};

struct KlausmeierScanResult {
  KlausmeierScanConfig config;
  double a_turing = 0.0;
  double kc_ref = 0.0;
  std::vector<double> kappa_values;  // ascending
  std::vector<double> a_values;      // ascending
  std::vector<double> ell_values;    // the swept transverse wavenumbers
  std::vector<CellResult> cells;     // [ia * kappa_values.size() + ik]

  const CellResult& at(std::size_t ik, std::size_t ia) const {
    return cells[ia * kappa_values.size() + ik];
  }
};

namespace detail {

// Transverse slice n2 = 1 of the lattice family. With the x-offset off (0 for
// rectangles, -kappa/2 for rhombic lattices) the modes are ((n1+off), ell_y).
// Higher slices reappear as n2 = 1 slices at rescaled ell within the sweep, so
// the sweep over ell with this single slice covers the lattice family.
inline Eigen::MatrixXcd transverse_slice(const SystemSpec& sys, const StripeSolution& stripe,
                                         double x_offset, double ell_y, double alpha_check,
                                         double beta, int N_lat,
                                         const std::vector<Mat2c>& kernels) {
  const int dim = 2 * (2 * N_lat + 1);
  const int jmax = (static_cast<int>(kernels.size()) - 1) / 2;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  const Mat2 D = sys.D();
  const Mat2 Bc = sys.B(stripe.c_num);
  for (int i1 = 0; i1 <= 2 * N_lat; ++i1) {
    const double mx = (i1 - N_lat) * stripe.kappa + x_offset;
    Mat2c sym = (-(mx * mx + ell_y * ell_y) * D + sys.L + alpha_check * sys.M).cast<Complex>();
    sym += Complex(0.0, 1.0) * beta * mx * Bc.cast<Complex>();
    M.block<2, 2>(2 * i1, 2 * i1) += sym;
    for (int i2 = 0; i2 <= 2 * N_lat; ++i2) {
      const int j = i1 - i2;
      if (j < -jmax || j > jmax) continue;
      M.block<2, 2>(2 * i1, 2 * i2) += kernels[j + jmax];
    }
  }
  return M;
}

inline double max_real(const std::vector<Complex>& evs) {
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& e : evs) m = std::max(m, e.real());
  return m;
}

}  // namespace detail

inline std::vector<double> log_spaced_ells(double kc_ref, int per_decade, double lo_frac,
                                           double hi_frac) {
  const double lo = lo_frac * kc_ref, hi = hi_frac * kc_ref;
  const int n = std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))) + 1);
  std::vector<double> ells(n);
  for (int i = 0; i < n; ++i)
    ells[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return ells;
}

// Brute-force classification scan over the (kappa, a) grid: continuation in a
// downward per kappa column, transverse sweeps on rectangular and rhombic
// lattice families, Bloch sideband curvature for the Eckhaus flag. Cells are
// independent across columns; failures are recorded per cell.
inline KlausmeierScanResult klausmeier_scan(const KlausmeierScanConfig& cfg) {
  KlausmeierScanResult res;
  res.config = cfg;
  res.a_turing = klausmeier_turing_onset(cfg.m, cfg.d);
  res.kc_ref = critical_wavenumber(klausmeier({res.a_turing, cfg.m, cfg.d}));
  for (double k = cfg.kappa_min; k <= cfg.kappa_max + 1e-12; k += cfg.kappa_step)
    res.kappa_values.push_back(k);
  for (double a = cfg.a_min; a <= cfg.a_max + 1e-12; a += cfg.a_step)
    res.a_values.push_back(a);
  res.ell_values = log_spaced_ells(res.kc_ref, cfg.ell_per_decade, cfg.ell_lo_frac, cfg.ell_hi_frac);
  const std::size_t nk = res.kappa_values.size(), na = res.a_values.size();
  res.cells.assign(nk * na, CellResult{});

  const double flag_tol = 1e-9;  // instability threshold over eigensolver noise

  auto run_column = [&](std::size_t ik) {
    const double kappa = res.kappa_values[ik];
    std::optional<StripeSolution> prev;
    for (std::size_t ja = 0; ja < na; ++ja) {
      const std::size_t ia = na - 1 - ja;  // a descending: continuation from onset
      const double a = res.a_values[ia];
      CellResult& cell = res.cells[ia * nk + ik];
      cell.attempted = true;
      const SystemSpec sys = klausmeier({a, cfg.m, cfg.d});
      NewtonOptions opt;
      opt.tol = 1e-11;
      opt.tol_accept = 1e-10;
      StripeOutcome out;
      try {
        if (prev && prev->amplitude() > 1e-5) {
          out = solve_stripe_1d_from(sys, 0.0, cfg.beta, kappa, cfg.N, *prev, opt);
        } else {
          auto guess = local_stripe_guess(sys, cfg.beta, kappa, cfg.N);
          if (!guess) {
            prev.reset();
            continue;  // kappa-mode stable: no stripe bifurcating here
          }
          StripeProblem prob(sys, 0.0, cfg.beta, kappa, cfg.N);
          out = newton_solve(prob, std::move(guess->first), guess->second, opt);
        }
      } catch (const NewtonDiverged&) {
        cell.solver_failed = true;
        prev.reset();
        continue;
      }
      if (!out.is_stripe()) {
        prev.reset();
        continue;
      }
      if (cfg.beta == 0.0) force_real_profile(out.solution);
      const StripeSolution& st = out.solution;
      prev = st;
      cell.exists = true;
      cell.residual = st.residual_norm;
      cell.amplitude = st.amplitude();
      cell.c_num = st.c_num;

      const auto kernels =
          detail::linearization_kernels(sys, st.coeff, std::min(2 * cfg.N_lat, 2 * st.N));
      auto sweep_max = [&](double x_offset, double ell_y) {
        return detail::max_real(detail::eig_all(detail::transverse_slice(
            sys, st, x_offset, ell_y, 0.0, cfg.beta, cfg.N_lat, kernels)));
      };
      cell.rhomb_profile.resize(res.ell_values.size());
      double mx_rect = -1e300, mx_rhomb = -1e300;
      const double ell_zz = res.ell_values.front() * std::sqrt(10.0);  // lowest half decade
      for (std::size_t il = 0; il < res.ell_values.size(); ++il) {
        const double ell = res.ell_values[il];
        const double mr = sweep_max(0.0, ell);
        const double mh = sweep_max(-0.5 * kappa, ell);
        cell.rhomb_profile[il] = mh;
        mx_rect = std::max(mx_rect, mr);
        mx_rhomb = std::max(mx_rhomb, mh);
        if (ell <= ell_zz && mr > flag_tol) cell.zigzag = true;
      }
      // hexagonal and critical-circle oblique lattice points of the rhomb family
      cell.hex_point = sweep_max(-0.5 * kappa, 0.5 * std::sqrt(3.0) * kappa) > flag_tol;
      const double rad = res.kc_ref * res.kc_ref - 0.25 * kappa * kappa;
      if (rad > 0.0) cell.quasihex_point = sweep_max(-0.5 * kappa, std::sqrt(rad)) > flag_tol;
      cell.max_re_rect = mx_rect;
      cell.max_re_rhomb = mx_rhomb;
      cell.rect_breakup = mx_rect > flag_tol;
      cell.rhomb_breakup = mx_rhomb > flag_tol;
      // Eckhaus: sideband curvature of the critical Bloch branch at gamma = 0
      try {
        const double curv = critical_branch_curvature(
            [&](double g) {
              return bloch_spectrum(sys, st, g, 0.0, 0.0, cfg.beta, cfg.N_bloch);
            },
            0.02);
        cell.eckhaus = curv > 0.0;
      } catch (const EigensolveFailure&) {
        cell.solver_failed = true;
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(nk)));
  if (threads == 1) {
    for (std::size_t ik = 0; ik < nk; ++ik) run_column(ik);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t ik = next.fetch_add(1); ik < nk; ik = next.fetch_add(1)) run_column(ik);
      });
    for (auto& th : pool) th.join();
  }
  return res;
}

// ---------------------------------------------------------------------------
// scan analyses

// sizes of the 4-connected components of the cells selected by pred,
// descending
template <typename Pred>
inline std::vector<int> component_sizes(const KlausmeierScanResult& res, Pred pred) {
  const std::size_t nk = res.kappa_values.size(), na = res.a_values.size();
  std::vector<int> comp(nk * na, -1);
  std::vector<int> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < nk * na; ++s) {
    if (comp[s] >= 0 || !pred(res.cells[s])) continue;
    const int id = static_cast<int>(sizes.size());
    comp[s] = id;
    sizes.push_back(1);
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const std::size_t ia = cur / nk, ik = cur % nk;
      const std::size_t nbrs[4] = {ik > 0 ? cur - 1 : cur, ik + 1 < nk ? cur + 1 : cur,
                                   ia > 0 ? cur - nk : cur, ia + 1 < na ? cur + nk : cur};
      for (std::size_t nb : nbrs) {
        if (nb == cur || comp[nb] >= 0 || !pred(res.cells[nb])) continue;
        comp[nb] = id;
        ++sizes[id];
        stack.push_back(nb);
      }
    }
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<int>());
  return sizes;
}

// number of components, optionally ignoring grid-resolution slivers
template <typename Pred>
inline int count_components(const KlausmeierScanResult& res, Pred pred, int min_cells = 1) {
  int n = 0;
  for (int s : component_sizes(res, pred))
    if (s >= min_cells) ++n;
  return n;
}

struct BranchCrossing {
  bool found = false;
  double kappa = 0.0, a = 0.0;
  double ell_split = 0.0;
};

namespace detail {
inline std::vector<std::pair<std::size_t, double>> local_maxima(const std::vector<double>& g) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const bool left_ok = i == 0 ? true : g[i] > g[i - 1];
    if (left_ok && g[i] >= g[i + 1]) out.emplace_back(i, g[i]);
  }
  if (!g.empty() && g.back() > g[g.size() - 2]) out.emplace_back(g.size() - 1, g.back());
  return out;
}
}  // namespace detail

// Locates the point where the two rhombic tangential-spectrum branches are
// simultaneously critical. The ell-axis is split at the valley between the two
// local maxima of the best-balanced cell (both branch maxima closest to zero);
// per column the zero crossings in a of each window maximum are collected, and
// the two criticality curves are intersected by linear interpolation.
inline BranchCrossing find_rhomb_branch_crossing(const KlausmeierScanResult& res) {
  BranchCrossing bc;
  const std::size_t nk = res.kappa_values.size(), na = res.a_values.size();
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_cell = 0, best_lo = 0, best_hi = 0;
  for (std::size_t ci = 0; ci < res.cells.size(); ++ci) {
    const CellResult& c = res.cells[ci];
    if (!c.exists || c.rhomb_profile.empty()) continue;
    auto m = detail::local_maxima(c.rhomb_profile);
    std::sort(m.begin(), m.end(), [](auto x, auto y) { return x.second > y.second; });
    if (m.size() < 2) continue;
    if (std::abs(static_cast<long>(m[0].first) - static_cast<long>(m[1].first)) < 5) continue;
    const double score = std::max(std::abs(m[0].second), std::abs(m[1].second));
    if (score < best_score) {
      best_score = score;
      best_cell = ci;
      best_lo = std::min(m[0].first, m[1].first);
      best_hi = std::max(m[0].first, m[1].first);
    }
  }
  if (!std::isfinite(best_score)) return bc;
  const double a_best = res.a_values[best_cell / nk];
  // split at the valley between the two branch peaks of the best cell
  std::size_t split = best_lo;
  double valley = std::numeric_limits<double>::infinity();
  for (std::size_t i = best_lo; i <= best_hi; ++i)
    if (res.cells[best_cell].rhomb_profile[i] < valley) {
      valley = res.cells[best_cell].rhomb_profile[i];
      split = i;
    }
  bc.ell_split = res.ell_values[split];
  auto window_max = [&](const CellResult& c, bool upper) {
    if (!c.exists || c.rhomb_profile.empty()) return std::nan("");
    double m = -std::numeric_limits<double>::infinity();
    const std::size_t lo = upper ? split : 0;
    const std::size_t hi = upper ? c.rhomb_profile.size() - 1 : split;
    for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, c.rhomb_profile[i]);
    return m;
  };
  // per column: the zero crossing of each window max nearest the best cell's a
  // (either direction; branches restabilise as well as destabilise)
  std::vector<double> a_lo(nk, std::nan("")), a_hi(nk, std::nan(""));
  for (std::size_t ik = 0; ik < nk; ++ik) {
    for (int upper = 0; upper < 2; ++upper) {
      double prev_v = std::nan(""), prev_a = std::nan("");
      double found = std::nan("");
      for (std::size_t ja = 0; ja < na; ++ja) {  // a descending
        const std::size_t ia = na - 1 - ja;
        const double v = window_max(res.at(ik, ia), upper);
        const double av = res.a_values[ia];
        if (!std::isnan(prev_v) && !std::isnan(v) && (prev_v < 0.0) != (v < 0.0)) {
          const double cross = prev_a + (av - prev_a) * (0.0 - prev_v) / (v - prev_v);
          if (std::isnan(found) || std::abs(cross - a_best) < std::abs(found - a_best))
            found = cross;
        }
        if (!std::isnan(v)) {
          prev_v = v;
          prev_a = av;
        }
      }
      (upper ? a_hi : a_lo)[ik] = found;
    }
  }
  for (std::size_t ik = 0; ik + 1 < nk; ++ik) {
    const double d0 = a_lo[ik] - a_hi[ik], d1 = a_lo[ik + 1] - a_hi[ik + 1];
    if (std::isnan(d0) || std::isnan(d1)) continue;
    if (d0 == 0.0 || (d0 < 0.0) != (d1 < 0.0)) {
      const double t = d0 / (d0 - d1);
      bc.found = true;
      bc.kappa = res.kappa_values[ik] + t * (res.kappa_values[ik + 1] - res.kappa_values[ik]);
      bc.a = a_lo[ik] + t * (a_lo[ik + 1] - a_lo[ik]);
      return bc;
    }
  }
  return bc;
}

}  // namespace stripes::oracle
