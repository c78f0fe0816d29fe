#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "stripes/oracle/stripe_solver.hpp"

namespace stripes::oracle {

enum class LatticeKind { square, rectangle, hexagonal, rhombic, quasihexagonal };

// Dual-lattice generators; the stripe lies along K1 = (kappa, 0).
struct LatticeSpec {
  LatticeKind kind = LatticeKind::square;
  Vec2 K1 = Vec2::Zero();
  Vec2 K2 = Vec2::Zero();
  int N_lat = 8;

  int critical_count() const {
    return (kind == LatticeKind::square || kind == LatticeKind::rectangle) ? 4 : 6;
  }

  static LatticeSpec make_square(double kappa, int n) {
    return {LatticeKind::square, Vec2(kappa, 0.0), Vec2(0.0, kappa), n};
  }
  static LatticeSpec make_rectangle(double kappa, double ell, int n) {
    return {LatticeKind::rectangle, Vec2(kappa, 0.0), Vec2(0.0, ell), n};
  }
  static LatticeSpec make_hexagonal(double kappa, int n) {
    return {LatticeKind::hexagonal, Vec2(kappa, 0.0),
            Vec2(-0.5 * kappa, 0.5 * std::sqrt(3.0) * kappa), n};
  }
  static LatticeSpec make_rhombic(double kappa, double ell_y, int n) {
    return {LatticeKind::rhombic, Vec2(kappa, 0.0), Vec2(-0.5 * kappa, ell_y), n};
  }
  // domain scaling form: y-extent 4pi/(sqrt(3) ell) with ell = kc + lt
  static LatticeSpec make_quasihex(double kappa, double ell, int n) {
    return {LatticeKind::quasihexagonal, Vec2(kappa, 0.0),
            Vec2(-0.5 * kappa, 0.5 * std::sqrt(3.0) * ell), n};
  }
  // oblique wavevector placed exactly on the critical circle
  static LatticeSpec make_quasihex_circle(double kappa, double kc, int n) {
    const double rad = kc * kc - 0.25 * kappa * kappa;
    return {LatticeKind::quasihexagonal, Vec2(kappa, 0.0),
            Vec2(-0.5 * kappa, std::sqrt(std::max(0.0, rad))), n};
  }
};

struct SpectrumResult {
  std::vector<Complex> eigenvalues;
  std::vector<Complex> critical_set;  // the 2j eigenvalues nearest 0
  Complex translation_eigenvalue = 0.0;
  double translation_eigenvalue_abs = 0.0;
  double max_real_excluding_translation = 0.0;
};

namespace detail {

// One transverse slice n2 of the lattice linearisation. Because the stripe
// only carries wavevectors j*K1, the full operator is block diagonal over n2;
// slice -n2 is the complex conjugate of slice n2 after n1 -> -n1.
inline Eigen::MatrixXcd slice_matrix(const SystemSpec& sys, const StripeSolution& stripe,
                                     const LatticeSpec& lat, double alpha_check, double beta,
                                     int n2, const std::vector<Mat2c>& kernels) {
  const int Nl = lat.N_lat;
  const int dim = 2 * (2 * Nl + 1);
  const int jmax = (static_cast<int>(kernels.size()) - 1) / 2;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  const Mat2 D = sys.D();
  const Mat2 Bc = sys.B(stripe.c_num);
  for (int i1 = 0; i1 <= 2 * Nl; ++i1) {
    const int n1 = i1 - Nl;
    const Vec2 m = n1 * lat.K1 + n2 * lat.K2;
    Mat2c sym = (-m.squaredNorm() * D + sys.L + alpha_check * sys.M).cast<Complex>();
    sym += Complex(0.0, 1.0) * beta * m(0) * Bc.cast<Complex>();
    M.block<2, 2>(2 * i1, 2 * i1) += sym;
    for (int i2 = 0; i2 <= 2 * Nl; ++i2) {
      const int j = n1 - (i2 - Nl);
      if (j < -jmax || j > jmax) continue;
      M.block<2, 2>(2 * i1, 2 * i2) += kernels[j + jmax];
    }
  }
  return M;
}

inline std::vector<Complex> eig_all(const Eigen::MatrixXcd& M) {
  // real matrices (beta = 0 scans) go through the much faster real Schur path
  if (M.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M.real(), /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw EigensolveFailure();
    return {es.eigenvalues().data(), es.eigenvalues().data() + M.rows()};
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw EigensolveFailure();
  return {es.eigenvalues().data(), es.eigenvalues().data() + M.rows()};
}

}  // namespace detail

// Galerkin projection of the linearisation about the stripe onto the lattice
// modes n1 K1 + n2 K2, |n1|,|n2| <= N_lat; dense eigensolve per slice.
inline SpectrumResult lattice_linearization(const SystemSpec& sys, const StripeSolution& stripe,
                                            const LatticeSpec& lat, double alpha_check,
                                            double beta) {
  SpectrumResult res;
  const auto kernels = detail::linearization_kernels(sys, stripe.coeff,
                                                     std::min(2 * lat.N_lat, 2 * stripe.N));
  std::vector<Complex> zero_slice;
  for (int n2 = 0; n2 <= lat.N_lat; ++n2) {
    auto evs = detail::eig_all(detail::slice_matrix(sys, stripe, lat, alpha_check, beta, n2, kernels));
    if (n2 == 0) zero_slice = evs;
    for (const Complex& ev : evs) {
      res.eigenvalues.push_back(ev);
      if (n2 > 0) res.eigenvalues.push_back(std::conj(ev));
    }
  }
  // translation mode lives in the n2 = 0 slice
  res.translation_eigenvalue =
      *std::min_element(zero_slice.begin(), zero_slice.end(),
                        [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  res.translation_eigenvalue_abs = std::abs(res.translation_eigenvalue);
  std::vector<Complex> sorted = res.eigenvalues;
  std::sort(sorted.begin(), sorted.end(),
            [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  const int jcrit = 2 * lat.critical_count() / 2;
  res.critical_set.assign(sorted.begin(),
                          sorted.begin() + std::min<std::size_t>(jcrit, sorted.size()));
  double mx = -std::numeric_limits<double>::infinity();
  for (const Complex& ev : res.eigenvalues)
    if (std::abs(ev - res.translation_eigenvalue) > 1e-7) mx = std::max(mx, ev.real());
  res.max_real_excluding_translation = mx;
  return res;
}

// Bloch operator in x with Floquet exponent gamma (modes (n+gamma)*kappa) and
// transverse wavenumber ell.
inline std::vector<Complex> bloch_spectrum(const SystemSpec& sys, const StripeSolution& stripe,
                                           double gamma, double ell, double alpha_check,
                                           double beta, int N_b) {
  const int dim = 2 * (2 * N_b + 1);
  const auto kernels = detail::linearization_kernels(sys, stripe.coeff,
                                                     std::min(2 * N_b, 2 * stripe.N));
  const int jmax = (static_cast<int>(kernels.size()) - 1) / 2;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  const Mat2 D = sys.D();
  const Mat2 Bc = sys.B(stripe.c_num);
  for (int i1 = 0; i1 <= 2 * N_b; ++i1) {
    const double k = (i1 - N_b + gamma) * stripe.kappa;
    Mat2c sym = (-(k * k + ell * ell) * D + sys.L + alpha_check * sys.M).cast<Complex>();
    sym += Complex(0.0, 1.0) * beta * k * Bc.cast<Complex>();
    M.block<2, 2>(2 * i1, 2 * i1) += sym;
    for (int i2 = 0; i2 <= 2 * N_b; ++i2) {
      const int j = (i1 - N_b) - (i2 - N_b);
      if (j < -jmax || j > jmax) continue;
      M.block<2, 2>(2 * i1, 2 * i2) += kernels[j + jmax];
    }
  }
  return detail::eig_all(M);
}

// Curvature of the critical branch through the origin along a 1-parameter
// family; branch tracked by nearest continuation from lambda = 0, curvature
// Richardson-extrapolated from steps h and h/2.
inline double critical_branch_curvature(const std::function<std::vector<Complex>(double)>& evs_at,
                                        double h) {
  Complex prev(0.0, 0.0);
  auto track = [&](double s) {
    auto evs = evs_at(s);
    Complex best = evs.front();
    for (const Complex& ev : evs)
      if (std::abs(ev - prev) < std::abs(best - prev)) best = ev;
    prev = best;
    return best;
  };
  const double f0 = track(0.0).real();
  const double fh2 = track(0.5 * h).real();
  const double fh = track(h).real();
  const double c_h = (fh - f0) / (h * h);
  const double c_h2 = (fh2 - f0) / (0.25 * h * h);
  return (4.0 * c_h2 - c_h) / 3.0;
}

}  // namespace stripes::oracle
