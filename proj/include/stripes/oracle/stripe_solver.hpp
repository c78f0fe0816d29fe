#pragma once

#include <vector>

#include "stripes/coefficients.hpp"

namespace stripes::oracle {

// Converged 1D stripe in the comoving frame on the rescaled period [0,2pi].
// Modes are stored for n = 0..N; negative modes are the conjugates, so the
// profile is real by construction. Phase gauge: Im u_hat[1](0) = 0.
struct StripeSolution {
  int N = 0;
  double kappa = 0.0;
  double c_num = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  double last_contraction = 0.0;
  std::vector<Vec2c> coeff;  // size N+1

  Vec2c mode(int n) const {
    const int a = n < 0 ? -n : n;
    if (a >= static_cast<int>(coeff.size())) return Vec2c::Zero();
    return n < 0 ? coeff[a].conjugate() : coeff[a];
  }
  double amplitude() const { return coeff.size() > 1 ? coeff[1].norm() : 0.0; }
  double sup_norm_estimate() const {
    double s = coeff.empty() ? 0.0 : coeff[0].norm();
    for (std::size_t n = 1; n < coeff.size(); ++n) s += 2.0 * coeff[n].norm();
    return s;
  }
};

enum class StripeStatus { converged, trivial };

struct StripeOutcome {
  StripeStatus status = StripeStatus::trivial;
  StripeSolution solution;
  bool is_stripe() const { return status == StripeStatus::converged; }
};

namespace detail {

// pair kernels M_j = sum_{p+q=j} K[u_p, u_q, .], |j| <= jmax
inline std::vector<Mat2c> cubic_pair_kernels(const SystemSpec& sys,
                                             const std::vector<Vec2c>& coeff, int jmax) {
  const int N = static_cast<int>(coeff.size()) - 1;
  auto mode = [&](int n) -> Vec2c {
    const int a = n < 0 ? -n : n;
    if (a > N) return Vec2c::Zero();
    return n < 0 ? coeff[a].conjugate() : coeff[a];
  };
  std::vector<Mat2c> M(2 * jmax + 1, Mat2c::Zero());
  for (int p = -N; p <= N; ++p) {
    const Vec2c up = mode(p);
    if (up.isZero(0.0)) continue;
    for (int q = std::max(-N, -jmax - p); q <= std::min(N, jmax - p); ++q) {
      const int j = p + q;
      M[j + jmax] += sys.K.as_operator(up, mode(q));
    }
  }
  return M;
}

// linearisation kernels C_j = 2 Q[u_j, .] + 3 M_j
inline std::vector<Mat2c> linearization_kernels(const SystemSpec& sys,
                                                const std::vector<Vec2c>& coeff, int jmax) {
  std::vector<Mat2c> C = cubic_pair_kernels(sys, coeff, jmax);
  const int N = static_cast<int>(coeff.size()) - 1;
  for (int j = -jmax; j <= jmax; ++j) {
    C[j + jmax] *= 3.0;
    const int a = j < 0 ? -j : j;
    if (a <= N) {
      const Vec2c uj = j < 0 ? coeff[a].conjugate().eval() : coeff[a];
      C[j + jmax] += 2.0 * sys.Q.as_operator(uj);
    }
  }
  return C;
}

}  // namespace detail

class StripeProblem {
 public:
  StripeProblem(const SystemSpec& sys, double alpha_check, double beta, double kappa, int N)
      : sys_(sys), alpha_check_(alpha_check), beta_(beta), kappa_(kappa), N_(N),
        solve_c_(beta != 0.0) {}

  Mat2c symbol(int n, double c) const {
    const double k = n * kappa_;
    Mat2c m = (-k * k * sys_.D() + sys_.L + alpha_check_ * sys_.M).cast<Complex>();
    m += Complex(0.0, 1.0) * beta_ * k * sys_.B(c).cast<Complex>();
    return m;
  }

  // residual modes 0..N of kappa^2 D u'' + beta kappa B(c) u' + L u + ac M u + Q + K
  std::vector<Vec2c> residual(const std::vector<Vec2c>& u, double c) const {
    auto mode = [&](int n) -> Vec2c {
      const int a = n < 0 ? -n : n;
      if (a > N_) return Vec2c::Zero();
      return n < 0 ? u[a].conjugate() : u[a];
    };
    std::vector<Vec2c> r(N_ + 1, Vec2c::Zero());
    for (int n = 0; n <= N_; ++n) r[n] = symbol(n, c) * u[n];
    // quadratic convolution
    for (int p = -N_; p <= N_; ++p) {
      const Vec2c up = mode(p);
      if (up.isZero(0.0)) continue;
      for (int q = std::max(-N_, -p); q <= std::min(N_, N_ - p); ++q)
        r[p + q] += sys_.Q(up, mode(q));
    }
    // cubic via pair kernels
    const auto M = detail::cubic_pair_kernels(sys_, u, 2 * N_);
    for (int s = -2 * N_; s <= 2 * N_; ++s) {
      if (M[s + 2 * N_].isZero(0.0)) continue;
      for (int rdx = std::max(-N_, -s); rdx <= std::min(N_, N_ - s); ++rdx)
        r[s + rdx] += M[s + 2 * N_] * mode(rdx);
    }
    return r;
  }

  int unknown_count() const { return 2 + 4 * N_ + (solve_c_ ? 1 : 0); }
  int equation_count() const { return 2 + 4 * N_ + 1; }  // + phase gauge

  void pack(const std::vector<Vec2c>& u, double c, Eigen::VectorXd& x) const {
    x.resize(unknown_count());
    x(0) = u[0](0).real();
    x(1) = u[0](1).real();
    for (int n = 1; n <= N_; ++n) {
      x(4 * n - 2) = u[n](0).real();
      x(4 * n - 1) = u[n](0).imag();
      x(4 * n + 0) = u[n](1).real();
      x(4 * n + 1) = u[n](1).imag();
    }
    if (solve_c_) x(unknown_count() - 1) = c;
  }

  void unpack(const Eigen::VectorXd& x, std::vector<Vec2c>& u, double& c, double c_fixed) const {
    u.assign(N_ + 1, Vec2c::Zero());
    u[0] = Vec2c(Complex(x(0), 0.0), Complex(x(1), 0.0));
    for (int n = 1; n <= N_; ++n)
      u[n] = Vec2c(Complex(x(4 * n - 2), x(4 * n - 1)), Complex(x(4 * n), x(4 * n + 1)));
    c = solve_c_ ? x(unknown_count() - 1) : c_fixed;
  }

  Eigen::VectorXd pack_equations(const std::vector<Vec2c>& r, const std::vector<Vec2c>& u) const {
    Eigen::VectorXd out(equation_count());
    out(0) = r[0](0).real();
    out(1) = r[0](1).real();
    for (int n = 1; n <= N_; ++n) {
      out(4 * n - 2) = r[n](0).real();
      out(4 * n - 1) = r[n](0).imag();
      out(4 * n + 0) = r[n](1).real();
      out(4 * n + 1) = r[n](1).imag();
    }
    out(equation_count() - 1) = u[1](0).imag();  // phase gauge
    return out;
  }

  // directional derivative of the residual at (u, c) along a reality-preserving
  // perturbation field dv (dv_{-n} = conj(dv_n)) and velocity perturbation dc
  std::vector<Vec2c> apply_linearized(const std::vector<Vec2c>& u, double c,
                                      const std::vector<Vec2c>& dv, double dc,
                                      const std::vector<Mat2c>& kernels) const {
    auto mode = [&](const std::vector<Vec2c>& f, int n) -> Vec2c {
      const int a = n < 0 ? -n : n;
      if (a > N_) return Vec2c::Zero();
      return n < 0 ? f[a].conjugate() : f[a];
    };
    std::vector<Vec2c> r(N_ + 1, Vec2c::Zero());
    const int jmax = 2 * N_;
    for (int n = 0; n <= N_; ++n) {
      r[n] = symbol(n, c) * dv[n];
      if (solve_c_ && dc != 0.0)
        r[n] += Complex(0.0, 1.0) * beta_ * (n * kappa_) * dc * u[n];
      for (int s = std::max(-jmax, n - N_); s <= std::min(jmax, n + N_); ++s)
        r[n] += kernels[s + jmax] * mode(dv, n - s);
    }
    return r;
  }

  // Full real Jacobian. A unit perturbation of mode m only reaches residual
  // mode n through kernels[n-m] (and kernels[n+m] via the conjugate mode), so
  // assembly is O(N) per column.
  Eigen::MatrixXd assemble_jacobian(const std::vector<Vec2c>& u, double c,
                                    const std::vector<Mat2c>& kernels) const {
    const int n_eq = equation_count(), n_un = unknown_count();
    const int jmax = (static_cast<int>(kernels.size()) - 1) / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_eq, n_un);
    auto kern = [&](int j) -> Mat2c {
      return (j < -jmax || j > jmax) ? Mat2c::Zero() : kernels[j + jmax];
    };
    auto put = [&](int n, int col, const Vec2c& val) {
      if (n == 0) {  // only real rows for mode 0
        J(0, col) += val(0).real();
        J(1, col) += val(1).real();
      } else {
        J(4 * n - 2, col) += val(0).real();
        J(4 * n - 1, col) += val(0).imag();
        J(4 * n + 0, col) += val(1).real();
        J(4 * n + 1, col) += val(1).imag();
      }
    };
    for (int m = 0; m <= N_; ++m) {
      for (int comp = 0; comp < 2; ++comp) {
        Vec2c e = Vec2c::Zero();
        e(comp) = 1.0;
        for (int n = 0; n <= N_; ++n) {
          Vec2c T = kern(n - m) * e;
          if (n == m) T += symbol(n, c) * e;
          const Vec2c S = m > 0 ? Vec2c(kern(n + m) * e) : Vec2c::Zero();
          if (m == 0) {
            put(n, comp, T);
          } else {
            const int col_re = 4 * m - 2 + 2 * comp;
            put(n, col_re, T + S);
            put(n, col_re + 1, Complex(0.0, 1.0) * (T - S));
          }
        }
      }
    }
    if (solve_c_) {
      const int col = n_un - 1;
      for (int n = 0; n <= N_; ++n)
        put(n, col, Vec2c(Complex(0.0, 1.0) * beta_ * (n * kappa_) * u[n]));
    }
    J(n_eq - 1, 4 * 1 - 1) = 1.0;  // phase gauge d(Im u_1(0))
    return J;
  }

  bool solve_c() const { return solve_c_; }
  int N() const { return N_; }
  double kappa() const { return kappa_; }

  const SystemSpec& sys_;
  double alpha_check_, beta_, kappa_;
  int N_;
  bool solve_c_;
};

struct NewtonOptions {
  double tol = 1e-12;
  double tol_accept = 1e-10;
  int max_iterations = 30;
  double trivial_norm = 1e-8;  // converged solutions below this count as the zero state
};

// Newton iteration on the Fourier coefficients (and c when beta != 0, with the
// phase gauge closing the system; at beta = 0 the gauge is kept and c dropped,
// the extra equation being matched by restriction to even profiles through the
// least-squares step, which is exact on that subspace).
inline StripeOutcome newton_solve(const StripeProblem& prob, std::vector<Vec2c> u, double c,
                                  const NewtonOptions& opt = {}) {
  const int n_eq = prob.equation_count();
  const int n_un = prob.unknown_count();
  Eigen::VectorXd x;
  prob.pack(u, c, x);
  const double c_fixed = c;
  double res_prev = -1.0, contraction = 0.0;
  int it = 0;
  auto eval = [&](const Eigen::VectorXd& xv, std::vector<Vec2c>& uu, double& cc) {
    prob.unpack(xv, uu, cc, c_fixed);
    return prob.pack_equations(prob.residual(uu, cc), uu);
  };
  std::vector<Vec2c> uu;
  double cc = c;
  Eigen::VectorXd r = eval(x, uu, cc);
  for (it = 0; it < opt.max_iterations; ++it) {
    const double rn = r.norm();
    if (rn < opt.tol) break;
    const auto kernels = detail::linearization_kernels(prob.sys_, uu, 2 * prob.N());
    Eigen::MatrixXd J = prob.assemble_jacobian(uu, cc, kernels);
    Eigen::VectorXd dx;
    if (n_eq == n_un) {
      dx = J.partialPivLu().solve(r);
    } else {
      dx = J.colPivHouseholderQr().solve(r);
    }
    // damped update: halve until the residual does not grow
    double step = 1.0;
    Eigen::VectorXd x_new;
    Eigen::VectorXd r_new;
    for (int tries = 0; tries < 6; ++tries) {
      x_new = x - step * dx;
      r_new = eval(x_new, uu, cc);
      if (r_new.norm() <= rn || tries == 5) break;
      step *= 0.5;
    }
    contraction = rn > 0.0 ? r_new.norm() / rn : 0.0;
    x = x_new;
    r = r_new;
    res_prev = rn;
    (void)res_prev;
  }
  const double rn = r.norm();
  if (rn > opt.tol_accept) throw NewtonDiverged(it, rn);
  prob.unpack(x, uu, cc, c_fixed);
  StripeOutcome out;
  double sol_norm = 0.0;
  for (const auto& v : uu) sol_norm += v.squaredNorm();
  sol_norm = std::sqrt(sol_norm);
  out.status = sol_norm < opt.trivial_norm ? StripeStatus::trivial : StripeStatus::converged;
  out.solution.N = prob.N();
  out.solution.kappa = prob.kappa();
  out.solution.c_num = cc;
  out.solution.residual_norm = rn;
  out.solution.iterations = it;
  out.solution.last_contraction = contraction;
  out.solution.coeff = std::move(uu);
  return out;
}

// leading-order initial guess from the analytic stripe expansion
inline std::pair<std::vector<Vec2c>, double> analytic_stripe_guess(
    const SystemSpec& sys, const TuringData& t, const CoefficientSet& cs, double alpha_check,
    double beta, double kappa, int N) {
  const Unfolding mu{t.lambda_M * alpha_check, beta, kappa - t.kc};
  auto A_opt = stripe_amplitude(t, cs, mu);
  const double A = A_opt ? *A_opt : 0.0;
  std::vector<Vec2c> u(N + 1, Vec2c::Zero());
  const double ac = alpha_check;
  if (A > 0.0) {
    u[0] = (A * A * cs.Q0).cast<Complex>();
    u[1] = (t.E0 + ac * cs.w_Aalpha + mu.kappa_tilde * cs.w_Akappa +
            mu.beta * mu.beta * cs.w_Abetabeta).cast<Complex>();
    u[1] += Complex(0.0, 1.0) * mu.beta * cs.w_Abeta.cast<Complex>();
    u[1] *= A;
    if (N >= 2) u[2] = (0.5 * A * A * cs.Q2).cast<Complex>();
  }
  return {u, cs.c};
}

inline StripeOutcome solve_stripe_1d(const SystemSpec& sys, const TuringData& t,
                                     const CoefficientSet& cs, double alpha_check, double beta,
                                     double kappa, int N, const NewtonOptions& opt = {}) {
  StripeProblem prob(sys, alpha_check, beta, kappa, N);
  auto [u, c] = analytic_stripe_guess(sys, t, cs, alpha_check, beta, kappa, N);
  return newton_solve(prob, std::move(u), c, opt);
}

// warm-started variant for continuation; the previous solution is truncated or
// zero-padded to the requested N
inline StripeOutcome solve_stripe_1d_from(const SystemSpec& sys, double alpha_check, double beta,
                                          double kappa, int N, const StripeSolution& prev,
                                          const NewtonOptions& opt = {}) {
  StripeProblem prob(sys, alpha_check, beta, kappa, N);
  std::vector<Vec2c> u(N + 1, Vec2c::Zero());
  for (int n = 0; n <= N; ++n) u[n] = prev.mode(n);
  return newton_solve(prob, std::move(u), prev.c_num, opt);
}

// At beta = 0 the converged profile is even and real up to solver tolerance;
// dropping the stray imaginary parts (all below tol_accept) makes the
// downstream lattice matrices exactly real, which selects the fast real-Schur
// eigensolver path.
inline void force_real_profile(StripeSolution& sol) {
  for (auto& v : sol.coeff) v = v.real().cast<Complex>();
}

// drift of the first Fourier mode when N doubles; the caller decides whether
// to treat a large drift as TruncationInsufficient
inline double truncation_drift(const SystemSpec& sys, double alpha_check, double beta,
                               const StripeSolution& sol, const NewtonOptions& opt = {}) {
  StripeOutcome fine = solve_stripe_1d_from(sys, alpha_check, beta, sol.kappa, 2 * sol.N, sol, opt);
  if (!fine.is_stripe()) return sol.amplitude();
  return (fine.solution.coeff[1] - sol.coeff[1]).norm();
}

}  // namespace stripes::oracle
