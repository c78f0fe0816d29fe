#include <catch2/catch_amalgamated.hpp>

#include "stripes/coefficients.hpp"

using namespace stripes;

namespace {
const SystemSpec kExample = designed_example(0.4);
const TuringData kT = linear_coeffs(kExample);
const CoefficientSet kC = compute_coefficients(kExample, kT);
}

TEST_CASE("reduced inverse solves on the range with the kernel gauge") {
  const Mat2 S = -kT.kc * kT.kc * kExample.D() + kExample.L;
  SECTION("zero rhs gives zero") {
    const Vec2 w = reduced_inverse(S, Vec2::Zero(), kT.E0, kT.E0_star);
    REQUIRE(w.norm() == 0.0);
  }
  SECTION("projected quadratic rhs reproduces -Q1") {
    const Vec2 QEE = kExample.Q(kT.E0, kT.E0);
    const Vec2 rhs = QEE - inner(QEE, kT.E0_star) * kT.E0;  // range projection
    const Vec2 w = reduced_inverse(S, rhs, kT.E0, kT.E0_star);
    REQUIRE((w + kC.Q1).norm() < 1e-12);
    REQUIRE((S * w - rhs).norm() < 1e-12);
    REQUIRE(std::abs(inner(w, kT.E0_star)) < 1e-12);
  }
  SECTION("rhs off the range is rejected") {
    REQUIRE_THROWS_AS(reduced_inverse(S, kT.E0, kT.E0, kT.E0_star), RhsNotInRange);
  }
}

TEST_CASE("raw triad contraction of the designed example") {
  // <Q[E0,E0],E0*> = -(12/(5 sqrt 5))) * 0.4
  const double expected = -12.0 / (5.0 * std::sqrt(5.0)) * 0.4;
  REQUIRE(kC.q_raw == Catch::Approx(expected).epsilon(1e-13));
}

TEST_CASE("cubic contraction k0 is exactly -1.28") {
  REQUIRE(kC.k0 == Catch::Approx(-32.0 / 25.0).margin(1e-12));
}

TEST_CASE("supercriticality holds at eps=0.4 and fails for large quadratic strength") {
  REQUIRE(kC.rho_nl < 0.0);
  const SystemSpec big = designed_example(2.0);
  const TuringData t = linear_coeffs(big);
  REQUIRE_THROWS_AS(compute_coefficients(big, t), SupercriticalityViolated);
}

TEST_CASE("zero quadratic form kills all quadratic scalars") {
  const SystemSpec s = designed_example(0.0);
  const CoefficientSet c = compute_coefficients(s, kT);
  REQUIRE(c.q_raw == 0.0);
  REQUIRE(c.q0 == 0.0);
  REQUIRE(c.q2 == 0.0);
  REQUIRE(c.q1 == 0.0);
  REQUIRE(c.q11 == 0.0);
  REQUIRE(c.Q0.norm() == 0.0);
  REQUIRE(c.Q1.norm() == 0.0);
  REQUIRE(c.rho_nl == Catch::Approx(3.0 * c.k0).epsilon(1e-14));
}

TEST_CASE("response-vector route reproduces rho_beta and rho_kappa") {
  REQUIRE(rho_beta_alt(kExample, kT, kC) == Catch::Approx(kT.rho_beta).margin(1e-10));
  REQUIRE(rho_kappa_alt(kExample, kT, kC) == Catch::Approx(kT.rho_kappa).margin(1e-10));
  REQUIRE(rho_beta_alt(kExample, kT, kC) == Catch::Approx(0.112).margin(1e-10));
  REQUIRE(rho_kappa_alt(kExample, kT, kC) == Catch::Approx(-2.8).margin(1e-10));
}

TEST_CASE("identity unfolding has zero alpha response vector") {
  SystemSpec s = kExample;
  s.M = Mat2::Identity();
  const TuringData t = linear_coeffs(s);
  const CoefficientSet c = compute_coefficients(s, t);
  REQUIRE(c.w_Aalpha.norm() < 1e-14);
}

TEST_CASE("Q1 is orthogonal to the adjoint kernel") {
  REQUIRE(std::abs(inner(kC.Q1, kT.E0_star)) < 1e-12);
}

TEST_CASE("gauge flip of the kernel pair") {
  // all scalars invariant except q_raw, which is odd in E0
  TuringData t2 = kT;
  t2.E0 = -kT.E0;
  t2.E0_star = -kT.E0_star;
  const CoefficientSet c2 = compute_coefficients(kExample, t2);
  REQUIRE(c2.q_raw == Catch::Approx(-kC.q_raw).epsilon(1e-13));
  REQUIRE(c2.q0 == Catch::Approx(kC.q0).epsilon(1e-13));
  REQUIRE(c2.q2 == Catch::Approx(kC.q2).epsilon(1e-13));
  REQUIRE(c2.q1 == Catch::Approx(kC.q1).epsilon(1e-13));
  REQUIRE(c2.q11 == Catch::Approx(kC.q11).epsilon(1e-13));
  REQUIRE(c2.k0 == Catch::Approx(kC.k0).epsilon(1e-13));
  REQUIRE(c2.rho_nl == Catch::Approx(kC.rho_nl).epsilon(1e-13));
  // p flips with q, so the block off-diagonal modulus is gauge invariant
  const Complex p1 = p_hex(kExample, kT, kC, 0.7, 0.3);
  const Complex p2 = p_hex(kExample, t2, c2, 0.7, 0.3);
  REQUIRE(std::abs(p2 + p1) < 1e-13);
  const Complex b1 = 2.0 * kC.q_raw + p1;
  const Complex b2 = 2.0 * c2.q_raw + p2;
  REQUIRE(std::abs(std::abs(b1) - std::abs(b2)) < 1e-13);
}

TEST_CASE("quadratic scaling hypothesis: q ~ eps, bilinear scalars ~ eps^2, k0 fixed") {
  const SystemSpec half = kExample.with_quadratic_scaled(0.5);
  const CoefficientSet c = compute_coefficients(half, kT);
  REQUIRE(c.q_raw == Catch::Approx(0.5 * kC.q_raw).epsilon(1e-13));
  REQUIRE(c.q0 == Catch::Approx(0.25 * kC.q0).epsilon(1e-13));
  REQUIRE(c.q2 == Catch::Approx(0.25 * kC.q2).epsilon(1e-13));
  REQUIRE(c.q1 == Catch::Approx(0.25 * kC.q1).epsilon(1e-13));
  REQUIRE(c.q11 == Catch::Approx(0.25 * kC.q11).epsilon(1e-13));
  REQUIRE(c.k0 == Catch::Approx(kC.k0).epsilon(1e-14));
}

TEST_CASE("stripe amplitude and velocity") {
  SECTION("on the bifurcation surface the amplitude vanishes") {
    const double beta = 0.3, kt = 0.05;
    const double alpha = -(kT.rho_kappa * kt * kt + kT.rho_beta * beta * beta);
    const auto A = stripe_amplitude(kT, kC, {alpha, beta, kt});
    REQUIRE(A.has_value());
    REQUIRE(*A == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("above onset the published-shape amplitude comes out") {
    const auto A = stripe_amplitude(kT, kC, {0.01, 0.0, 0.0});
    REQUIRE(A.has_value());
    REQUIRE(*A == Catch::Approx(std::sqrt(0.01 / -kC.rho_nl)).epsilon(1e-13));
  }
  SECTION("below the surface there is no stripe") {
    REQUIRE_FALSE(stripe_amplitude(kT, kC, {-0.01, 0.0, 0.0}).has_value());
  }
  REQUIRE(stripe_velocity(kC) == Catch::Approx(-1.4).epsilon(1e-14));
}

TEST_CASE("velocity is minus the advection projection") {
  // c = -lambda_beta with lambda_beta = b4/(b1+b4); a vanishing numerator
  // would give a resting stripe, but b1 b4 = a2 a3 < 0 at any valid Turing
  // point, so b4 = 0 cannot occur for accepted systems. Check both facts.
  const double b1 = kExample.L(0, 0) - kT.kc * kT.kc * kExample.d1;
  const double b4 = kExample.L(1, 1) - kT.kc * kT.kc * kExample.d2;
  REQUIRE(b1 * b4 < 0.0);
  REQUIRE(kT.lambda_beta == Catch::Approx(b4 / (b1 + b4)).epsilon(1e-14));
  REQUIRE(kC.c == Catch::Approx(-kT.lambda_beta).epsilon(1e-14));
  // formula arithmetic: zero numerator means zero velocity
  REQUIRE(0.0 / (b1 + 0.0) == 0.0);
}

TEST_CASE("stripe profile structure") {
  const Unfolding mu{0.01, 0.1, 0.02};
  const auto A = stripe_amplitude(kT, kC, mu);
  REQUIRE(A.has_value());
  std::vector<double> grid;
  const int n = 64;
  for (int i = 0; i < n; ++i) grid.push_back(2.0 * M_PI * i / n);
  const auto prof = stripe_profile(kT, kC, *A, mu, grid);
  SECTION("zero amplitude gives the zero profile") {
    const auto zero = stripe_profile(kT, kC, 0.0, mu, grid);
    for (const auto& v : zero) REQUIRE(v.norm() == 0.0);
  }
  SECTION("mean over one period is A^2 Q0") {
    Vec2 mean = Vec2::Zero();
    for (const auto& v : prof) mean += v;
    mean /= double(n);
    REQUIRE((mean - (*A) * (*A) * kC.Q0).norm() < 1e-13);
  }
}

TEST_CASE("p_hex structure") {
  REQUIRE(std::abs(p_hex(kExample, kT, kC, 0.0, 0.0)) == 0.0);
  SECTION("vanishes identically without a quadratic term") {
    const SystemSpec s = designed_example(0.0);
    const CoefficientSet c = compute_coefficients(s, kT);
    REQUIRE(std::abs(p_hex(s, kT, c, 1.0, 0.7)) == 0.0);
  }
  SECTION("real part rides on kappa', imaginary on beta'") {
    const Complex pk = p_hex(kExample, kT, kC, 0.0, 1.0);
    REQUIRE(pk.imag() == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(pk.real() != 0.0);
    const Complex pb = p_hex(kExample, kT, kC, 1.0, 0.0);
    REQUIRE(pb.real() == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(pb.imag() != 0.0);
  }
  SECTION("linearity in (beta', kappa')") {
    const Complex p1 = p_hex(kExample, kT, kC, 0.4, -0.2);
    const Complex p2 = 0.4 * p_hex(kExample, kT, kC, 1.0, 0.0) -
                       0.2 * p_hex(kExample, kT, kC, 0.0, 1.0);
    REQUIRE(std::abs(p1 - p2) < 1e-14);
  }
}

TEST_CASE("p_quasihex reduces to p_hex at ell' = kappa'") {
  const double bp = 0.6, kp = 0.35;
  const Complex ph = p_hex(kExample, kT, kC, bp, kp);
  const Complex pq = p_quasihex(kExample, kT, kC, bp, kp, kp);
  REQUIRE(std::abs(ph - pq) < 1e-14);
  REQUIRE(std::abs(p_quasihex(kExample, kT, kC, 0.0, 0.0, 0.0)) == 0.0);
  // most unstable detuning evaluates without issue
  const Complex p3 = p_quasihex(kExample, kT, kC, 0.0, 1.0, -1.0 / 3.0);
  REQUIRE(std::isfinite(p3.real()));
  REQUIRE(p3.imag() == Catch::Approx(0.0).margin(1e-14));
}
