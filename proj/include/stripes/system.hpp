#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "stripes/common.hpp"

namespace stripes {

// Symmetric bilinear map R^2 x R^2 -> R^2; per component the polynomial
// qu2*u1*u2 + quv*(u1*v2 + u2*v1)/2 + qv2*v1*v2. Storing the polynomial
// coefficients keeps the form symmetric by construction.
struct QuadForm {
  std::array<std::array<double, 3>, 2> c{};  // per component: {u^2, u v, v^2}

  template <typename V>
  V eval(const V& a, const V& b) const {
    V out;
    for (int i = 0; i < 2; ++i) {
      out(i) = c[i][0] * a(0) * b(0) + 0.5 * c[i][1] * (a(0) * b(1) + a(1) * b(0)) +
               c[i][2] * a(1) * b(1);
    }
    return out;
  }
  Vec2 operator()(const Vec2& a, const Vec2& b) const { return eval(a, b); }
  Vec2c operator()(const Vec2c& a, const Vec2c& b) const { return eval(a, b); }

  // matrix v -> Q[a, v] (complex a appears in the stripe convolutions)
  Mat2c as_operator(const Vec2c& a) const {
    Mat2c m;
    for (int i = 0; i < 2; ++i) {
      m(i, 0) = c[i][0] * a(0) + 0.5 * c[i][1] * a(1);
      m(i, 1) = 0.5 * c[i][1] * a(0) + c[i][2] * a(1);
    }
    return m;
  }

  QuadForm scaled(double f) const {
    QuadForm q = *this;
    for (auto& row : q.c)
      for (auto& v : row) v *= f;
    return q;
  }
  bool is_zero() const {
    for (const auto& row : c)
      for (double v : row)
        if (v != 0.0) return false;
    return true;
  }
  static QuadForm from_matrices(const Mat2& q1, const Mat2& q2) {
    QuadForm q;
    const Mat2* m[2] = {&q1, &q2};
    for (int i = 0; i < 2; ++i) {
      q.c[i][0] = (*m[i])(0, 0);
      q.c[i][1] = (*m[i])(0, 1) + (*m[i])(1, 0);  // symmetrisation
      q.c[i][2] = (*m[i])(1, 1);
    }
    return q;
  }
};

// Symmetric trilinear map; per component the cubic polynomial
// cuuu*u^3 + cuuv*u^2 v + cuvv*u v^2 + cvvv*v^3, contracted through the
// unique symmetric polarisation.
struct CubicForm {
  std::array<std::array<double, 4>, 2> c{};  // per component: {u^3, u^2 v, u v^2, v^3}

  // e.g. the u v^2 term contributes (a0 b1 d1 + a1 b0 d1 + a1 b1 d0)/3
  template <typename V>
  V eval(const V& a, const V& b, const V& d) const {
    V out;
    for (int i = 0; i < 2; ++i) {
      out(i) = c[i][0] * a(0) * b(0) * d(0) +
               c[i][1] * (a(0) * b(0) * d(1) + a(0) * b(1) * d(0) + a(1) * b(0) * d(0)) / 3.0 +
               c[i][2] * (a(0) * b(1) * d(1) + a(1) * b(0) * d(1) + a(1) * b(1) * d(0)) / 3.0 +
               c[i][3] * a(1) * b(1) * d(1);
    }
    return out;
  }
  Vec2 operator()(const Vec2& a, const Vec2& b, const Vec2& d) const { return eval(a, b, d); }
  Vec2c operator()(const Vec2c& a, const Vec2c& b, const Vec2c& d) const { return eval(a, b, d); }

  // matrix v -> K[a, b, v]
  Mat2c as_operator(const Vec2c& a, const Vec2c& b) const {
    Mat2c m;
    for (int i = 0; i < 2; ++i) {
      const Complex uu = a(0) * b(0);
      const Complex uv = a(0) * b(1) + a(1) * b(0);
      const Complex vv = a(1) * b(1);
      m(i, 0) = c[i][0] * uu + (c[i][1] / 3.0) * uv + (c[i][2] / 3.0) * vv;
      m(i, 1) = (c[i][1] / 3.0) * uu + (c[i][2] / 3.0) * uv + c[i][3] * vv;
    }
    return m;
  }

  bool is_zero() const {
    for (const auto& row : c)
      for (double v : row)
        if (v != 0.0) return false;
    return true;
  }
};

// Polynomial reaction input: per component the coefficients of the Taylor
// polynomial in (w1,w2) about a base state, total degree <= 3. Index order:
// {1, w1, w2, w1^2, w1 w2, w2^2, w1^3, w1^2 w2, w1 w2^2, w2^3}.
struct ReactionPoly {
  Vec2 base_state = Vec2::Zero();
  std::array<std::array<double, 10>, 2> c{};

  Vec2 eval(const Vec2& w) const {
    Vec2 out;
    const double u = w(0), v = w(1);
    for (int i = 0; i < 2; ++i) {
      const auto& a = c[i];
      out(i) = a[0] + a[1] * u + a[2] * v + a[3] * u * u + a[4] * u * v + a[5] * v * v +
               a[6] * u * u * u + a[7] * u * u * v + a[8] * u * v * v + a[9] * v * v * v;
    }
    return out;
  }
};

struct SystemSpec {
  double d1 = 1.0, d2 = 1.0;
  Mat2 L = Mat2::Zero();
  Mat2 M = Mat2::Identity();
  QuadForm Q;
  CubicForm K;
  std::optional<ReactionPoly> poly;

  Mat2 D() const { return Vec2(d1, d2).asDiagonal(); }
  // advection template B(c) = [[1+c,0],[0,c]]
  Mat2 B(double c) const {
    Mat2 b;
    b << 1.0 + c, 0.0, 0.0, c;
    return b;
  }

  SystemSpec with_quadratic_scaled(double f) const {
    SystemSpec s = *this;
    s.Q = Q.scaled(f);
    s.poly.reset();  // a scaled Q no longer matches the source polynomial
    return s;
  }
};

inline SystemSpec tensors_from_poly(const ReactionPoly& p) {
  SystemSpec s;
  for (int i = 0; i < 2; ++i) {
    const auto& a = p.c[i];
    s.L(i, 0) = a[1];
    s.L(i, 1) = a[2];
    s.Q.c[i] = {a[3], a[4], a[5]};
    s.K.c[i] = {a[6], a[7], a[8], a[9]};
  }
  s.poly = p;
  return s;
}

// Normalises and checks a raw spec. Tensor symmetry is structural in the
// polynomial representation; the checks left are positivity of D, base-state
// consistency of a polynomial input, and tensor/polynomial agreement.
inline SystemSpec validate_system(SystemSpec s) {
  if (!(s.d1 > 0.0) || !(s.d2 > 0.0)) throw NonPositiveDiffusion();
  if (s.poly) {
    const auto& p = *s.poly;
    const double scale = std::max({1.0, std::abs(p.c[0][0]), std::abs(p.c[1][0])});
    if (std::abs(p.c[0][0]) > 1e-10 * scale || std::abs(p.c[1][0]) > 1e-10 * scale)
      throw InconsistentPolynomialTensor("polynomial constant term nonzero: base state is not steady");
    // degree-2/3 parts must match the tensors on test vectors
    const Vec2 tests[] = {Vec2(1.0, 0.0), Vec2(0.0, 1.0), Vec2(1.0, 1.0), Vec2(0.7, -0.3)};
    for (const Vec2& w : tests) {
      Vec2 quad = s.Q(w, w), cub = s.K(w, w, w);
      Vec2 poly_only = p.eval(w) - (Vec2() << p.c[0][1] * w(0) + p.c[0][2] * w(1),
                                    p.c[1][1] * w(0) + p.c[1][2] * w(1)).finished();
      poly_only(0) -= p.c[0][0];
      poly_only(1) -= p.c[1][0];
      if ((poly_only - quad - cub).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + poly_only.norm()))
        throw InconsistentPolynomialTensor("polynomial degree-2/3 parts disagree with tensors");
    }
  }
  return s;
}

// ----------------------------------------------------------------------------
// presets

// Two-component system with an exact Turing point at kc = 1; eps_q is the free
// strength of the quadratic nonlinearity.
inline SystemSpec designed_example(double eps_q) {
  SystemSpec s;
  s.d1 = 1.0;
  s.d2 = 3.5;
  s.L << 3.0, -1.0, 14.0, -3.5;
  s.M << 1.0, 4.0, -0.2, 1.0;
  s.Q.c[0] = {eps_q, 0.0, 0.25 * eps_q};
  s.Q.c[1] = {eps_q, 0.0, 0.25 * eps_q};
  s.K.c[0] = {0.0, 0.0, -1.0, 0.0};
  s.K.c[1] = {0.0, 0.0, 1.0, 0.0};
  return validate_system(s);
}

struct KlausmeierParams {
  double a = 2.8;
  double m = 0.45;
  double d = 500.0;
};

inline Vec2 klausmeier_vegetated_state(const KlausmeierParams& p) {
  const double disc = p.a * p.a - 4.0 * p.m * p.m;
  if (disc < 0.0) throw NumericalError("klausmeier: a < 2m, no vegetated state");
  const double v = (p.a + std::sqrt(disc)) / (2.0 * p.m);  // Turing-unstable branch
  return Vec2(p.m / v, v);
}

// Model shifted to the vegetated steady state; tensors follow by exact
// polynomial differentiation, and the polynomial itself is kept for the
// oracle's consistency check.
inline SystemSpec klausmeier(const KlausmeierParams& p) {
  const Vec2 uv = klausmeier_vegetated_state(p);
  const double u0 = uv(0), v0 = uv(1);
  ReactionPoly poly;
  poly.base_state = uv;
  // f1 = a - u - u v^2, f2 = -m v + u v^2 expanded about (u0, v0)
  poly.c[0] = {p.a - u0 - u0 * v0 * v0, -(1.0 + v0 * v0), -2.0 * u0 * v0,
               0.0, -2.0 * v0, -u0, 0.0, 0.0, -1.0, 0.0};
  poly.c[1] = {-p.m * v0 + u0 * v0 * v0, v0 * v0, -p.m + 2.0 * u0 * v0,
               0.0, 2.0 * v0, u0, 0.0, 0.0, 1.0, 0.0};
  SystemSpec s = tensors_from_poly(poly);
  s.d1 = p.d;
  s.d2 = 1.0;
  s.M = Mat2::Identity();  // placeholder; the a-unfolded variant sets dL/da
  return validate_system(s);
}

}  // namespace stripes
