#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace stripes {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using Complex = std::complex<double>;

// <u,v> = sum_i u_i conj(v_i); adjoint vectors are real throughout, so this
// reduces to the plain pairing for them.
inline double inner(const Vec2& u, const Vec2& v) { return u.dot(v); }
inline Complex inner(const Vec2c& u, const Vec2& v) {
  return u(0) * v(0) + u(1) * v(1);
}

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveDiffusion : NumericalError {
  NonPositiveDiffusion() : NumericalError("diffusion coefficients must be positive") {}
};
struct InconsistentPolynomialTensor : NumericalError {
  explicit InconsistentPolynomialTensor(const std::string& what) : NumericalError(what) {}
};
struct NoTuringWavenumber : NumericalError {
  NoTuringWavenumber() : NumericalError("d1*a4 + d2*a1 <= 0: no critical wavenumber") {}
};
struct ConditionFailed : NumericalError {
  ConditionFailed(int which, double witness)
      : NumericalError("Turing condition (" + std::to_string(which) +
                       ") failed, witness " + std::to_string(witness)),
        which(which), witness(witness) {}
  int which;
  double witness;
};
struct DegenerateKernelChart : NumericalError {
  DegenerateKernelChart() : NumericalError("kernel chart requires b1 != 0 and b1 + b4 != 0") {}
};
struct LambdaMZero : NumericalError {
  LambdaMZero() : NumericalError("lambda_M = 0: unfolding matrix does not move the spectrum") {}
};
struct LambdaBetaBetaNonPositive : NumericalError {
  explicit LambdaBetaBetaNonPositive(double v)
      : NumericalError("lambda_betabeta = " + std::to_string(v) + " <= 0") {}
};
struct SupercriticalityViolated : NumericalError {
  explicit SupercriticalityViolated(double rho_nl)
      : NumericalError("rho_nl = " + std::to_string(rho_nl) + " >= 0: bifurcation not supercritical") {}
};
struct SingularAuxiliaryOperator : NumericalError {
  explicit SingularAuxiliaryOperator(const std::string& name)
      : NumericalError("auxiliary operator " + name + " is singular") {}
};
struct RhsNotInRange : NumericalError {
  explicit RhsNotInRange(double defect)
      : NumericalError("rhs not in range of singular operator, <rhs,E0*> = " + std::to_string(defect)) {}
};
struct InconsistentAmplitude : NumericalError {
  InconsistentAmplitude(double given, double expected)
      : NumericalError("amplitude " + std::to_string(given) + " deviates from branch value " +
                       std::to_string(expected)) {}
};
struct ThetaOutOfRange : NumericalError {
  explicit ThetaOutOfRange(double theta)
      : NumericalError("theta = " + std::to_string(theta) + " outside (0,1]") {}
};
struct NewtonDiverged : NumericalError {
  NewtonDiverged(int iterations, double residual)
      : NumericalError("Newton diverged after " + std::to_string(iterations) +
                       " iterations, residual " + std::to_string(residual)),
        iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};
struct TruncationInsufficient : NumericalError {
  explicit TruncationInsufficient(double drift)
      : NumericalError("doubling N moves the first Fourier mode by " + std::to_string(drift)) {}
};
struct EigensolveFailure : NumericalError {
  EigensolveFailure() : NumericalError("dense eigensolver did not converge") {}
};
struct MatchingFailure : NumericalError {
  explicit MatchingFailure(const std::string& what) : NumericalError(what) {}
};
struct CalibrationAmbiguous : NumericalError {
  explicit CalibrationAmbiguous(const std::string& what) : NumericalError(what) {}
};
struct GridTooFine : ConfigError {
  explicit GridTooFine(std::size_t cells)
      : ConfigError("grid has " + std::to_string(cells) + " cells, over the cap") {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stripes
