#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace civr {

using Complex = std::complex<double>;
using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Center (q, p) of a coherent state in scaled units. z = (q + i p) / sqrt(2).
struct CoherentLabel {
  double q = 0.0;
  double p = 0.0;

  Complex z() const { return Complex(q, p) / kSqrt2; }
  Complex z_conj() const { return Complex(q, -p) / kSqrt2; }
  double norm_sq() const { return 0.5 * (q * q + p * p); }

  /// Label whose conjugate z* equals `zc`.
  static CoherentLabel from_conj(Complex zc) {
    return {kSqrt2 * zc.real(), -kSqrt2 * zc.imag()};
  }
};

/// Length scale b and hbar. Scaled variables are q/b and p b/hbar.
struct UnitScaling {
  double b = 1.0;
  double hbar = 1.0;

  UnitScaling() = default;
  UnitScaling(double b_, double hbar_) : b(b_), hbar(hbar_) {
    if (!(b > 0.0) || !(hbar > 0.0))
      throw std::invalid_argument("UnitScaling: b and hbar must be positive");
  }

  double omega() const { return hbar / (b * b); }

  CoherentLabel scale(double q, double p) const { return {q / b, p * b / hbar}; }
  CoherentLabel unscale(const CoherentLabel& s) const {
    return {s.q * b, s.p * hbar / b};
  }
};

/// Real encoding of a complex phase-space point: q = Q1 + i P2, p = P1 + i Q2.
struct DoublePhasePoint {
  double Q1 = 0.0;
  double Q2 = 0.0;
  double P1 = 0.0;
  double P2 = 0.0;

  Vector4 vec() const { return {Q1, Q2, P1, P2}; }
  static DoublePhasePoint from_vec(const Vector4& x) { return {x[0], x[1], x[2], x[3]}; }
};

struct ComplexPhasePoint {
  Complex q;
  Complex p;

  Complex u() const { return (q + kI * p) / kSqrt2; }
  Complex v() const { return (q - kI * p) / kSqrt2; }
};

inline DoublePhasePoint to_double(const ComplexPhasePoint& cp) {
  return {cp.q.real(), cp.p.imag(), cp.p.real(), cp.q.imag()};
}

inline ComplexPhasePoint from_double(const DoublePhasePoint& x) {
  return {Complex(x.Q1, x.P2), Complex(x.P1, x.Q2)};
}

struct UV {
  Complex u;
  Complex v;
};

inline UV uv_from_qp(Complex q, Complex p) {
  return {(q + kI * p) / kSqrt2, (q - kI * p) / kSqrt2};
}

/// Symplectic form of the doubled phase space, ordering (Q1, Q2, P1, P2).
inline Matrix4 symplectic_form() {
  Matrix4 J = Matrix4::Zero();
  J.topRightCorner<2, 2>().setIdentity();
  J.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return J;
}

}  // namespace civr
