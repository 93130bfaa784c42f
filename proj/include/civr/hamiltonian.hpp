#pragma once

#include "civr/types.hpp"

namespace civr {

/// Quartic oscillator H = p^2/2 + Omega^2 q^2/2 + lambda q^4/4 in unscaled units.
struct QuarticSpec {
  double Omega = 1.0;
  double lambda = 0.4;
  UnitScaling scaling;
};

/// Scaled classical Hamiltonian
///   H(q, p) = omega [p^2/2 + nu_bar_sq q^2/2 + lambda_bar q^4/4 + const_term]
/// which is <v|H|u> for the quartic family when built by build_scaled().
struct ScaledHamiltonian {
  double omega = 1.0;
  double nu = 1.0;
  double lambda_bar = 0.0;
  double nu_bar_sq = 1.0;
  double const_term = 0.5;
};

/// Normal-ordered classical symbol (coherent-state matrix element).
ScaledHamiltonian build_scaled(const QuarticSpec& spec);

/// Plain classical Hamiltonian without the hbar corrections; used for the
/// central-orbit period and turning points.
ScaledHamiltonian build_bare(const QuarticSpec& spec);

template <typename Scalar>
Scalar potential(const ScaledHamiltonian& h, const Scalar& q) {
  const Scalar q2 = q * q;
  return h.omega * (0.5 * h.nu_bar_sq * q2 + 0.25 * h.lambda_bar * q2 * q2);
}

template <typename Scalar>
Scalar evaluate(const ScaledHamiltonian& h, const Scalar& q, const Scalar& p) {
  return h.omega * (0.5 * p * p) + potential(h, q) + h.omega * h.const_term;
}

template <typename Scalar>
Scalar dH_dq(const ScaledHamiltonian& h, const Scalar& q) {
  return h.omega * (h.nu_bar_sq * q + h.lambda_bar * q * q * q);
}

template <typename Scalar>
Scalar dH_dp(const ScaledHamiltonian& h, const Scalar& p) {
  return h.omega * p;
}

template <typename Scalar>
Scalar d2H_dq2(const ScaledHamiltonian& h, const Scalar& q) {
  return h.omega * (h.nu_bar_sq + 3.0 * h.lambda_bar * q * q);
}

inline Complex eval_complex(const ScaledHamiltonian& h, Complex q, Complex p) {
  return evaluate(h, q, p);
}

/// kinetic + Omega^2 q^2/2 + lambda q^4/4 in scaled form, no corrections.
double eval_bare(const ScaledHamiltonian& h, double q, double p);

struct SplitH {
  double H1;
  double H2;
};

SplitH split_double(const ScaledHamiltonian& h, const DoublePhasePoint& x);

/// Gradient of H1 with respect to (Q1, Q2, P1, P2).
Vector4 grad_double(const ScaledHamiltonian& h, const DoublePhasePoint& x);

/// Hessian of H1 with respect to (Q1, Q2, P1, P2).
Matrix4 hess_double(const ScaledHamiltonian& h, const DoublePhasePoint& x);

/// d^2 H / du dv = (H_qq + H_pp) / 2.
Complex d2H_dudv(const ScaledHamiltonian& h, Complex q, Complex p);

}  // namespace civr
