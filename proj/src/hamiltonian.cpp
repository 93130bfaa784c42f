#include "civr/hamiltonian.hpp"

namespace civr {

namespace {

ScaledHamiltonian scaled_core(const QuarticSpec& spec) {
  if (!(spec.scaling.b > 0.0) || !(spec.scaling.hbar > 0.0))
    throw std::invalid_argument("QuarticSpec: b and hbar must be positive");
  if (spec.Omega < 0.0 || spec.lambda < 0.0)
    throw std::invalid_argument("QuarticSpec: Omega and lambda must be non-negative");
  ScaledHamiltonian h;
  h.omega = spec.scaling.omega();
  h.nu = spec.Omega / h.omega;
  h.lambda_bar = spec.lambda * spec.scaling.hbar / (h.omega * h.omega * h.omega);
  return h;
}

}  // namespace

ScaledHamiltonian build_scaled(const QuarticSpec& spec) {
  ScaledHamiltonian h = scaled_core(spec);
  h.nu_bar_sq = h.nu * h.nu + 1.5 * h.lambda_bar;
  h.const_term = (1.0 + h.nu * h.nu + 3.0 * h.lambda_bar / 16.0) / 4.0;
  return h;
}

ScaledHamiltonian build_bare(const QuarticSpec& spec) {
  ScaledHamiltonian h = scaled_core(spec);
  h.nu_bar_sq = h.nu * h.nu;
  h.const_term = 0.0;
  return h;
}

double eval_bare(const ScaledHamiltonian& h, double q, double p) {
  const double q2 = q * q;
  return h.omega * (0.5 * p * p + 0.5 * h.nu * h.nu * q2 + 0.25 * h.lambda_bar * q2 * q2);
}

SplitH split_double(const ScaledHamiltonian& h, const DoublePhasePoint& x) {
  const auto cp = from_double(x);
  const Complex H = evaluate(h, cp.q, cp.p);
  return {H.real(), H.imag()};
}

Vector4 grad_double(const ScaledHamiltonian& h, const DoublePhasePoint& x) {
  const auto cp = from_double(x);
  const Complex Hq = dH_dq(h, cp.q);
  const Complex Hp = dH_dp(h, cp.p);
  // dq = dQ1 + i dP2, dp = dP1 + i dQ2, H1 = Re H.
  return {Hq.real(), -Hp.imag(), Hp.real(), -Hq.imag()};
}

Matrix4 hess_double(const ScaledHamiltonian& h, const DoublePhasePoint& x) {
  const Complex Hqq = d2H_dq2(h, Complex(x.Q1, x.P2));
  const double Hpp = h.omega;
  Matrix4 H = Matrix4::Zero();
  H(0, 0) = Hqq.real();
  H(3, 3) = -Hqq.real();
  H(0, 3) = H(3, 0) = -Hqq.imag();
  H(2, 2) = Hpp;
  H(1, 1) = -Hpp;
  return H;
}

Complex d2H_dudv(const ScaledHamiltonian& h, Complex q, Complex /*p*/) {
  return 0.5 * (d2H_dq2(h, q) + h.omega);
}

}  // namespace civr
