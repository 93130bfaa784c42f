#include "civr/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace civr {

namespace {

// Packed state: x (4), n column-major (16), integral of S (2), integral of I (2).
using State = Eigen::Matrix<double, 24, 1>;

template <typename Vec, typename Rhs>
void rk4_step(Vec& y, double h, Rhs&& f) {
  const Vec k1 = f(y);
  const Vec k2 = f(Vec(y + 0.5 * h * k1));
  const Vec k3 = f(Vec(y + 0.5 * h * k2));
  const Vec k4 = f(Vec(y + h * k3));
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector4 phase_velocity(const ScaledHamiltonian& h, const Vector4& x) {
  const Vector4 g = grad_double(h, DoublePhasePoint::from_vec(x));
  return {g[2], g[3], -g[0], -g[1]};
}

State full_rhs(const ScaledHamiltonian& h, const State& y) {
  State dy;
  const Vector4 x = y.head<4>();
  const DoublePhasePoint pt = DoublePhasePoint::from_vec(x);
  const Vector4 xd = phase_velocity(h, x);
  dy.head<4>() = xd;

  // n' = J Hess n, with J Hess formed by moving rows.
  const Matrix4 hess = hess_double(h, pt);
  Matrix4 jh;
  jh.row(0) = hess.row(2);
  jh.row(1) = hess.row(3);
  jh.row(2) = -hess.row(0);
  jh.row(3) = -hess.row(1);
  Eigen::Map<const Matrix4> n(y.data() + 4);
  Eigen::Map<Matrix4>(dy.data() + 4) = jh * n;

  const Complex q(x[0], x[3]), p(x[2], x[1]);
  const Complex qd(xd[0], xd[3]), pd(xd[2], xd[1]);
  // (i/2)(u'v - v'u) = (p q' - q p')/2
  const Complex Sd = 0.5 * (p * qd - q * pd) - evaluate(h, q, p);
  const Complex Id = 0.5 * d2H_dudv(h, q, p);
  dy[20] = Sd.real();
  dy[21] = Sd.imag();
  dy[22] = Id.real();
  dy[23] = Id.imag();
  return dy;
}

Complex energy(const ScaledHamiltonian& h, const State& y) {
  return evaluate(h, Complex(y[0], y[3]), Complex(y[2], y[1]));
}

// Sum of the magnitudes of the terms of H; sets the roundoff floor of H.
double energy_magnitude(const ScaledHamiltonian& h, const State& y) {
  const double q2 = std::norm(Complex(y[0], y[3]));
  const double p2 = std::norm(Complex(y[2], y[1]));
  return h.omega * (0.5 * p2 + 0.5 * std::abs(h.nu_bar_sq) * q2 + 0.25 * h.lambda_bar * q2 * q2 +
                    std::abs(h.const_term));
}

// RK4 over one output step, halved recursively wherever a single step changes
// H by more than `tol`. Tracks the unwrapped phase of M_vv per substep.
class Advancer {
 public:
  static constexpr int kMaxDepth = 12;

  Advancer(const ScaledHamiltonian& h, double scale) : h_(h), scale_(scale) {}

  bool advance(State& y, double dt, int depth = 0) {
    State trial = y;
    rk4_step(trial, dt, [this](const State& s) { return full_rhs(h_, s); });
    const bool finite = trial.allFinite();
    const double tol = kStepEnergyTol * std::max(scale_, energy_magnitude(h_, y));
    if (depth < kMaxDepth && (!finite || std::abs(energy(h_, trial) - energy(h_, y)) > tol))
      return advance(y, 0.5 * dt, depth + 1) && advance(y, 0.5 * dt, depth + 1);
    if (!finite) return false;
    y = trial;
    const Complex mvv = Mvv_from_n(Eigen::Map<const Matrix4>(y.data() + 4));
    double dxi = 0.0;
    if (mvv_prev != Complex(0.0) && mvv != Complex(0.0)) dxi = std::arg(mvv / mvv_prev);
    xi += dxi;
    xi_max_step = std::max(xi_max_step, std::abs(dxi));
    mvv_prev = mvv;
    return true;
  }

  Complex mvv_prev{1.0, 0.0};
  double xi = 0.0;
  double xi_max_step = 0.0;

 private:
  const ScaledHamiltonian& h_;
  double scale_;
};

}  // namespace

DoublePhasePoint initial_conditions(const LaunchParams& lp) {
  return {0.5 * (lp.q0 + lp.q1), 0.5 * (lp.q1 - lp.q0), 0.5 * (lp.p0 + lp.p1),
          0.5 * (lp.p0 - lp.p1)};
}

std::size_t step_count(double T, double dt) {
  if (!(T >= 0.0)) throw std::invalid_argument("evolve: T must be non-negative");
  if (T == 0.0) return 0;
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

Matrix2c n_to_m(const Matrix4& n) {
  Matrix2c m;
  m(0, 0) = Complex(n(0, 0), -n(0, 3));  // m_qq
  m(0, 1) = Complex(n(0, 2), -n(0, 1));  // m_qp
  m(1, 0) = Complex(n(1, 3), n(1, 0));   // m_pq
  m(1, 1) = Complex(n(1, 1), n(1, 2));   // m_pp
  return m;
}

TangentUV m_to_M(const Matrix2c& m) {
  const Complex qq = m(0, 0), qp = m(0, 1), pq = m(1, 0), pp = m(1, 1);
  return {0.5 * (qq + pp + kI * pq - kI * qp), 0.5 * (qq - pp + kI * pq + kI * qp),
          0.5 * (qq - pp - kI * pq - kI * qp), 0.5 * (qq + pp - kI * pq + kI * qp)};
}

Complex Mvv_from_n(const Matrix4& n) {
  const Complex qq(n(0, 0), -n(0, 3)), qp(n(0, 2), -n(0, 1));
  const Complex pq(n(1, 3), n(1, 0)), pp(n(1, 1), n(1, 2));
  return 0.5 * (qq + pp - kI * pq + kI * qp);
}

TrajectoryRecord evolve(const ScaledHamiltonian& h, const LaunchParams& lp,
                        const TrajectoryObserver& observer) {
  TrajectoryRecord rec;
  rec.launch = lp;
  rec.start = initial_conditions(lp);
  const std::size_t steps = step_count(lp.T, lp.dt);
  const double step = steps > 0 ? lp.T / static_cast<double>(steps) : 0.0;

  State y = State::Zero();
  y.head<4>() = rec.start.vec();
  Eigen::Map<Matrix4>(y.data() + 4).setIdentity();

  const auto start_cp = from_double(rec.start);
  rec.u0 = start_cp.u();
  rec.v0 = start_cp.v();
  const Complex z0 = lp.z0().z();

  const Complex H0 = evaluate(h, start_cp.q, start_cp.p);
  rec.H1_0 = H0.real();
  rec.H2_0 = H0.imag();
  const double h1_scale = std::max(1.0, std::abs(rec.H1_0));
  const double h2_scale = std::max(1.0, std::abs(rec.H2_0));

  Advancer adv(h, std::max(1.0, std::abs(H0)));

  auto emit = [&](double t) {
    if (!observer) return;
    const DoublePhasePoint x = DoublePhasePoint::from_vec(y.head<4>());
    const auto cp = from_double(x);
    const Complex S =
        Complex(y[20], y[21]) - 0.5 * kI * (cp.u() * cp.v() + z0 * rec.v0);
    const Matrix4 n = Eigen::Map<const Matrix4>(y.data() + 4);
    observer({t, x, n, S, Complex(y[22], y[23]), adv.mvv_prev, adv.xi});
  };
  emit(0.0);

  std::size_t k = 0;
  for (; k < steps; ++k) {
    if (!adv.advance(y, step)) {
      rec.valid = false;
      break;
    }
    const Complex H = energy(h, y);
    rec.H1_drift = std::max(rec.H1_drift, std::abs(H.real() - rec.H1_0));
    rec.H2_drift = std::max(rec.H2_drift, std::abs(H.imag() - rec.H2_0));
    if (rec.H1_drift / h1_scale > kH2DriftCap || rec.H2_drift / h2_scale > kH2DriftCap) {
      rec.valid = false;
      ++k;
      break;
    }
    emit(step * static_cast<double>(k + 1));
  }
  rec.steps = k;

  rec.end = DoublePhasePoint::from_vec(y.head<4>());
  const auto end_cp = from_double(rec.end);
  rec.uT = end_cp.u();
  rec.vT = end_cp.v();
  rec.S = Complex(y[20], y[21]) - 0.5 * kI * (rec.uT * rec.vT + z0 * rec.v0);
  rec.I = Complex(y[22], y[23]);
  rec.n = Eigen::Map<const Matrix4>(y.data() + 4);
  rec.m = n_to_m(rec.n);
  rec.M = m_to_M(rec.m);
  rec.xi = adv.xi;
  rec.xi_max_step = adv.xi_max_step;
  return rec;
}

DoublePhasePoint flow(const ScaledHamiltonian& h, const DoublePhasePoint& x0, double T,
                      double dt) {
  const std::size_t steps = step_count(T, dt);
  const double step = steps > 0 ? T / static_cast<double>(steps) : 0.0;
  Vector4 x = x0.vec();
  auto rhs = [&h](const Vector4& s) { return phase_velocity(h, s); };
  for (std::size_t k = 0; k < steps; ++k) rk4_step(x, step, rhs);
  return DoublePhasePoint::from_vec(x);
}

Matrix4 finite_diff_tangent(const ScaledHamiltonian& h, const LaunchParams& lp, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw std::invalid_argument("finite_diff_tangent: eps must lie in [1e-7, 1e-3]");
  const Vector4 x0 = initial_conditions(lp).vec();
  Matrix4 out;
  for (int j = 0; j < 4; ++j) {
    Vector4 plus = x0, minus = x0;
    plus[j] += eps;
    minus[j] -= eps;
    const Vector4 fp = flow(h, DoublePhasePoint::from_vec(plus), lp.T, lp.dt).vec();
    const Vector4 fm = flow(h, DoublePhasePoint::from_vec(minus), lp.T, lp.dt).vec();
    out.col(j) = (fp - fm) / (2.0 * eps);
  }
  return out;
}

OrbitSummary central_orbit(const ScaledHamiltonian& bare, double q0, double p0, double t_max,
                           double dt) {
  const std::size_t steps = step_count(t_max, dt);
  const double step = t_max / static_cast<double>(steps);
  Vector4 x{q0, 0.0, p0, 0.0};
  auto rhs = [&bare](const Vector4& s) { return phase_velocity(bare, s); };

  // Times at which p changes sign from negative to positive (q at its minimum).
  std::vector<double> crossings;
  double q_max = std::abs(q0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double p_prev = x[2];
    rk4_step(x, step, rhs);
    q_max = std::max(q_max, std::abs(x[0]));
    if (p_prev < 0.0 && x[2] >= 0.0) {
      const double frac = p_prev / (p_prev - x[2]);
      crossings.push_back(step * (static_cast<double>(k) + frac));
    }
  }
  if (crossings.size() < 2)
    throw std::runtime_error("central_orbit: fewer than two periods within t_max");
  const double period =
      (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return {period, q_max, eval_bare(bare, q0, p0)};
}

}  // namespace civr
