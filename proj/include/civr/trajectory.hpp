#pragma once

#include <functional>

#include "civr/hamiltonian.hpp"

namespace civr {

/// A complex trajectory is fixed by the packet center (q0, p0) and a companion
/// point (q1, p1): u(0) = z0 and v(0) = (q1 - i p1)/sqrt(2).
struct LaunchParams {
  double q0 = 0.0;
  double p0 = 0.0;
  double q1 = 0.0;
  double p1 = 0.0;
  double T = 1.0;
  double dt = 1e-3;

  double dq() const { return q1 - q0; }
  double dp() const { return p1 - p0; }
  CoherentLabel z0() const { return {q0, p0}; }
};

/// Relative drift of H1 or H2 above which a trajectory is declared invalid.
inline constexpr double kH2DriftCap = 1e-4;

/// Largest change of H tolerated in a single RK4 step, relative to the larger
/// of max(1, |H(0)|) and the summed magnitudes of the terms of H at the step
/// start; larger changes make evolve() halve that step, up to 2^10 substeps.
inline constexpr double kStepEnergyTol = 1e-14;

/// u/v tangent blocks. Layout (du(T), dv(T)) = M (du(0), dv(0)).
struct TangentUV {
  Complex uu, uv, vu, vv;

  Complex det() const { return uu * vv - uv * vu; }
};

struct TrajectoryRecord {
  LaunchParams launch;
  DoublePhasePoint start;
  DoublePhasePoint end;
  Complex u0, v0;  // u(0) = z0, v(0) = v1
  Complex uT, vT;
  Complex S;  // action with boundary term evaluated at v(T)
  Complex I;  // (1/2) int d2H/dudv dt
  Matrix4 n = Matrix4::Identity();
  Matrix2c m = Matrix2c::Identity();
  TangentUV M{1.0, 0.0, 0.0, 1.0};
  double xi = 0.0;           // continuous arg M_vv, xi(0) = 0
  double xi_max_step = 0.0;  // largest |xi(t_k+1) - xi(t_k)|
  double H1_0 = 0.0, H2_0 = 0.0;
  double H1_drift = 0.0;  // max |H1(t) - H1(0)|
  double H2_drift = 0.0;  // max |H2(t) - H2(0)|
  std::size_t steps = 0;
  bool valid = true;

  ComplexPhasePoint end_point() const { return from_double(end); }
};

/// Snapshot handed to an evolve() observer after every accepted step
/// (and once at t = 0).
struct TrajectorySample {
  double t;
  const DoublePhasePoint& x;
  const Matrix4& n;
  Complex S;  // running action including the boundary term at time t
  Complex I;
  Complex Mvv;
  double xi;
};

using TrajectoryObserver = std::function<void(const TrajectorySample&)>;

DoublePhasePoint initial_conditions(const LaunchParams& lp);

/// Number of RK4 steps used for total time T and nominal step dt.
std::size_t step_count(double T, double dt);

TrajectoryRecord evolve(const ScaledHamiltonian& h, const LaunchParams& lp,
                        const TrajectoryObserver& observer = {});

/// Phase-space flow only, plain fixed-step RK4 (no tangent, action, diagnostics
/// or step subdivision).
DoublePhasePoint flow(const ScaledHamiltonian& h, const DoublePhasePoint& x0, double T, double dt);

Matrix2c n_to_m(const Matrix4& n);
TangentUV m_to_M(const Matrix2c& m);
Complex Mvv_from_n(const Matrix4& n);

/// Central-difference tangent of the flow, columns = d x(T) / d x_j(0).
Matrix4 finite_diff_tangent(const ScaledHamiltonian& h, const LaunchParams& lp, double eps);

struct OrbitSummary {
  double period;
  double turning_point;  // largest |q| reached
  double energy;         // bare energy of the orbit
};

/// Period and turning point of the real central trajectory launched from
/// (q0, p0), measured from zero crossings of p along a bare-Hamiltonian orbit.
OrbitSummary central_orbit(const ScaledHamiltonian& bare, double q0, double p0, double t_max,
                           double dt = 1e-3);

}  // namespace civr
