#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "civr/grid.hpp"
#include "civr/trajectory.hpp"

namespace civr {

enum class CivrMode { smooth, sudden };
enum class Quadrature { riemann, trapezoid };

struct CivrParams {
  double a = 1.5;        // smoothing width
  double c = 1.0;        // cutoff: pairs with Re(phi) > c are dropped
  PhaseGrid grid1{{-3.0, 3.0, 30}, {-4.0, 4.0, 40}};  // (q1, p1) launch grid
  CivrMode mode = CivrMode::smooth;
  double epsilon = 0.25;  // sudden mode: delta width / target-grid spacing
  Quadrature quadrature = Quadrature::riemann;
  double dt = 1e-3;

  void validate() const;
};

/// All trajectories launched from the (q1, p1) grid for one initial label and time.
struct TrajectoryEnsemble {
  CoherentLabel z0;
  double T = 0.0;
  PhaseGrid grid1;
  std::vector<TrajectoryRecord> records;  // grid1 order

  std::size_t invalid_count() const;
};

TrajectoryEnsemble run_ensemble(const ScaledHamiltonian& h, const CoherentLabel& z0,
                                const PhaseGrid& grid1, double T, double dt,
                                unsigned workers = 1);

/// Quadrature weight of node k of the launch grid (the dq1 dp1 measure).
double node_weight(const PhaseGrid& grid, std::size_t k, Quadrature rule);

struct Contribution {
  Complex phi;
  Complex weight;  // integrand times measure; zero when rejected
  bool accepted = false;
  Complex vT;
  double alpha = 0.0;
};

/// Exponent of the smooth integrand for target label zf; nullopt when M_vv = 0.
std::optional<Complex> phi_exponent(const TrajectoryRecord& rec, const CoherentLabel& z0,
                                    const CoherentLabel& zf);

inline bool filter(Complex phi, double c) { return phi.real() <= c; }

/// Full smooth-mode contribution of one trajectory to K(zf); `measure` is the
/// dq1 dp1 quadrature weight of its launch node.
Contribution contribution(const TrajectoryRecord& rec, const CoherentLabel& z0,
                          const CoherentLabel& zf, double a, double c, double measure);

struct PropagatorGrid {
  PhaseGrid zf;
  std::vector<Complex> K;  // zf order
  double T = 0.0;
  double a = 0.0;
  double c = 0.0;
  CivrMode mode = CivrMode::smooth;
  std::size_t accepted_pairs = 0;
  std::size_t rejected_pairs = 0;
  std::size_t invalid_trajectories = 0;
  std::size_t singular_trajectories = 0;  // M_vv == 0
  bool empty_accepted = false;
};

PropagatorGrid smooth_K(const TrajectoryEnsemble& ens, const PhaseGrid& zf_grid, double a,
                        double c, Quadrature rule = Quadrature::riemann, unsigned workers = 1);

PropagatorGrid sudden_K(const TrajectoryEnsemble& ens, const PhaseGrid& zf_grid, double epsilon,
                        double c, Quadrature rule = Quadrature::riemann, unsigned workers = 1);

/// Runs the ensemble and assembles K in the mode selected by `civr`.
PropagatorGrid propagate_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                           const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                           unsigned workers = 1);

PropagatorGrid smooth_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                        const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                        unsigned workers = 1);
PropagatorGrid sudden_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                        const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                        unsigned workers = 1);

struct LambdaCheck {
  Eigen::Matrix2d Lambda;  // d(q1(T), p1(T)) / d(q1, p1)
  double det_lambda;
  double mvv_sq;
};

/// Finite-difference endpoint Jacobian compared with |M_vv|^2 from `rec`.
LambdaCheck lambda_check(const TrajectoryRecord& rec, const ScaledHamiltonian& h,
                         const LaunchParams& lp, double eps);

/// Acceptance of each launch node, judged at its own landing label zf* = v(T).
struct ContributionMap {
  PhaseGrid grid1;
  std::vector<std::uint8_t> accepted;
  std::vector<double> re_phi;  // NaN for invalid or singular trajectories
};

ContributionMap contribution_map(const TrajectoryEnsemble& ens, double c);
ContributionMap contribution_map(const ScaledHamiltonian& h, const CoherentLabel& z0,
                                 const CivrParams& civr, double T, unsigned workers = 1);

}  // namespace civr
