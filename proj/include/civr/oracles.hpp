#pragma once

#include "civr/hamiltonian.hpp"
#include "civr/reconstruction.hpp"

namespace civr {

/// Closed-form coherent-state propagator of the unit-frequency oscillator,
/// zero-point phase included.
Complex harmonic_exact_K(const CoherentLabel& z0, const CoherentLabel& zf, double T);

/// Coherent state |z0> evolved for time T under the unit-frequency oscillator.
WavefunctionGrid harmonic_exact_state(const XGrid& grid, const CoherentLabel& z0, double T);

struct SplitOpConfig {
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n_x = 2048;
  double dt = 1e-3;
  double T = 1.0;

  XGrid grid() const { return XGrid::periodic(x_min, x_max, n_x); }
  void validate() const;
};

struct SplitOpResult {
  WavefunctionGrid psi;
  double edge_max = 0.0;  // largest |psi| at the two boundary samples over the run
  bool edge_ok = true;    // edge_max < 1e-10
};

/// Strang-split evolution under H = p^2/2 + Omega^2 q^2/2 + lambda q^4/4 in
/// scaled units. psi0 must live on cfg.grid().
SplitOpResult split_operator_evolve(const QuarticSpec& spec, const WavefunctionGrid& psi0,
                                    const SplitOpConfig& cfg);

struct Spectrum {
  double E0, E1, E2;
};

/// Lowest three eigenvalues (unscaled energy units) by imaginary-time
/// split-operator relaxation with Gram-Schmidt deflation.
Spectrum ground_energy_check(const QuarticSpec& spec, double tau_step = 1e-3);

}  // namespace civr
