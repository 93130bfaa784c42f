#pragma once

#include <vector>

#include "civr/propagator.hpp"

namespace civr {

/// Uniform position grid x_i = x0 + i dx, i < n.
struct XGrid {
  double x0 = -12.0;
  double dx = 24.0 / 2048.0;
  std::size_t n = 2048;

  double at(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  bool same_as(const XGrid& o) const;

  /// n points covering [lo, hi) with spacing (hi - lo) / n (FFT-compatible).
  static XGrid periodic(double lo, double hi, std::size_t n);
  /// n points from lo to hi inclusive.
  static XGrid closed(double lo, double hi, std::size_t n);
};

struct WavefunctionGrid {
  XGrid x;
  std::vector<Complex> psi;
  double norm = 0.0;         // trapezoid integral of |psi|^2
  double norm_before = 0.0;  // value prior to renormalize()
  bool renormalized = false;

  WavefunctionGrid() = default;
  WavefunctionGrid(const XGrid& grid, std::vector<Complex> values);

  void update_norm();
  /// Scales psi to unit norm; throws std::domain_error when psi vanishes.
  void renormalize();
};

/// Trapezoid integral of f sampled with spacing dx.
Complex trapezoid(const std::vector<Complex>& f, double dx);

/// <x|z> = pi^{-1/4} exp(-(x - q)^2 / 2 + i p (x - q/2)).
Complex coherent_position_amplitude(double x, const CoherentLabel& z);

WavefunctionGrid coherent_state(const XGrid& grid, const CoherentLabel& z);

/// psi(x) = sum_nm <x|z_nm> K(z_nm*) dq dp / 2pi.
WavefunctionGrid reconstruct(const PropagatorGrid& K, const XGrid& x_grid, unsigned workers = 1);

Complex inner_product(const WavefunctionGrid& a, const WavefunctionGrid& b);

/// |<a|b>| / (|a| |b|); throws std::invalid_argument on mismatched grids.
double fidelity(const WavefunctionGrid& a, const WavefunctionGrid& b);

struct OverlapResult {
  Complex value;
  bool decayed;  // false when |psi| exceeds 1e-8 at either grid edge
};

/// <z|psi> by trapezoid quadrature.
OverlapResult coherent_overlap_from_grid(const WavefunctionGrid& psi, const CoherentLabel& z);

}  // namespace civr
