#include "civr/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "civr/parallel.hpp"

namespace civr {

bool XGrid::same_as(const XGrid& o) const {
  const double tol = 1e-12 * std::max({1.0, std::abs(x0), std::abs(dx)});
  return n == o.n && std::abs(x0 - o.x0) <= tol && std::abs(dx - o.dx) <= tol;
}

XGrid XGrid::periodic(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw std::invalid_argument("XGrid: need hi > lo and n >= 2");
  return {lo, (hi - lo) / static_cast<double>(n), n};
}

XGrid XGrid::closed(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw std::invalid_argument("XGrid: need hi > lo and n >= 2");
  return {lo, (hi - lo) / static_cast<double>(n - 1), n};
}

WavefunctionGrid::WavefunctionGrid(const XGrid& grid, std::vector<Complex> values)
    : x(grid), psi(std::move(values)) {
  if (psi.size() != x.n) throw std::invalid_argument("WavefunctionGrid: size mismatch");
  update_norm();
  norm_before = norm;
}

void WavefunctionGrid::update_norm() {
  std::vector<Complex> dens(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) dens[i] = std::norm(psi[i]);
  norm = trapezoid(dens, x.dx).real();
}

void WavefunctionGrid::renormalize() {
  if (!(norm > 0.0)) throw std::domain_error("renormalize: wavefunction has zero norm");
  norm_before = norm;
  const double s = 1.0 / std::sqrt(norm);
  for (auto& v : psi) v *= s;
  update_norm();
  renormalized = true;
}

Complex trapezoid(const std::vector<Complex>& f, double dx) {
  if (f.empty()) return 0.0;
  Complex sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * dx;
}

Complex coherent_position_amplitude(double x, const CoherentLabel& z) {
  static const double norm = std::pow(kPi, -0.25);
  const double d = x - z.q;
  return norm * std::exp(Complex(-0.5 * d * d, z.p * (x - 0.5 * z.q)));
}

WavefunctionGrid coherent_state(const XGrid& grid, const CoherentLabel& z) {
  std::vector<Complex> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = coherent_position_amplitude(grid.at(i), z);
  return {grid, std::move(v)};
}

WavefunctionGrid reconstruct(const PropagatorGrid& K, const XGrid& x_grid, unsigned workers) {
  const double measure = K.zf.cell_area() / (2.0 * kPi);
  std::vector<Complex> psi(x_grid.n);
  parallel_for(x_grid.n, workers, [&](std::size_t i) {
    const double x = x_grid.at(i);
    Complex sum(0.0);
    for (std::size_t k = 0; k < K.K.size(); ++k) {
      if (K.K[k] == Complex(0.0)) continue;
      sum += coherent_position_amplitude(x, K.zf.label(k)) * K.K[k];
    }
    psi[i] = sum * measure;
  });
  return {x_grid, std::move(psi)};
}

Complex inner_product(const WavefunctionGrid& a, const WavefunctionGrid& b) {
  if (!a.x.same_as(b.x)) throw std::invalid_argument("inner_product: grids differ");
  std::vector<Complex> f(a.psi.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::conj(a.psi[i]) * b.psi[i];
  return trapezoid(f, a.x.dx);
}

double fidelity(const WavefunctionGrid& a, const WavefunctionGrid& b) {
  if (!a.x.same_as(b.x)) throw std::invalid_argument("fidelity: grids differ");
  const double den = std::sqrt(a.norm * b.norm);
  if (!(den > 0.0)) return 0.0;
  return std::min(1.0, std::abs(inner_product(a, b)) / den);
}

OverlapResult coherent_overlap_from_grid(const WavefunctionGrid& psi, const CoherentLabel& z) {
  std::vector<Complex> f(psi.psi.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::conj(coherent_position_amplitude(psi.x.at(i), z)) * psi.psi[i];
  const bool decayed = psi.psi.empty() ||
                       (std::abs(psi.psi.front()) <= 1e-8 && std::abs(psi.psi.back()) <= 1e-8);
  return {trapezoid(f, psi.x.dx), decayed};
}

}  // namespace civr
