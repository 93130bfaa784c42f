#include "civr/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace civr {

namespace {

using CVec = std::vector<Complex>;

std::vector<double> wave_numbers(const XGrid& grid) {
  const std::size_t n = grid.n;
  const double dk = 2.0 * kPi / (static_cast<double>(n) * grid.dx);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double jj = j < n / 2 ? static_cast<double>(j)
                                : static_cast<double>(j) - static_cast<double>(n);
    k[j] = dk * jj;
  }
  return k;
}

std::vector<double> bare_potential(const ScaledHamiltonian& h, const XGrid& grid) {
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = potential(h, grid.at(i));
  return v;
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Strang step exp(-V s/2) exp(-K s) exp(-V s/2) with precomputed factors.
class SplitStepper {
 public:
  SplitStepper(const CVec& half_v, const CVec& kin) : half_v_(half_v), kin_(kin) {}

  void step(CVec& psi) {
    const std::size_t n = psi.size();
    for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v_[i];
    fft_.fwd(spec_, psi);
    for (std::size_t i = 0; i < n; ++i) spec_[i] *= kin_[i];
    fft_.inv(psi, spec_);
    for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v_[i];
  }

 private:
  const CVec& half_v_;
  const CVec& kin_;
  Eigen::FFT<double> fft_;
  CVec spec_;
};

double dot_real(const CVec& a, const CVec& b, double dx) {
  Complex s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return (s * dx).real();
}

void project_out(CVec& psi, const std::vector<CVec>& lower, double dx) {
  for (const auto& phi : lower) {
    Complex s(0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::conj(phi[i]) * psi[i];
    s *= dx;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= s * phi[i];
  }
}

void normalize(CVec& psi, double dx) {
  const double nrm = std::sqrt(dot_real(psi, psi, dx));
  for (auto& v : psi) v /= nrm;
}

}  // namespace

Complex harmonic_exact_K(const CoherentLabel& z0, const CoherentLabel& zf, double T) {
  return std::exp(-0.5 * kI * T + zf.z_conj() * z0.z() * std::exp(-kI * T) -
                  0.5 * zf.norm_sq() - 0.5 * z0.norm_sq());
}

WavefunctionGrid harmonic_exact_state(const XGrid& grid, const CoherentLabel& z0, double T) {
  // |z0> -> e^{-iT/2} |z0 e^{-iT}>
  const Complex zt = z0.z() * std::exp(-kI * T);
  const CoherentLabel lt{kSqrt2 * zt.real(), kSqrt2 * zt.imag()};
  const Complex phase = std::exp(-0.5 * kI * T);
  std::vector<Complex> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    v[i] = phase * coherent_position_amplitude(grid.at(i), lt);
  return {grid, std::move(v)};
}

void SplitOpConfig::validate() const {
  if (!(x_max > x_min)) throw std::invalid_argument("SplitOpConfig: x_max must exceed x_min");
  if (!is_power_of_two(n_x)) throw std::invalid_argument("SplitOpConfig: n_x must be a power of two");
  if (!(dt > 0.0)) throw std::invalid_argument("SplitOpConfig: dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("SplitOpConfig: T must be non-negative");
}

SplitOpResult split_operator_evolve(const QuarticSpec& spec, const WavefunctionGrid& psi0,
                                    const SplitOpConfig& cfg) {
  cfg.validate();
  const XGrid grid = cfg.grid();
  if (!psi0.x.same_as(grid))
    throw std::invalid_argument("split_operator_evolve: psi0 grid differs from config grid");
  const ScaledHamiltonian h = build_bare(spec);

  const std::size_t steps = cfg.T > 0.0 ? static_cast<std::size_t>(std::ceil(cfg.T / cfg.dt - 1e-9)) : 0;
  const double s = steps > 0 ? cfg.T / static_cast<double>(steps) : 0.0;
  const auto V = bare_potential(h, grid);
  const auto k = wave_numbers(grid);
  CVec half_v(grid.n), kin(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    half_v[i] = std::exp(-0.5 * kI * s * V[i]);
    kin[i] = std::exp(-kI * s * 0.5 * h.omega * k[i] * k[i]);
  }

  SplitOpResult out;
  CVec psi = psi0.psi;
  SplitStepper stepper(half_v, kin);
  auto edge = [&] { return std::max(std::abs(psi.front()), std::abs(psi.back())); };
  out.edge_max = edge();
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.step(psi);
    out.edge_max = std::max(out.edge_max, edge());
  }
  out.edge_ok = out.edge_max < 1e-10;
  out.psi = WavefunctionGrid(grid, std::move(psi));
  return out;
}

Spectrum ground_energy_check(const QuarticSpec& spec, double tau_step) {
  const ScaledHamiltonian h = build_bare(spec);
  const XGrid grid = XGrid::periodic(-10.0, 10.0, 256);
  const auto V = bare_potential(h, grid);
  const auto k = wave_numbers(grid);
  CVec half_v(grid.n), kin(grid.n), kin_energy(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    half_v[i] = std::exp(-0.5 * tau_step * V[i]);
    kin_energy[i] = 0.5 * h.omega * k[i] * k[i];
    kin[i] = std::exp(-tau_step * kin_energy[i].real());
  }
  Eigen::FFT<double> fft;

  auto energy = [&](const CVec& psi) {
    CVec spec_psi, t_psi;
    fft.fwd(spec_psi, psi);
    for (std::size_t i = 0; i < grid.n; ++i) spec_psi[i] *= kin_energy[i];
    fft.inv(t_psi, spec_psi);
    Complex e(0.0);
    for (std::size_t i = 0; i < grid.n; ++i) e += std::conj(psi[i]) * (t_psi[i] + V[i] * psi[i]);
    return (e * grid.dx).real() / dot_real(psi, psi, grid.dx);
  };

  std::vector<CVec> states;
  std::vector<double> energies;
  SplitStepper stepper(half_v, kin);
  constexpr std::size_t kBlock = 200, kMaxBlocks = 2000;
  for (int level = 0; level < 3; ++level) {
    CVec psi(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double x = grid.at(i);
      psi[i] = std::pow(x, level) * std::exp(-0.5 * x * x) + 1e-3 * std::exp(-x * x);
    }
    project_out(psi, states, grid.dx);
    normalize(psi, grid.dx);
    double e_prev = energy(psi);
    bool converged = false;
    for (std::size_t b = 0; b < kMaxBlocks && !converged; ++b) {
      for (std::size_t n = 0; n < kBlock; ++n) {
        stepper.step(psi);
        project_out(psi, states, grid.dx);
        normalize(psi, grid.dx);
      }
      const double e = energy(psi);
      converged = std::abs(e - e_prev) < 1e-12 * std::max(1.0, std::abs(e));
      e_prev = e;
    }
    if (!converged) throw std::runtime_error("ground_energy_check: relaxation did not converge");
    states.push_back(psi);
    energies.push_back(e_prev * spec.scaling.hbar);
  }
  return {energies[0], energies[1], energies[2]};
}

}  // namespace civr
