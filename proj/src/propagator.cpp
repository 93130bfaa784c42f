#include "civr/propagator.hpp"

#include <cmath>
#include <limits>

#include "civr/parallel.hpp"

namespace civr {

namespace {

// exp() of anything below this underflows to zero in double precision.
constexpr double kUnderflow = -745.0;

double axis_weight(const Axis& ax, std::size_t i, Quadrature rule) {
  const double h = ax.spacing();
  if (rule == Quadrature::trapezoid && !ax.cell_centered && (i == 0 || i + 1 == ax.n))
    return 0.5 * h;
  return h;
}

bool usable(const TrajectoryRecord& rec) {
  return rec.valid && rec.M.vv != Complex(0.0);
}

// Part of the exponent that does not depend on the target label.
Complex base_exponent(const TrajectoryRecord& rec, const CoherentLabel& z0) {
  return kI * (rec.S + rec.I) - 0.5 * z0.norm_sq() - 0.5 * kI * rec.xi;
}

}  // namespace

void CivrParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("CivrParams: a must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("CivrParams: epsilon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("CivrParams: dt must be positive");
  grid1.validate("CivrParams.grid1");
}

std::size_t TrajectoryEnsemble::invalid_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.valid ? 0 : 1;
  return n;
}

TrajectoryEnsemble run_ensemble(const ScaledHamiltonian& h, const CoherentLabel& z0,
                                const PhaseGrid& grid1, double T, double dt,
                                unsigned workers) {
  grid1.validate("run_ensemble.grid1");
  TrajectoryEnsemble ens{z0, T, grid1, {}};
  ens.records.resize(grid1.size());
  parallel_for(grid1.size(), workers, [&](std::size_t k) {
    const CoherentLabel l1 = grid1.label(k);
    ens.records[k] = evolve(h, LaunchParams{z0.q, z0.p, l1.q, l1.p, T, dt});
  });
  return ens;
}

double node_weight(const PhaseGrid& grid, std::size_t k, Quadrature rule) {
  return axis_weight(grid.q, grid.qi(k), rule) * axis_weight(grid.p, grid.pj(k), rule);
}

std::optional<Complex> phi_exponent(const TrajectoryRecord& rec, const CoherentLabel& z0,
                                    const CoherentLabel& zf) {
  if (rec.M.vv == Complex(0.0)) return std::nullopt;
  const Complex d = zf.z_conj() - rec.vT;
  return kI * (rec.S + rec.I) + rec.uT * d + rec.M.uv / (2.0 * rec.M.vv) * d * d -
         0.5 * zf.norm_sq() - 0.5 * z0.norm_sq() - 0.5 * kI * rec.xi;
}

Contribution contribution(const TrajectoryRecord& rec, const CoherentLabel& z0,
                          const CoherentLabel& zf, double a, double c, double measure) {
  Contribution out;
  out.vT = rec.vT;
  const double mvv_abs = std::abs(rec.M.vv);
  out.alpha = a * mvv_abs;
  const auto phi = phi_exponent(rec, z0, zf);
  if (!rec.valid || !phi) {
    out.phi = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    return out;
  }
  out.phi = *phi;
  out.accepted = filter(out.phi, c);
  if (!out.accepted) return out;
  const double alpha2 = out.alpha * out.alpha;
  const Complex expo = out.phi - std::norm(rec.vT - zf.z_conj()) / alpha2;
  if (expo.real() > kUnderflow)
    out.weight = std::pow(mvv_abs, 1.5) * std::exp(expo) * measure / (2.0 * kPi * alpha2);
  return out;
}

PropagatorGrid smooth_K(const TrajectoryEnsemble& ens, const PhaseGrid& zf_grid, double a,
                        double c, Quadrature rule, unsigned workers) {
  if (!(a > 0.0)) throw std::invalid_argument("smooth_K: a must be positive");
  zf_grid.validate("smooth_K.zf_grid");

  struct Prepared {
    Complex base, uT, vT, curv;
    double inv_alpha2, pref;
  };
  std::vector<Prepared> prep;
  prep.reserve(ens.records.size());
  PropagatorGrid out{zf_grid, std::vector<Complex>(zf_grid.size()), ens.T, a, c,
                     CivrMode::smooth};
  for (std::size_t k = 0; k < ens.records.size(); ++k) {
    const auto& rec = ens.records[k];
    if (!rec.valid) {
      ++out.invalid_trajectories;
      continue;
    }
    if (rec.M.vv == Complex(0.0)) {
      ++out.singular_trajectories;
      continue;
    }
    const double mvv_abs = std::abs(rec.M.vv);
    const double alpha2 = a * a * mvv_abs * mvv_abs;
    prep.push_back({base_exponent(rec, ens.z0), rec.uT, rec.vT, rec.M.uv / (2.0 * rec.M.vv),
                    1.0 / alpha2,
                    std::pow(mvv_abs, 1.5) * node_weight(ens.grid1, k, rule) /
                        (2.0 * kPi * alpha2)});
  }

  std::vector<std::size_t> accepted(zf_grid.size(), 0);
  parallel_for(zf_grid.size(), workers, [&](std::size_t f) {
    const CoherentLabel zf = zf_grid.label(f);
    const Complex zfc = zf.z_conj();
    const double half_norm = 0.5 * zf.norm_sq();
    Complex sum(0.0);
    std::size_t acc = 0;
    for (const auto& t : prep) {
      const Complex d = zfc - t.vT;
      const Complex phi = t.base + t.uT * d + t.curv * d * d - half_norm;
      if (!(phi.real() <= c)) continue;
      ++acc;
      const Complex expo = phi - std::norm(d) * t.inv_alpha2;
      if (expo.real() > kUnderflow) sum += t.pref * std::exp(expo);
    }
    out.K[f] = sum;
    accepted[f] = acc;
  });
  for (auto n : accepted) out.accepted_pairs += n;
  out.rejected_pairs = prep.size() * zf_grid.size() - out.accepted_pairs;
  out.empty_accepted = out.accepted_pairs == 0;
  return out;
}

PropagatorGrid sudden_K(const TrajectoryEnsemble& ens, const PhaseGrid& zf_grid, double epsilon,
                        double c, Quadrature rule, unsigned workers) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("sudden_K: epsilon must be positive");
  zf_grid.validate("sudden_K.zf_grid");
  const double sq = epsilon * zf_grid.q.spacing();
  const double sp = epsilon * zf_grid.p.spacing();

  struct Prepared {
    Complex base;
    double q1T, p1T, pref;
  };
  std::vector<Prepared> prep;
  PropagatorGrid out{zf_grid, std::vector<Complex>(zf_grid.size()), ens.T, 0.0, c,
                     CivrMode::sudden};
  for (std::size_t k = 0; k < ens.records.size(); ++k) {
    const auto& rec = ens.records[k];
    if (!rec.valid) {
      ++out.invalid_trajectories;
      continue;
    }
    if (rec.M.vv == Complex(0.0)) {
      ++out.singular_trajectories;
      continue;
    }
    // delta^2(v(T) - zf*) = 2 pi delta(q1(T) - qf) delta(p1(T) - pf); the 2 pi
    // cancels the d^2 v1 / pi = dq1 dp1 / 2 pi measure.
    prep.push_back({base_exponent(rec, ens.z0), rec.end.Q1 + rec.end.Q2, rec.end.P1 - rec.end.P2,
                    std::pow(std::abs(rec.M.vv), 1.5) * node_weight(ens.grid1, k, rule) /
                        (2.0 * kPi * sq * sp)});
  }

  std::vector<std::size_t> accepted(zf_grid.size(), 0);
  parallel_for(zf_grid.size(), workers, [&](std::size_t f) {
    const CoherentLabel zf = zf_grid.label(f);
    const double half_norm = 0.5 * zf.norm_sq();
    Complex sum(0.0);
    std::size_t acc = 0;
    for (const auto& t : prep) {
      const Complex phi = t.base - half_norm;
      if (!(phi.real() <= c)) continue;
      ++acc;
      const double gq = (t.q1T - zf.q) / sq, gp = (t.p1T - zf.p) / sp;
      const Complex expo = phi - 0.5 * (gq * gq + gp * gp);
      if (expo.real() > kUnderflow) sum += t.pref * std::exp(expo);
    }
    out.K[f] = sum;
    accepted[f] = acc;
  });
  for (auto n : accepted) out.accepted_pairs += n;
  out.rejected_pairs = prep.size() * zf_grid.size() - out.accepted_pairs;
  out.empty_accepted = out.accepted_pairs == 0;
  return out;
}

PropagatorGrid propagate_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                           const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                           unsigned workers) {
  civr.validate();
  const auto ens = run_ensemble(h, z0, civr.grid1, T, civr.dt, workers);
  if (civr.mode == CivrMode::sudden)
    return sudden_K(ens, zf_grid, civr.epsilon, civr.c, civr.quadrature, workers);
  return smooth_K(ens, zf_grid, civr.a, civr.c, civr.quadrature, workers);
}

PropagatorGrid smooth_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                        const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                        unsigned workers) {
  CivrParams p = civr;
  p.mode = CivrMode::smooth;
  return propagate_K(h, z0, p, zf_grid, T, workers);
}

PropagatorGrid sudden_K(const ScaledHamiltonian& h, const CoherentLabel& z0,
                        const CivrParams& civr, const PhaseGrid& zf_grid, double T,
                        unsigned workers) {
  CivrParams p = civr;
  p.mode = CivrMode::sudden;
  return propagate_K(h, z0, p, zf_grid, T, workers);
}

LambdaCheck lambda_check(const TrajectoryRecord& rec, const ScaledHamiltonian& h,
                         const LaunchParams& lp, double eps) {
  auto endpoint = [&](double q1, double p1) {
    LaunchParams l = lp;
    l.q1 = q1;
    l.p1 = p1;
    const auto x = flow(h, initial_conditions(l), l.T, l.dt);
    return Eigen::Vector2d(x.Q1 + x.Q2, x.P1 - x.P2);
  };
  LambdaCheck out;
  out.Lambda.col(0) = (endpoint(lp.q1 + eps, lp.p1) - endpoint(lp.q1 - eps, lp.p1)) / (2 * eps);
  out.Lambda.col(1) = (endpoint(lp.q1, lp.p1 + eps) - endpoint(lp.q1, lp.p1 - eps)) / (2 * eps);
  out.det_lambda = out.Lambda.determinant();
  out.mvv_sq = std::norm(rec.M.vv);
  return out;
}

ContributionMap contribution_map(const TrajectoryEnsemble& ens, double c) {
  ContributionMap map{ens.grid1, std::vector<std::uint8_t>(ens.records.size(), 0),
                      std::vector<double>(ens.records.size(),
                                          std::numeric_limits<double>::quiet_NaN())};
  for (std::size_t k = 0; k < ens.records.size(); ++k) {
    const auto& rec = ens.records[k];
    if (!usable(rec)) continue;
    const auto phi = phi_exponent(rec, ens.z0, CoherentLabel::from_conj(rec.vT));
    map.re_phi[k] = phi->real();
    map.accepted[k] = filter(*phi, c) ? 1 : 0;
  }
  return map;
}

ContributionMap contribution_map(const ScaledHamiltonian& h, const CoherentLabel& z0,
                                 const CivrParams& civr, double T, unsigned workers) {
  civr.validate();
  return contribution_map(run_ensemble(h, z0, civr.grid1, T, civr.dt, workers), civr.c);
}

}  // namespace civr
