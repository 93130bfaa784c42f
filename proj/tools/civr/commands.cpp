#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "civr/io.hpp"

namespace civr::cli {

namespace {

using Json = nlohmann::ordered_json;

double relative(double drift, double h0) { return drift / std::max(1.0, std::abs(h0)); }

Json grid_json(const PhaseGrid& g) {
  return {{"q_min", g.q.lo}, {"q_max", g.q.hi}, {"n_q", g.q.n},
          {"p_min", g.p.lo}, {"p_max", g.p.hi}, {"n_p", g.p.n}};
}

std::string trajectories_csv(const TrajectoryEnsemble& ens) {
  std::ostringstream os;
  os << "q1,p1,valid,steps,re_uT,im_uT,re_vT,im_vT,re_S,im_S,re_I,im_I,re_Mvv,im_Mvv,xi,H1_drift,H2_drift\n";
  for (std::size_t k = 0; k < ens.records.size(); ++k) {
    const auto& r = ens.records[k];
    const auto l = ens.grid1.label(k);
    os << io::fmt(l.q) << ',' << io::fmt(l.p) << ',' << (r.valid ? 1 : 0) << ',' << r.steps;
    for (Complex v : {r.uT, r.vT, r.S, r.I, r.M.vv}) os << ',' << io::fmt(v.real()) << ',' << io::fmt(v.imag());
    os << ',' << io::fmt(r.xi) << ',' << io::fmt(r.H1_drift) << ',' << io::fmt(r.H2_drift) << '\n';
  }
  return os.str();
}

void write_set(const std::string& dir, const FileSet& files) {
  for (const auto& [name, text] : files) io::write_file(dir + "/" + name, text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_timing(const std::string& dir, double seconds, unsigned workers) {
  Json j{{"wall_seconds", seconds}, {"workers", workers}};
  io::write_file(dir + "/timing.json", j.dump(2) + "\n");
}

bool warn_if_no_times(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.times.empty()) return false;
  log << "warning: no propagation times configured; nothing to do\n";
  return true;
}

}  // namespace

TimeRun run_time(const RunConfig& cfg, std::size_t i, unsigned workers, double a_override) {
  const auto h = build_scaled(cfg.system);
  auto ens = run_ensemble(h, cfg.z0(), cfg.launch_grid, cfg.times.at(i), cfg.dt, workers);
  return run_time(cfg, i, std::move(ens), workers, a_override);
}

TimeRun run_time(const RunConfig& cfg, std::size_t i, TrajectoryEnsemble ensemble, unsigned workers,
                 double a_override) {
  TimeRun run;
  run.index = i;
  run.T = cfg.times.at(i);
  run.a = a_override > 0.0 ? a_override : cfg.a_at(i);
  run.c = cfg.c_at(i);
  run.ensemble = std::move(ensemble);

  run.K = cfg.mode == CivrMode::smooth
              ? smooth_K(run.ensemble, cfg.target_grid, run.a, run.c, cfg.quadrature, workers)
              : sudden_K(run.ensemble, cfg.target_grid, cfg.epsilon, run.c, cfg.quadrature, workers);
  run.map = contribution_map(run.ensemble, run.c);

  run.psi = reconstruct(run.K, cfg.x_grid(), workers);
  run.norm_before = run.psi.norm;
  if (cfg.renormalize && run.psi.norm > 0.0) run.psi.renormalize();

  const auto& recs = run.ensemble.records;
  std::size_t n_valid = 0;
  double sum = 0.0;
  for (const auto& r : recs) {
    if (!r.valid) continue;
    ++n_valid;
    const double d2 = relative(r.H2_drift, r.H2_0);
    run.h1_drift_max = std::max(run.h1_drift_max, relative(r.H1_drift, r.H1_0));
    run.h2_drift_max = std::max(run.h2_drift_max, d2);
    sum += d2;
  }
  run.h2_drift_mean = n_valid ? sum / static_cast<double>(n_valid) : 0.0;
  run.invalid_fraction =
      recs.empty() ? 0.0 : static_cast<double>(recs.size() - n_valid) / static_cast<double>(recs.size());
  return run;
}

std::string numerical_problem(const RunConfig& cfg, const TimeRun& run) {
  std::ostringstream os;
  if (run.invalid_fraction > cfg.max_invalid_fraction)
    os << "invalid trajectory fraction " << run.invalid_fraction << " exceeds "
       << cfg.max_invalid_fraction << " (energy drift cap)";
  else if (run.K.empty_accepted)
    os << "no trajectory passed the cutoff filter";
  else if (!(run.norm_before > 0.0))
    os << "reconstructed wavefunction vanishes";
  return os.str();
}

std::string time_dir(double T) { return "T_" + io::fmt(T); }

FileSet propagate_files(const RunConfig& cfg, const TimeRun& run) {
  FileSet files;
  std::ostringstream k, w, m;
  io::write_propagator_csv(k, run.K);
  io::write_wavefunction_csv(w, run.psi);
  io::write_contribution_csv(m, run.map);
  files.emplace_back("propagator.csv", k.str());
  files.emplace_back("wavefunction.csv", w.str());
  files.emplace_back("contributions.csv", m.str());
  if (cfg.dump_trajectories) files.emplace_back("trajectories.csv", trajectories_csv(run.ensemble));

  std::size_t accepted_traj = 0;
  for (auto a : run.map.accepted) accepted_traj += a;
  Json files_list = Json::array();
  for (const auto& f : files) files_list.push_back(f.first);

  const Json manifest{
      {"program", "civr"},
      {"T", run.T},
      {"time_index", run.index},
      {"parameters",
       {{"Omega", cfg.system.Omega},
        {"lambda", cfg.system.lambda},
        {"b", cfg.system.scaling.b},
        {"hbar", cfg.system.scaling.hbar},
        {"q0", cfg.q0},
        {"p0", cfg.p0},
        {"a", run.a},
        {"c", run.c},
        {"mode", to_string(cfg.mode)},
        {"epsilon", cfg.epsilon},
        {"quadrature", to_string(cfg.quadrature)},
        {"dt", cfg.dt},
        {"launch_grid", grid_json(cfg.launch_grid)},
        {"target_grid", grid_json(cfg.target_grid)},
        {"position_grid", {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"n_x", cfg.n_x}}},
        {"renormalize", cfg.renormalize},
        {"max_invalid_fraction", cfg.max_invalid_fraction}}},
      {"counts",
       {{"trajectories", run.ensemble.records.size()},
        {"invalid_trajectories", run.K.invalid_trajectories},
        {"singular_trajectories", run.K.singular_trajectories},
        {"accepted_trajectories", accepted_traj},
        {"accepted_pairs", run.K.accepted_pairs},
        {"rejected_pairs", run.K.rejected_pairs}}},
      {"drift",
       {{"h1_relative_max", run.h1_drift_max},
        {"h2_relative_max", run.h2_drift_max},
        {"h2_relative_mean", run.h2_drift_mean}}},
      {"wavefunction",
       {{"norm_before_renormalization", run.norm_before}, {"renormalized", run.psi.renormalized}}},
      {"files", files_list},
      {"config", to_ini(cfg)},
  };
  files.emplace_back("manifest.json", manifest.dump(2) + "\n");
  return files;
}

Comparison compare(const RunConfig& cfg, const TimeRun& run) {
  const auto ref_cfg = cfg.reference_for(run.T);
  const auto psi0 = coherent_state(ref_cfg.grid(), cfg.z0());
  auto ref = split_operator_evolve(cfg.system, psi0, ref_cfg);

  Comparison out;
  out.T = run.T;
  out.a = run.a;
  out.fidelity = fidelity(run.psi, ref.psi);
  out.norm_before = run.norm_before;
  std::size_t acc = 0;
  for (auto a : run.map.accepted) acc += a;
  out.accepted_fraction =
      run.map.accepted.empty() ? 0.0 : static_cast<double>(acc) / static_cast<double>(run.map.accepted.size());
  out.reference_edge_ok = ref.edge_ok;
  out.reference = std::move(ref.psi);
  return out;
}

ScanResult scan_width(const RunConfig& cfg, std::size_t i, unsigned workers) {
  const auto h = build_scaled(cfg.system);
  const double T = cfg.times.at(i);
  const auto ens = run_ensemble(h, cfg.z0(), cfg.launch_grid, T, cfg.dt, workers);

  const auto ref_cfg = cfg.reference_for(T);
  const auto ref = split_operator_evolve(cfg.system, coherent_state(ref_cfg.grid(), cfg.z0()), ref_cfg);

  ScanResult scan;
  scan.T = T;
  for (double a : cfg.scan.values()) {
    const auto run = run_time(cfg, i, ens, workers, a);
    std::size_t acc = 0;
    for (auto f : run.map.accepted) acc += f;
    const double frac = static_cast<double>(acc) / static_cast<double>(run.map.accepted.size());
    scan.rows.push_back({a, fidelity(run.psi, ref.psi), run.norm_before, frac});
  }
  for (std::size_t r = 1; r < scan.rows.size(); ++r)
    if (scan.rows[r].fidelity > scan.rows[scan.best].fidelity) scan.best = r;
  return scan;
}

std::string scan_csv(const ScanResult& scan) {
  std::ostringstream os;
  os << "a,fidelity,norm,accepted_fraction,best\n";
  for (std::size_t r = 0; r < scan.rows.size(); ++r) {
    const auto& row = scan.rows[r];
    os << io::fmt(row.a) << ',' << io::fmt(row.fidelity) << ',' << io::fmt(row.norm) << ','
       << io::fmt(row.accepted_fraction) << ',' << (r == scan.best ? 1 : 0) << '\n';
  }
  return os.str();
}

int cmd_propagate(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log) {
  if (warn_if_no_times(cfg, log)) return kOk;
  int code = kOk;
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = run_time(cfg, i, workers);
    const std::string dir = out_dir + "/" + time_dir(run.T);
    write_set(dir, propagate_files(cfg, run));
    write_timing(dir, seconds_since(t0), workers);
    log << "T = " << run.T << ": a = " << run.a << ", c = " << run.c
        << ", accepted pairs = " << run.K.accepted_pairs
        << ", invalid trajectories = " << run.K.invalid_trajectories
        << ", norm before renormalization = " << run.norm_before << '\n';
    if (const auto problem = numerical_problem(cfg, run); !problem.empty()) {
      log << "error: T = " << run.T << ": " << problem << '\n';
      code = kNumericalFailure;
    }
  }
  return code;
}

int cmd_compare(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log) {
  if (warn_if_no_times(cfg, log)) return kOk;
  int code = kOk;
  Json report = Json::array();
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = run_time(cfg, i, workers);
    const auto cmp = compare(cfg, run);
    const std::string dir = out_dir + "/" + time_dir(run.T);
    auto files = propagate_files(cfg, run);
    std::ostringstream ref;
    io::write_wavefunction_csv(ref, cmp.reference);
    files.emplace_back("reference.csv", ref.str());
    write_set(dir, files);
    write_timing(dir, seconds_since(t0), workers);
    report.push_back({{"T", cmp.T},
                      {"a", cmp.a},
                      {"c", run.c},
                      {"fidelity", cmp.fidelity},
                      {"norm_before_renormalization", cmp.norm_before},
                      {"accepted_trajectory_fraction", cmp.accepted_fraction},
                      {"reference_edge_ok", cmp.reference_edge_ok}});
    log << "T = " << cmp.T << ": fidelity = " << cmp.fidelity << ", norm before renormalization = "
        << cmp.norm_before << ", accepted fraction = " << cmp.accepted_fraction << '\n';
    if (!cmp.reference_edge_ok) log << "warning: reference wavefunction reaches the box edge\n";
    if (const auto problem = numerical_problem(cfg, run); !problem.empty()) {
      log << "error: T = " << run.T << ": " << problem << '\n';
      code = kNumericalFailure;
    }
  }
  io::write_file(out_dir + "/comparison.json", Json{{"results", report}, {"config", to_ini(cfg)}}.dump(2) + "\n");
  return code;
}

int cmd_scan_width(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log) {
  if (warn_if_no_times(cfg, log)) return kOk;
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    const auto scan = scan_width(cfg, i, workers);
    io::write_file(out_dir + "/" + time_dir(scan.T) + "/scan_width.csv", scan_csv(scan));
    const auto& best = scan.rows[scan.best];
    log << "T = " << scan.T << ": best a = " << best.a << " (fidelity " << best.fidelity << ")\n";
  }
  return kOk;
}

int cmd_trajectories(const RunConfig& cfg, const std::string& out_dir, double q1, double p1,
                     std::size_t stride, std::ostream& log) {
  if (warn_if_no_times(cfg, log)) return kOk;
  if (stride == 0) stride = 1;
  const auto h = build_scaled(cfg.system);
  const auto z0 = cfg.z0();
  const auto z1 = cfg.system.scaling.scale(q1, p1);
  int code = kOk;
  for (double T : cfg.times) {
    const LaunchParams lp{z0.q, z0.p, z1.q, z1.p, T, cfg.dt};
    const auto x0 = initial_conditions(lp);
    const auto c0 = from_double(x0);
    std::vector<io::TrajectoryRow> rows{{0.0, x0, -kI * c0.u() * c0.v(), Complex(1.0), 0.0}};
    const std::size_t last = step_count(T, cfg.dt);
    std::size_t step = 0;
    const auto rec = evolve(h, lp, [&](const TrajectorySample& s) {
      ++step;
      if (step % stride == 0 || step == last) rows.push_back({s.t, s.x, s.S, s.Mvv, s.xi});
    });
    std::ostringstream os;
    io::write_trajectory_csv(os, rows);
    io::write_file(out_dir + "/" + time_dir(T) + "/trajectory.csv", os.str());
    log << "T = " << T << ": " << (rec.valid ? "valid" : "invalid") << ", steps = " << rec.steps << '\n';
    if (!rec.valid) code = kNumericalFailure;
  }
  return code;
}

int cmd_eigen(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const auto s = ground_energy_check(cfg.system);
  const Json j{{"E0", s.E0}, {"E1", s.E1}, {"E2", s.E2}};
  log << j.dump() << '\n';
  if (!out_dir.empty()) io::write_file(out_dir + "/eigen.json", j.dump(2) + "\n");
  return kOk;
}

}  // namespace civr::cli
