#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "civr/propagator.hpp"
#include "civr/reconstruction.hpp"

namespace civr::io {

/// Shortest decimal text that reads back to exactly `v`.
std::string fmt(double v);

/// qf, pf, re_K, im_K
void write_propagator_csv(std::ostream& os, const PropagatorGrid& K);
/// x, re_psi, im_psi, abs2
void write_wavefunction_csv(std::ostream& os, const WavefunctionGrid& psi);
/// q1, p1, accepted, re_phi
void write_contribution_csv(std::ostream& os, const ContributionMap& map);

struct TrajectoryRow {
  double t;
  DoublePhasePoint x;
  Complex S;
  Complex Mvv;
  double xi;
};

/// t, Q1, Q2, P1, P2, re_S, im_S, re_Mvv, im_Mvv, xi
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& text);

}  // namespace civr::io
