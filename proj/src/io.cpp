#include "civr/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace civr::io {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_propagator_csv(std::ostream& os, const PropagatorGrid& K) {
  os << "qf,pf,re_K,im_K\n";
  for (std::size_t k = 0; k < K.K.size(); ++k) {
    const auto l = K.zf.label(k);
    os << fmt(l.q) << ',' << fmt(l.p) << ',' << fmt(K.K[k].real()) << ',' << fmt(K.K[k].imag())
       << '\n';
  }
}

void write_wavefunction_csv(std::ostream& os, const WavefunctionGrid& psi) {
  os << "x,re_psi,im_psi,abs2\n";
  for (std::size_t i = 0; i < psi.psi.size(); ++i) {
    const Complex v = psi.psi[i];
    os << fmt(psi.x.at(i)) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ','
       << fmt(std::norm(v)) << '\n';
  }
}

void write_contribution_csv(std::ostream& os, const ContributionMap& map) {
  os << "q1,p1,accepted,re_phi\n";
  for (std::size_t k = 0; k < map.accepted.size(); ++k) {
    const auto l = map.grid1.label(k);
    os << fmt(l.q) << ',' << fmt(l.p) << ',' << int(map.accepted[k]) << ','
       << fmt(map.re_phi[k]) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  os << "t,Q1,Q2,P1,P2,re_S,im_S,re_Mvv,im_Mvv,xi\n";
  for (const auto& r : rows) {
    os << fmt(r.t) << ',' << fmt(r.x.Q1) << ',' << fmt(r.x.Q2) << ',' << fmt(r.x.P1) << ','
       << fmt(r.x.P2) << ',' << fmt(r.S.real()) << ',' << fmt(r.S.imag()) << ','
       << fmt(r.Mvv.real()) << ',' << fmt(r.Mvv.imag()) << ',' << fmt(r.xi) << '\n';
  }
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace civr::io
