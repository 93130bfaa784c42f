#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "civr/types.hpp"

namespace civr {

/// Uniform 1-D axis. Endpoint placement includes lo and hi; cell-centered
/// placement puts n points at the midpoints of n equal cells of [lo, hi].
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;
  bool cell_centered = false;

  void validate(const char* what) const {
    if (!(hi > lo)) throw std::invalid_argument(std::string(what) + ": hi must exceed lo");
    if (n < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 points");
  }
  double spacing() const {
    return cell_centered ? (hi - lo) / static_cast<double>(n)
                         : (hi - lo) / static_cast<double>(n - 1);
  }
  double at(std::size_t i) const {
    const double h = spacing();
    return cell_centered ? lo + (static_cast<double>(i) + 0.5) * h
                         : lo + static_cast<double>(i) * h;
  }
};

/// Rectangular grid over (q, p), flattened q-major: k = i * p.n + j.
struct PhaseGrid {
  Axis q;
  Axis p;

  std::size_t size() const { return q.n * p.n; }
  std::size_t qi(std::size_t k) const { return k / p.n; }
  std::size_t pj(std::size_t k) const { return k % p.n; }
  CoherentLabel label(std::size_t k) const { return {q.at(qi(k)), p.at(pj(k))}; }
  double cell_area() const { return q.spacing() * p.spacing(); }
  void validate(const char* what) const {
    q.validate(what);
    p.validate(what);
  }
};

}  // namespace civr
