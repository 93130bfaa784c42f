#include <doctest.h>

#include <limits>

#include "civr/oracles.hpp"
#include "civr/propagator.hpp"
#include "test_util.hpp"

using namespace civr;

namespace {

const CoherentLabel kZ0{0.0, -2.0};

// Paper-sized reconstruction grid.
PhaseGrid zf_grid() { return {{-4.0, 4.0, 40}, {-6.0, 6.0, 60}}; }

// 30 x 40 launch grid centered on the packet, wide enough that the smoothing
// Gaussian of every target label in zf_grid() fits inside it.
PhaseGrid wide_grid1(std::size_t nq = 30, std::size_t np = 40) {
  return {{kZ0.q - 9.5, kZ0.q + 9.5, nq}, {kZ0.p - 9.5, kZ0.p + 9.5, np}};
}

double max_err_vs_exact(const PropagatorGrid& K, const CoherentLabel& z0) {
  double err = 0.0;
  for (std::size_t k = 0; k < K.K.size(); ++k)
    err = std::max(err, std::abs(K.K[k] - harmonic_exact_K(z0, K.zf.label(k), K.T)));
  return err;
}

}  // namespace

TEST_CASE("phi vanishes for the zero-time real launch at its own label") {
  const auto rec = evolve(test::quartic(), {0, -2, 0, -2, 0.0, 1e-3});
  const auto phi = phi_exponent(rec, kZ0, kZ0);
  REQUIRE(phi);
  CHECK(std::abs(*phi) < 1e-14);
}

TEST_CASE("phi equals the log of the exact harmonic kernel") {
  const auto ho = test::harmonic();
  // Central trajectory after a full period, zf = z0: phi = -i pi.
  const auto rec = evolve(ho, {0, -2, 0, -2, 2 * kPi, 1e-3});
  const auto phi = phi_exponent(rec, kZ0, kZ0);
  REQUIRE(phi);
  CHECK(std::abs(*phi - Complex(0.0, -kPi)) < 1e-9);

  test::Rng rng(20);
  for (int i = 0; i < 30; ++i) {
    const double T = rng.uniform(0.1, 3.0);
    const auto r = evolve(ho, {kZ0.q, kZ0.p, rng.uniform(-3, 3), rng.uniform(-6, 2), T, 1e-3});
    for (int j = 0; j < 10; ++j) {
      const CoherentLabel zf{rng.uniform(-4, 4), rng.uniform(-6, 6)};
      const Complex p = *phi_exponent(r, kZ0, zf);
      CHECK(p.real() <= 1e-9);
      CHECK(std::abs(std::exp(p) - harmonic_exact_K(kZ0, zf, T)) < 1e-9);
    }
  }
}

TEST_CASE("phi reports a singular tangent block") {
  TrajectoryRecord rec;
  rec.M.vv = 0.0;
  CHECK_FALSE(phi_exponent(rec, kZ0, kZ0).has_value());
  const auto c = contribution(rec, kZ0, kZ0, 1.0, 1.0, 0.1);
  CHECK_FALSE(c.accepted);
  CHECK(c.weight == Complex(0.0));
}

TEST_CASE("cutoff filter") {
  CHECK(filter({-3.0, 0.0}, 1.0));
  CHECK(filter({2.4, 1.0}, 2.5));
  CHECK_FALSE(filter({2.4, 1.0}, 1.0));
  CHECK_FALSE(filter({std::numeric_limits<double>::quiet_NaN(), 0.0}, 1.0));
}

TEST_CASE("contribution carries alpha = a |M_vv| and vanishes as M_vv -> 0") {
  auto rec = evolve(test::quartic(), {0, -2, 0.4, -1.6, 1.0, 1e-3});
  const auto c = contribution(rec, kZ0, {0.1, -1.5}, 1.5, 2.5, 0.04);
  CHECK(c.alpha == doctest::Approx(1.5 * std::abs(rec.M.vv)).epsilon(1e-15));
  CHECK(c.accepted);
  CHECK(std::isfinite(std::abs(c.weight)));

  // Synthetic record with shrinking |M_vv| landing away from the target:
  // bounded by |M_vv|^{3/2} e^{Re phi} measure / (2 pi alpha^2), and -> 0.
  rec.vT = CoherentLabel{0.4, -1.3}.z_conj();
  double prev = std::numeric_limits<double>::infinity();
  for (double s : {0.1, 0.03, 0.01, 0.003}) {
    rec.M.vv = s * std::exp(kI * 0.3);
    const auto ci = contribution(rec, kZ0, {0.1, -1.5}, 1.5, 1e9, 0.04);
    const double bound = std::pow(s, 1.5) * std::exp(ci.phi.real()) * 0.04 /
                         (2 * kPi * ci.alpha * ci.alpha);
    CHECK(std::abs(ci.weight) <= bound * (1 + 1e-12));
    CHECK(std::abs(ci.weight) < prev);
    prev = std::abs(ci.weight);
  }
  CHECK(prev < 1e-100);
}

TEST_CASE("smooth CIVR is exact for the harmonic oscillator") {
  const auto ho = test::harmonic();
  for (double T : {0.5, 1.0}) {
    const auto ens = run_ensemble(ho, kZ0, wide_grid1(), T, 1e-3);
    for (double a : {0.5, 1.0, 2.0}) {
      const auto K = smooth_K(ens, zf_grid(), a, 0.0);
      CHECK(max_err_vs_exact(K, kZ0) <= 1e-3);
      CHECK(K.rejected_pairs == 0);
    }
  }
}

TEST_CASE("smooth CIVR at zero time reproduces the coherent-state overlap") {
  const PhaseGrid grid1{{-10.0, 10.0, 51}, {-12.0, 12.0, 61}};
  const auto ens = run_ensemble(test::quartic(), kZ0, grid1, 0.0, 1e-3);
  const auto K = smooth_K(ens, zf_grid(), 1.0, 1.0);
  CHECK(max_err_vs_exact(K, kZ0) < 1e-6);
}

TEST_CASE("grid refinement of the launch grid leaves K unchanged") {
  const auto ho = test::harmonic();
  const auto coarse = smooth_K(run_ensemble(ho, kZ0, wide_grid1(30, 40), 1.0, 1e-3), zf_grid(), 1.0, 1.0);
  const auto fine = smooth_K(run_ensemble(ho, kZ0, wide_grid1(60, 80), 1.0, 1e-3), zf_grid(), 1.0, 1.0);
  double diff = 0.0;
  for (std::size_t k = 0; k < coarse.K.size(); ++k) diff = std::max(diff, std::abs(coarse.K[k] - fine.K[k]));
  CHECK(diff < 1e-3);
}

TEST_CASE("trapezoid quadrature option") {
  const PhaseGrid g{{0.0, 1.0, 3}, {0.0, 2.0, 3}};
  CHECK(node_weight(g, 0, Quadrature::riemann) == doctest::Approx(0.5));
  CHECK(node_weight(g, 0, Quadrature::trapezoid) == doctest::Approx(0.125));
  CHECK(node_weight(g, 4, Quadrature::trapezoid) == doctest::Approx(0.5));
  const auto ens = run_ensemble(test::harmonic(), kZ0, wide_grid1(), 1.0, 1e-3);
  CHECK(max_err_vs_exact(smooth_K(ens, zf_grid(), 1.0, 1.0, Quadrature::trapezoid), kZ0) < 1e-3);
}

TEST_CASE("sudden CIVR converges to the exact harmonic kernel") {
  const auto ho = test::harmonic();
  const double T = 1.0;
  // A few target labels around the evolved packet; spacing 0.2 like the paper grid.
  const PhaseGrid targets{{-2.0, -1.2, 5}, {-1.6, -0.8, 5}};
  std::vector<double> err;
  for (std::size_t n : {15, 60, 120}) {
    const PhaseGrid g1{{-3.0, 3.0, n}, {-5.0, 1.0, n}};
    const auto ens = run_ensemble(ho, kZ0, g1, T, 1e-2);
    err.push_back(max_err_vs_exact(sudden_K(ens, targets, 1.0, 1.0), kZ0));
  }
  // The coarsest grid under-resolves the sampling Gaussian; finer grids reach the
  // integration floor.
  CHECK(err[0] > 100 * err[1]);
  CHECK(err[1] < 1e-5);
  CHECK(err[2] < 1e-5);

  // T = 0 on a fine grid.
  const PhaseGrid g1{{-4.0, 4.0, 241}, {-6.0, 2.0, 241}};
  const auto K0 = sudden_K(run_ensemble(ho, kZ0, g1, 0.0, 1e-2), targets, 1.0, 1.0);
  CHECK(max_err_vs_exact(K0, kZ0) < 1e-6);
}

TEST_CASE("smooth and sudden modes agree on the harmonic oscillator") {
  const auto ho = test::harmonic();
  const PhaseGrid targets{{-2.0, -1.2, 5}, {-1.6, -0.8, 5}};
  const PhaseGrid g1{{-3.0, 3.0, 200}, {-5.0, 1.0, 200}};
  CivrParams civr;
  civr.grid1 = g1;
  civr.a = 0.5;
  civr.dt = 1e-2;
  const auto s = smooth_K(ho, kZ0, civr, targets, 1.0);
  const auto d = sudden_K(ho, kZ0, civr, targets, 1.0);
  for (std::size_t k = 0; k < s.K.size(); ++k) CHECK(std::abs(s.K[k] - d.K[k]) < 1e-4);
}

TEST_CASE("det Lambda equals |M_vv|^2") {
  const auto ho = test::harmonic();
  LaunchParams lp{0, -2, 0.9, -1.3, 1.7, 1e-3};
  auto chk = lambda_check(evolve(ho, lp), ho, lp, 1e-5);
  CHECK(chk.det_lambda == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(chk.mvv_sq == doctest::Approx(1.0).epsilon(1e-10));

  const auto h = test::quartic();
  lp = {0, -2, 0, -2, 1.0, 1e-3};
  chk = lambda_check(evolve(h, lp), h, lp, 1e-5);
  CHECK(std::abs(chk.det_lambda - chk.mvv_sq) / chk.mvv_sq < 1e-5);

  // Cauchy-Riemann structure of the endpoint map.
  lp = {0, -2, 0.6, -1.5, 2.0, 1e-3};
  chk = lambda_check(evolve(h, lp), h, lp, 1e-5);
  CHECK(std::abs(chk.Lambda(0, 0) - chk.Lambda(1, 1)) < 1e-5);
  CHECK(std::abs(chk.Lambda(0, 1) + chk.Lambda(1, 0)) < 1e-5);
  CHECK(std::abs(chk.det_lambda - chk.mvv_sq) / chk.mvv_sq < 1e-5);

  lp.T = 0.0;
  chk = lambda_check(evolve(h, lp), h, lp, 1e-5);
  CHECK(chk.det_lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(chk.mvv_sq == 1.0);
}

TEST_CASE("contribution maps") {
  CivrParams civr;  // paper launch grid
  civr.c = 1.0;
  const auto ho_map = contribution_map(test::harmonic(), kZ0, civr, 2.0);
  for (auto a : ho_map.accepted) CHECK(a == 1);

  civr.c = 2.5;
  const auto ens = run_ensemble(test::quartic(), kZ0, civr.grid1, 1.0, civr.dt);
  const auto map = contribution_map(ens, civr.c);
  std::size_t n_acc = 0;
  for (auto a : map.accepted) n_acc += a;
  CHECK(n_acc > 0);
  CHECK(n_acc < map.accepted.size());

  // Node closest to the packet center (0, -2) contributes.
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t k = 0; k < map.accepted.size(); ++k) {
    const auto l = map.grid1.label(k);
    const double d = std::hypot(l.q - kZ0.q, l.p - kZ0.p);
    if (d < best_d) best_d = d, best = k;
  }
  CHECK(map.accepted[best] == 1);

  const auto none = contribution_map(ens, -std::numeric_limits<double>::infinity());
  for (auto a : none.accepted) CHECK(a == 0);

  // Accepted set grows with the cutoff.
  const auto lo = contribution_map(ens, 0.5);
  const auto hi = contribution_map(ens, 1.5);
  for (std::size_t k = 0; k < lo.accepted.size(); ++k)
    if (lo.accepted[k]) CHECK(hi.accepted[k] == 1);
}

TEST_CASE("K is independent of the worker count") {
  CivrParams civr;
  civr.a = 1.5;
  civr.c = 2.5;
  const auto one = smooth_K(test::quartic(), kZ0, civr, zf_grid(), 0.5, 1);
  const auto three = smooth_K(test::quartic(), kZ0, civr, zf_grid(), 0.5, 3);
  CHECK(one.K == three.K);
  CHECK(one.accepted_pairs == three.accepted_pairs);
}

TEST_CASE("parameter validation") {
  CivrParams civr;
  civr.a = 0.0;
  CHECK_THROWS_AS(civr.validate(), std::invalid_argument);
  civr = CivrParams{};
  civr.grid1.q.n = 1;
  CHECK_THROWS_AS(civr.validate(), std::invalid_argument);
  const auto ens = run_ensemble(test::harmonic(), kZ0, CivrParams{}.grid1, 0.1, 1e-2);
  CHECK_THROWS_AS(smooth_K(ens, zf_grid(), -1.0, 1.0), std::invalid_argument);

  const auto empty = smooth_K(ens, zf_grid(), 1.0, -1e9);
  CHECK(empty.empty_accepted);
  for (auto k : empty.K) CHECK(k == Complex(0.0));
}
