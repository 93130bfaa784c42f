#include <doctest.h>

#include "civr/oracles.hpp"
#include "test_util.hpp"

using namespace civr;

namespace {

const CoherentLabel kZ0{0.0, -2.0};

double max_abs_diff(const WavefunctionGrid& a, const WavefunctionGrid& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) d = std::max(d, std::abs(a.psi[i] - b.psi[i]));
  return d;
}

}  // namespace

TEST_CASE("harmonic_exact_K") {
  CHECK(std::abs(harmonic_exact_K(kZ0, kZ0, 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(harmonic_exact_K(kZ0, kZ0, 2 * kPi) + 1.0) < 1e-12);
  test::Rng rng(30);
  for (int i = 0; i < 100; ++i) {
    const CoherentLabel zf{rng.uniform(-4, 4), rng.uniform(-6, 6)};
    const double T = rng.uniform(0, 10);
    CHECK(std::abs(harmonic_exact_K(kZ0, zf, T)) <= 1.0 + 1e-15);
  }
}

TEST_CASE("harmonic_exact_state follows the classical orbit") {
  const XGrid g;
  const auto psi = harmonic_exact_state(g, kZ0, 0.0);
  CHECK(max_abs_diff(psi, coherent_state(g, kZ0)) < 1e-15);
  // After a quarter period the packet sits at q = -2, p = 0.
  const auto quarter = harmonic_exact_state(g, kZ0, 0.5 * kPi);
  const auto ov = coherent_overlap_from_grid(quarter, {-2.0, 0.0});
  CHECK(std::abs(std::abs(ov.value) - 1.0) < 1e-10);
}

TEST_CASE("split operator: free particle spreading") {
  const QuarticSpec free{0.0, 0.0, {}};
  SplitOpConfig cfg;
  cfg.T = 1.0;
  const XGrid g = cfg.grid();
  const double p0 = -2.0;
  const auto out = split_operator_evolve(free, coherent_state(g, {0.0, p0}), cfg);
  CHECK(out.edge_ok);
  const double t = cfg.T;
  std::vector<Complex> exact(g.n);
  const Complex s = 1.0 + kI * t;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.at(i);
    exact[i] = std::pow(kPi, -0.25) / std::sqrt(s) *
               std::exp(-(x - p0 * t) * (x - p0 * t) / (2.0 * s) + kI * p0 * x - 0.5 * kI * p0 * p0 * t);
  }
  CHECK(max_abs_diff(out.psi, WavefunctionGrid(g, exact)) < 1e-10);
}

TEST_CASE("split operator: harmonic oscillator against the exact state") {
  const QuarticSpec ho{1.0, 0.0, {}};
  SplitOpConfig cfg;
  cfg.T = 1.0;
  const XGrid g = cfg.grid();
  const auto out = split_operator_evolve(ho, coherent_state(g, kZ0), cfg);
  const auto exact = harmonic_exact_state(g, kZ0, cfg.T);
  CHECK(fidelity(out.psi, exact) > 1.0 - 1e-8);
  // Phase included.
  CHECK(std::abs(inner_product(exact, out.psi) - 1.0) < 1e-5);

  // <zf|psi(T)> reproduces the closed-form kernel.
  test::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const CoherentLabel zf{rng.uniform(-4, 4), rng.uniform(-6, 6)};
    const auto ov = coherent_overlap_from_grid(out.psi, zf);
    CHECK(ov.decayed);
    CHECK(std::abs(ov.value - harmonic_exact_K(kZ0, zf, cfg.T)) < 1e-6);
  }
}

TEST_CASE("split operator conserves the norm") {
  SplitOpConfig cfg;
  cfg.T = 10.0;  // 1e4 steps
  const auto psi0 = coherent_state(cfg.grid(), kZ0);
  const auto out = split_operator_evolve({1.0, 0.4, {}}, psi0, cfg);
  CHECK(std::abs(out.psi.norm - psi0.norm) < 1e-10);
}

TEST_CASE("split operator is second order in dt") {
  const QuarticSpec ho{1.0, 0.0, {}};
  SplitOpConfig cfg;
  cfg.T = 1.0;
  const XGrid g = cfg.grid();
  const auto psi0 = coherent_state(g, kZ0);
  const auto exact = harmonic_exact_state(g, kZ0, cfg.T);
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005}) {
    cfg.dt = dt;
    err.push_back(max_abs_diff(split_operator_evolve(ho, psi0, cfg).psi, exact));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    CHECK(order > 1.9);
    CHECK(order < 2.1);
  }
}

TEST_CASE("split operator flags probability reaching the box edge") {
  SplitOpConfig cfg;
  cfg.T = 1.0;
  const auto out = split_operator_evolve({0.0, 0.0, {}}, coherent_state(cfg.grid(), {9.0, 4.0}), cfg);
  CHECK_FALSE(out.edge_ok);
  CHECK(out.edge_max > 1e-10);
}

TEST_CASE("split operator configuration validation") {
  SplitOpConfig cfg;
  cfg.n_x = 1000;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SplitOpConfig{};
  cfg.x_max = cfg.x_min;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SplitOpConfig{};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  const SplitOpConfig ok;
  const auto other = coherent_state(XGrid::periodic(-10, 10, 2048), kZ0);
  CHECK_THROWS_AS(split_operator_evolve({1.0, 0.4, {}}, other, ok), std::invalid_argument);
}

TEST_CASE("imaginary-time spectrum") {
  const auto ho = ground_energy_check({1.0, 0.0, {}});
  CHECK(ho.E0 == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(ho.E1 == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(ho.E2 == doctest::Approx(2.5).epsilon(1e-5));

  // Oracle: diagonalization in a 150-state oscillator basis.
  const auto q = ground_energy_check({1.0, 0.4, {}});
  CHECK(q.E0 == doctest::Approx(0.55914633).epsilon(1e-5));
  CHECK(q.E1 == doctest::Approx(1.76950264).epsilon(1e-5));
  CHECK(q.E2 == doctest::Approx(3.13862431).epsilon(1e-5));
}
