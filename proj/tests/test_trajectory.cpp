#include <doctest.h>

#include "civr/trajectory.hpp"
#include "test_util.hpp"

using namespace civr;

TEST_CASE("initial_conditions") {
  auto x = initial_conditions({0, -2, 0, -2, 1, 1e-3});
  CHECK(x.Q1 == 0.0);
  CHECK(x.Q2 == 0.0);
  CHECK(x.P1 == -2.0);
  CHECK(x.P2 == 0.0);

  x = initial_conditions({0, -2, 1, -2, 1, 1e-3});
  CHECK(x.Q1 == 0.5);
  CHECK(x.Q2 == 0.5);
  CHECK(x.P1 == -2.0);
  CHECK(x.P2 == 0.0);
  const auto cp = from_double(x);
  CHECK(cp.q == Complex(0.5, 0.0));
  CHECK(cp.p == Complex(-2.0, 0.5));

  x = initial_conditions({0, -2, 0, -1, 1, 1e-3});
  CHECK(x.Q1 == 0.0);
  CHECK(x.Q2 == 0.0);
  CHECK(x.P1 == -1.5);
  CHECK(x.P2 == -0.5);

  // u(0) = z0 and v(0) = (q1 - i p1)/sqrt2 for every launch; q(0) = q0 + w,
  // p(0) = p0 + i w with w = (dq - i dp)/2.
  test::Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const LaunchParams lp{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
                          rng.uniform(-2, 2), 1, 1e-3};
    const auto c = from_double(initial_conditions(lp));
    CHECK(std::abs(c.u() - lp.z0().z()) < 1e-14);
    CHECK(std::abs(c.v() - Complex(lp.q1, -lp.p1) / kSqrt2) < 1e-14);
    const Complex w = 0.5 * Complex(lp.dq(), -lp.dp());
    CHECK(std::abs(c.q - (lp.q0 + w)) < 1e-14);
    CHECK(std::abs(c.p - (lp.p0 + kI * w)) < 1e-14);
  }
}

TEST_CASE("harmonic central trajectory matches the closed form") {
  const auto h = test::harmonic();
  for (double T : {0.5, 1.0, 2 * kPi, 8.5}) {
    const LaunchParams lp{0, -2, 0, -2, T, 1e-3};
    const auto rec = evolve(h, lp);
    const Complex z0 = lp.z0().z();
    CHECK(rec.valid);
    CHECK(std::abs(rec.uT - z0 * std::exp(-kI * T)) < 1e-10);
    CHECK(std::abs(rec.vT - std::conj(z0) * std::exp(kI * T)) < 1e-10);
    CHECK(std::abs(rec.M.vv - std::exp(kI * T)) < 1e-10);
    CHECK(std::abs(rec.M.uv) < 1e-10);
    CHECK(rec.xi == doctest::Approx(T).epsilon(1e-10));
    CHECK(std::abs(rec.I - 0.5 * T) < 1e-10);
    // S = -T/2 - i z0 v(0)
    CHECK(std::abs(rec.S - (-0.5 * T - kI * z0 * rec.v0)) < 1e-9);
  }
}

TEST_CASE("zero-length trajectory") {
  const auto rec = evolve(test::quartic(), {0.3, -1.0, 1.2, 0.4, 0.0, 1e-3});
  CHECK(rec.steps == 0);
  CHECK(std::abs(rec.S + kI * rec.u0 * rec.v0) < 1e-15);
  CHECK(rec.n == Matrix4::Identity());
  CHECK(rec.xi == 0.0);
  CHECK(rec.I == Complex(0.0));
}

TEST_CASE("step_count covers T with a final partial step") {
  CHECK(step_count(1.0, 1e-3) == 1000);
  CHECK(step_count(1.0005, 1e-3) == 1001);
  CHECK(step_count(0.0, 1e-3) == 0);
  CHECK_THROWS_AS(step_count(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_count(-1.0, 1e-3), std::invalid_argument);
}

TEST_CASE("quartic central orbit: period and turning points") {
  const auto bare = build_bare({1.0, 0.4, {}});
  const auto orbit = central_orbit(bare, 0.0, -2.0, 30.0);
  CHECK(orbit.energy == doctest::Approx(2.0));
  // Quadrature oracle: 4 * int_0^x_t dx / sqrt(2 (E - V)) = 4.71938 (frozen).
  CHECK(orbit.period == doctest::Approx(4.71938).epsilon(1e-5));
  // Root of 0.5 x^2 + 0.1 x^4 = 2.
  CHECK(orbit.turning_point == doctest::Approx(std::sqrt((-5.0 + std::sqrt(105.0)) / 2.0)).epsilon(1e-6));
}

TEST_CASE("n_to_m and m_to_M") {
  CHECK(n_to_m(Matrix4::Identity()) == Matrix2c::Identity());
  Matrix4 n = Matrix4::Identity();
  n(0, 3) = 1.0;
  CHECK(n_to_m(n)(0, 0) == Complex(1.0, -1.0));

  const auto M = m_to_M(Matrix2c::Identity());
  CHECK(M.uu == Complex(1.0));
  CHECK(M.vv == Complex(1.0));
  CHECK(M.uv == Complex(0.0));
  CHECK(M.vu == Complex(0.0));

  for (double T : {0.3, 1.0, 2.5}) {
    const auto rec = evolve(test::harmonic(), {0.4, -1.0, 1.1, 0.2, T, 1e-3});
    Matrix2c rot;
    rot << std::cos(T), std::sin(T), -std::sin(T), std::cos(T);
    CHECK((rec.m - rot).norm() < 1e-10);
    const auto Mh = m_to_M(rot);
    CHECK(std::abs(Mh.uu - std::exp(-kI * T)) < 1e-14);
    CHECK(std::abs(Mh.vv - std::exp(kI * T)) < 1e-14);
    CHECK(std::abs(Mh.uv) < 1e-14);
    CHECK(std::abs(Mh.vu) < 1e-14);
  }

  test::Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Complex a = rng.complex(2) + 0.5, b = rng.complex(2), c = rng.complex(2);
    Matrix2c m;
    m << a, b, c, (1.0 + b * c) / a;
    CHECK(std::abs(m.determinant() - 1.0) < 1e-12);
    CHECK(std::abs(m_to_M(m).det() - m.determinant()) < 1e-12);
  }
}

TEST_CASE("analytic tangent matches finite differences") {
  const auto ho = test::harmonic();
  LaunchParams lp{0, -2, 0.7, -1.2, 2.0, 1e-3};
  auto rec = evolve(ho, lp);
  Matrix4 fd = finite_diff_tangent(ho, lp, 1e-5);
  CHECK((fd - rec.n).cwiseAbs().maxCoeff() < 1e-4 * std::max(1.0, rec.n.cwiseAbs().maxCoeff()));

  const auto h = test::quartic();
  lp = {0, -2, 0, -2, 1.0, 1e-3};
  rec = evolve(h, lp);
  fd = finite_diff_tangent(h, lp, 1e-5);
  CHECK((fd - rec.n).cwiseAbs().maxCoeff() < 1e-4 * std::max(1.0, rec.n.cwiseAbs().maxCoeff()));

  lp.T = 0.0;
  CHECK((finite_diff_tangent(h, lp, 1e-5) - Matrix4::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(finite_diff_tangent(h, lp, 1e-2), std::invalid_argument);
}

TEST_CASE("invariants hold along the whole path") {
  const auto h = test::quartic();
  const Matrix4 J = symplectic_form();
  const LaunchParams lp{0, -2, 0.8, -1.1, 8.5, 1e-3};
  double sympl = 0.0, detM = 0.0, xi_prev = 0.0, max_dxi = 0.0;
  const auto rec = evolve(h, lp, [&](const TrajectorySample& s) {
    sympl = std::max(sympl, (s.n.transpose() * J * s.n - J).cwiseAbs().maxCoeff());
    detM = std::max(detM, std::abs(m_to_M(n_to_m(s.n)).det() - 1.0));
    max_dxi = std::max(max_dxi, std::abs(s.xi - xi_prev));
    xi_prev = s.xi;
  });
  CHECK(rec.valid);
  CHECK(sympl < 1e-8);
  CHECK(detM < 1e-8);
  CHECK(max_dxi < kPi);
  CHECK(rec.xi_max_step == doctest::Approx(max_dxi).epsilon(1e-12));
  CHECK(rec.H1_drift / std::max(1.0, std::abs(rec.H1_0)) < 1e-8);
  CHECK(rec.H2_drift / std::max(1.0, std::abs(rec.H2_0)) < 1e-8);
  CHECK(std::abs(std::exp(kI * rec.xi) - rec.M.vv / std::abs(rec.M.vv)) < 1e-8);
}

TEST_CASE("real launches stay real") {
  const auto h = test::quartic();
  test::Rng rng(10);
  for (int i = 0; i < 5; ++i) {
    const double q = rng.uniform(-1.5, 1.5), p = rng.uniform(-2.5, 2.5);
    double worst = 0.0;
    const auto rec = evolve(h, {q, p, q, p, 8.5, 1e-3}, [&](const TrajectorySample& s) {
      worst = std::max({worst, std::abs(s.x.Q2), std::abs(s.x.P2)});
    });
    CHECK(worst < 1e-12);
    CHECK(rec.S.imag() == doctest::Approx(-0.5 * (std::norm(rec.uT) + std::norm(rec.u0))));
  }
}

TEST_CASE("runaway complex trajectories are flagged invalid") {
  // This launch passes so close to a complex-time singularity of the quartic
  // flow that even 2^12 substeps cannot hold the energy; it is abandoned early.
  const auto rec = evolve(test::quartic(), {0, -2, -3, 1.1282051282051282, 8.5, 1e-3});
  CHECK_FALSE(rec.valid);
  CHECK(rec.steps < 8500);
  CHECK(std::max(rec.H1_drift, rec.H2_drift) > kH2DriftCap);

  // A far launch that plain RK4 at dt = 1e-2 mishandles is recovered by step
  // subdivision.
  const auto far = evolve(test::quartic(), {0, -2, 3, 4, 8.5, 1e-2});
  CHECK(far.valid);
  CHECK(far.H2_drift / std::max(1.0, std::abs(far.H2_0)) < 1e-6);
}
