#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "noonring/ring.hpp"

using namespace noonring;

TEST_CASE("grid construction") {
  const RingGrid g16 = make_grid(16);
  CHECK(g16.x(0) == -0.5);
  CHECK(g16.dx() == 0.0625);
  CHECK(g16.x(15) == doctest::Approx(0.5 - 0.0625));

  const RingGrid g256 = make_grid(256);
  CHECK(g256.points().size() == 256);
  CHECK(g256.x(128) == 0.0);

  CHECK_THROWS_AS(make_grid(15), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(14), std::invalid_argument);
  CHECK_THROWS_AS(make_grid((1 << 16) + 2), std::invalid_argument);
  CHECK_NOTHROW(make_grid(1 << 16));
}

TEST_CASE("grid points increase strictly") {
  const RingGrid g(64);
  const auto x = g.points();
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  CHECK(x.back() == doctest::Approx(0.5 - g.dx()));
}

TEST_CASE("momentum slot mapping") {
  const RingGrid g(16);
  CHECK(g.momentum(0) == 0);
  CHECK(g.momentum(7) == 7);
  CHECK(g.momentum(8) == -8);
  CHECK(g.momentum(15) == -1);
  for (int k = -8; k < 8; ++k) CHECK(g.momentum(g.slot(k)) == k);
}

TEST_CASE("wrap displacement examples") {
  CHECK(wrap_displacement(0.4, -0.4) == doctest::Approx(-0.2));
  CHECK(wrap_displacement(0.3, 0.3) == 0.0);
  CHECK(wrap_displacement(0.25, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("wrap displacement range and periodicity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const double x0 = u(rng);
    const double w = wrap_displacement(x, x0);
    CHECK(w >= -0.5);
    CHECK(w < 0.5);
    CHECK(wrap_displacement(x + 1.0, x0) == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(wrap_displacement(-1e-18, 0.0) < 0.5);
}

TEST_CASE("potential samples") {
  const RingGrid g(256);
  const int quarter = 192;  // x = 0.25
  REQUIRE(g.x(quarter) == 0.25);

  const auto vh = eval_potential(Potential::harmonic(4.0, 0.0), g);
  CHECK(vh[quarter] == doctest::Approx(0.125));

  // (2 pi^2 / 2 pi^2) sin^2(pi / 4) = 0.5
  const auto vs = eval_potential(Potential::sinusoidal(2.0 * kPi * kPi, 0.0), g);
  CHECK(vs[quarter] == doctest::Approx(0.5));

  const auto vd = eval_potential(Potential::delta(2.0, 0.0), g);
  CHECK(vd[128] == 512.0);
  double integral = 0.0;
  int nonzero = 0;
  for (double v : vd) {
    integral += v * g.dx();
    nonzero += v != 0.0;
  }
  CHECK(nonzero == 1);
  CHECK(integral == 2.0);

  const auto v0 = eval_potential(Potential::none(), g);
  for (double v : v0) CHECK(v == 0.0);
}

TEST_CASE("delta barrier snaps to nearest point modulo 1") {
  const RingGrid g(64);
  const auto v = eval_potential(Potential::delta(1.0, 1.26), g);
  CHECK(v[static_cast<std::size_t>(nearest_index(g, 0.26))] == 64.0);
  CHECK(nearest_index(g, 0.26) == nearest_index(g, -0.74));
}

TEST_CASE("harmonic potential is non-negative with a single minimum") {
  const RingGrid g(128);
  for (double x0 : {0.0, 0.13, -0.41, 0.499, 3.7}) {
    const auto v = eval_potential(Potential::harmonic(9.0, x0), g);
    const int at = nearest_index(g, x0);
    for (int m = 0; m < g.size(); ++m) {
      CHECK(v[static_cast<std::size_t>(m)] >= 0.0);
      if (m != at) CHECK(v[static_cast<std::size_t>(m)] > v[static_cast<std::size_t>(at)]);
    }
  }
}

TEST_CASE("sinusoidal trap matches the harmonic one near its centre") {
  const RingGrid g(1024);
  const auto vh = eval_potential(Potential::harmonic(100.0, 0.0), g);
  const auto vs = eval_potential(Potential::sinusoidal(100.0, 0.0), g);
  for (int m = 510; m <= 514; ++m) {
    const auto i = static_cast<std::size_t>(m);
    CHECK(vs[i] == doctest::Approx(vh[i]).epsilon(1e-4));
  }
}

TEST_CASE("inner products") {
  const RingGrid g(256);
  const auto p1 = plane_wave(1, g);
  const auto p2 = plane_wave(2, g);
  CHECK(std::abs(inner(p1, p1) - 1.0) < 1e-13);
  CHECK(std::abs(inner(p1, p2)) < 1e-13);

  // integral of cos(2 pi x) over the ring is 0
  std::vector<cplx> c(256);
  for (int m = 0; m < 256; ++m) c[static_cast<std::size_t>(m)] = std::sqrt(2.0) * std::cos(kTwoPi * g.x(m));
  const Wavefunction cosine(g, c);
  CHECK(std::abs(inner(plane_wave(0, g), cosine)) < 1e-13);

  CHECK_THROWS_AS(inner(p1, plane_wave(1, RingGrid(128))), GridMismatch);
}

TEST_CASE("fidelity is bounded for normalized states") {
  const RingGrid g(64);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = testing::random_state(g, 20, rng);
    const auto b = testing::random_state(g, 20, rng);
    const double f = fidelity(a, b);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("plane waves") {
  const RingGrid g(16);
  const auto p0 = plane_wave(0, g);
  for (int m = 0; m < 16; ++m) CHECK(std::abs(p0[m] - 1.0) < 1e-15);

  const auto p1 = plane_wave(1, g);
  for (int m = 0; m < 16; ++m) CHECK(std::abs(p1[m] - std::polar(1.0, kTwoPi * g.x(m))) < 1e-14);

  CHECK_THROWS_AS(plane_wave(8, g), std::invalid_argument);
  CHECK_THROWS_AS(plane_wave(-8, g), std::invalid_argument);
  CHECK_NOTHROW(plane_wave(7, g));
}

TEST_CASE("momentum transform round trip and plane-wave coefficients") {
  const RingGrid g(32);
  const auto c = to_momentum(plane_wave(3, g));
  for (int j = 0; j < 32; ++j) {
    const double expect = g.momentum(j) == 3 ? 1.0 : 0.0;
    CHECK(std::abs(c[static_cast<std::size_t>(j)] - expect) < 1e-13);
  }
  std::mt19937_64 rng(3);
  const auto psi = testing::random_state(g, 15, rng);
  const auto back = from_momentum(g, to_momentum(psi));
  for (int m = 0; m < 32; ++m) CHECK(std::abs(back[m] - psi[m]) < 1e-13);
  CHECK(mean_momentum(plane_wave(-2, g)) == doctest::Approx(-2.0 * kTwoPi));
}

TEST_CASE("shift examples") {
  const RingGrid g(64);
  std::mt19937_64 rng(5);
  const auto psi = testing::random_state(g, 31, rng);

  const auto same = shift_wavefunction(psi, 0.0);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(same[m] - psi[m]) < 1e-14);

  const double s = 0.137;
  const auto pw = plane_wave(5, g);
  const auto moved = shift_wavefunction(pw, s);
  const cplx phase = std::polar(1.0, -kTwoPi * 5 * s);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(moved[m] - phase * pw[m]) < 1e-13);

  // one grid spacing equals a cyclic rotation of the samples
  const auto rolled = shift_wavefunction(psi, g.dx());
  for (int m = 0; m < 64; ++m) CHECK(std::abs(rolled[m] - psi[(m + 63) % 64]) < 1e-12);
}

TEST_CASE("shift round trip and norm") {
  const RingGrid g(128);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const auto psi = testing::random_state(g, 40, rng);
    const double s = u(rng);
    const auto there = shift_wavefunction(psi, s);
    CHECK(there.norm() == doctest::Approx(1.0).epsilon(1e-13));
    const auto back = shift_wavefunction(there, -s);
    for (int m = 0; m < 128; ++m) CHECK(std::abs(back[m] - psi[m]) < 1e-12);
  }
}

TEST_CASE("boost multiplies by an integer plane wave") {
  const RingGrid g(64);
  const auto b = boost(plane_wave(2, g), 3);
  CHECK(fidelity(b, plane_wave(5, g)) == doctest::Approx(1.0));
}

TEST_CASE("potential kind names") {
  CHECK(parse_potential_kind("VH") == PotentialKind::Harmonic);
  CHECK(parse_potential_kind("sinusoidal") == PotentialKind::Sinusoidal);
  CHECK(std::string(to_string(PotentialKind::DeltaBarrier)) == "delta");
  CHECK_THROWS_AS(parse_potential_kind("square"), std::invalid_argument);
}
