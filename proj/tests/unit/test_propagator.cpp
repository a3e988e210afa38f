#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "noonring/propagator.hpp"
#include "noonring/spectra.hpp"

using namespace noonring;

namespace {

// Distance between states after removing the global phase.
double state_distance(const Wavefunction& a, const Wavefunction& b) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(inner(a, b))));
}

DriveSchedule constant_drive(double T, double omega, Frame frame) {
  DriveSchedule d;
  d.duration = T;
  d.frame = frame;
  d.omega = [omega](double) { return omega; };
  return d;
}

}  // namespace

TEST_CASE("free Strang step applies the kinetic phase") {
  const RingGrid g(64);
  const double dt = 1e-3;
  const std::vector<double> v(64, 0.0);
  for (int k : {0, 3, -5}) {
    for (double omega : {0.0, 2.7}) {
      const auto pw = plane_wave(k, g);
      const auto out = strang_step(pw, omega, v, dt);
      const double p = kTwoPi * k - omega;
      const cplx phase = std::polar(1.0, -0.5 * p * p * dt);
      for (int m = 0; m < 64; ++m) CHECK(std::abs(out[m] - phase * pw[m]) < 1e-12);
    }
  }
}

TEST_CASE("Strang step preserves the norm") {
  const RingGrid g(128);
  std::mt19937_64 rng(1);
  const auto psi = testing::random_state(g, 30, rng);
  for (const auto& pot : {Potential::harmonic(400.0, 0.2), Potential::delta(3.0, 0.0), Potential::sinusoidal(50.0)}) {
    const auto out = strang_step(psi, 1.3, eval_potential(pot, g), 1e-3);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("Strang step local error is third order") {
  // Richardson: one step of dt against two of dt/2; the difference is the
  // local error and must shrink eightfold when dt halves.
  const RingGrid g(128);
  std::mt19937_64 rng(2);
  const auto psi = testing::random_state(g, 6, rng);
  const auto v = eval_potential(Potential::sinusoidal(50.0), g);
  auto local_error = [&](double dt) {
    const auto one = strang_step(psi, 0.0, v, dt);
    const auto two = strang_step(strang_step(psi, 0.0, v, dt / 2), 0.0, v, dt / 2);
    double e = 0.0;
    for (int m = 0; m < g.size(); ++m) e += std::norm(one[m] - two[m]) * g.dx();
    return std::sqrt(e);
  };
  const double e1 = local_error(4e-3);
  const double e2 = local_error(2e-3);
  const double e3 = local_error(1e-3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std::log2(e2 / e3) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("free evolution of a plane wave matches the analytic phase") {
  const RingGrid g(64);
  PropagationConfig cfg;
  cfg.dt = 1e-3;
  const auto pw = plane_wave(1, g);
  const auto out = propagate(pw, constant_drive(1.0, 0.0, Frame::Comoving), cfg);
  auto expect = pw;
  expect *= std::polar(1.0, -0.5 * kTwoPi * kTwoPi * 1.0);
  CHECK(1.0 - fidelity(out, expect) < 1e-8);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(out[m] - expect[m]) < 1e-9);
}

TEST_CASE("time-dependent drive converges at second order") {
  // Superposition of k = 1 and k = -2 under Omega(t) = 2 + 3 sin 5t: the
  // exact state keeps both plane waves with phases -(2 pi k t)^2/2 +
  // 2 pi k X(t), up to a common phase.
  const RingGrid g(64);
  std::vector<cplx> c(64);
  c[static_cast<std::size_t>(g.slot(1))] = 1.0 / std::sqrt(2.0);
  c[static_cast<std::size_t>(g.slot(-2))] = 1.0 / std::sqrt(2.0);
  const auto psi0 = from_momentum(g, c);

  const double T = 1.0;
  DriveSchedule d;
  d.duration = T;
  d.frame = Frame::Comoving;
  d.omega = [](double t) { return 2.0 + 3.0 * std::sin(5.0 * t); };
  const double X = 2.0 * T + 3.0 / 5.0 * (1.0 - std::cos(5.0 * T));

  std::vector<cplx> ce(64);
  for (int k : {1, -2}) {
    const double p = kTwoPi * k;
    ce[static_cast<std::size_t>(g.slot(k))] = std::polar(1.0 / std::sqrt(2.0), -0.5 * p * p * T + p * X);
  }
  const auto exact = from_momentum(g, ce);

  std::vector<double> err;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    PropagationConfig cfg;
    cfg.dt = dt;
    err.push_back(state_distance(propagate(psi0, d, cfg), exact));
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("norm is conserved over ten thousand steps") {
  const RingGrid g(128);
  std::mt19937_64 rng(4);
  const auto psi = testing::random_state(g, 20, rng);
  PropagationConfig cfg;
  cfg.dt = 1e-4;
  cfg.norm_tol = 1e-10;

  std::vector<DriveSchedule> drives;
  drives.push_back(constant_drive(1.0, 0.0, Frame::Lab));
  DriveSchedule barrier = constant_drive(1.0, 0.0, Frame::Comoving);
  barrier.omega = [](double t) { return kPi * t; };
  barrier.barrier = [](double) { return 1.0; };
  drives.push_back(barrier);
  DriveSchedule trap = constant_drive(1.0, 0.0, Frame::Lab);
  trap.trap = [](double t) { return Potential::harmonic(2500.0, 0.3 * t); };
  drives.push_back(trap);
  DriveSchedule sine = trap;
  sine.trap = [](double t) { return Potential::sinusoidal(400.0, -0.2 * t); };
  drives.push_back(sine);

  for (const auto& d : drives) {
    const auto r = propagate(std::span<const Wavefunction>(&psi, 1), d, cfg);
    CHECK(r.steps == 10000);
    CHECK(std::abs(r.states.front().norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("energy of a state under a static barrier stays constant") {
  const RingGrid g(32);
  std::mt19937_64 rng(6);
  const auto psi0 = testing::random_state(g, 3, rng);
  const auto v = eval_potential(Potential::delta(1.0), g);
  DriveSchedule d = constant_drive(0.25, 0.0, Frame::Comoving);
  d.barrier = [](double) { return 1.0; };
  PropagationConfig cfg;
  cfg.dt = 1e-5;
  cfg.record_stride = 5000;
  const auto r = propagate(std::span<const Wavefunction>(&psi0, 1), d, cfg);
  const double e0 = energy(psi0, 0.0, v);
  REQUIRE(r.snapshots.size() == 6);
  for (const auto& s : r.snapshots) CHECK(std::abs(energy(s.states.front(), 0.0, v) - e0) < 1e-6 * std::abs(e0));
}

TEST_CASE("eigenstate of the barrier Hamiltonian is stationary on a resolved grid") {
  const RingGrid g(32);
  const auto h = build_hamiltonian(0.0, Potential::delta(1.0), 14);
  const auto es = eigenstates(h, 1, g);
  DriveSchedule d = constant_drive(1.0, 0.0, Frame::Comoving);
  d.barrier = [](double) { return 1.0; };
  PropagationConfig cfg;
  cfg.dt = 1e-4;
  const auto out = propagate(es.orbitals[0], d, cfg);
  CHECK(fidelity(out, es.orbitals[0]) > 1.0 - 1e-6);
}

TEST_CASE("frame transforms") {
  const RingGrid g(64);
  const auto pw = plane_wave(3, g);
  const auto id = comoving_transform(pw, 0.0);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(id[m] - pw[m]) < 1e-14);

  // psi(x + 1/2) = e^{i 2 pi k / 2} psi(x)
  const auto half = comoving_transform(pw, 0.5);
  const cplx phase = std::polar(1.0, kTwoPi * 3 * 0.5);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(half[m] - phase * pw[m]) < 1e-12);

  std::mt19937_64 rng(8);
  const auto psi = testing::random_state(g, 20, rng);
  CHECK(fidelity(lab_transform(comoving_transform(psi, 0.377), 0.377), psi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lab and co-moving frames agree for a moving trap") {
  const RingGrid g(256);
  const double w2 = 900.0;
  const auto h = build_hamiltonian(0.0, Potential::harmonic(w2), 100);
  const auto ground = eigenstates(h, 1, g).orbitals[0];

  DriveSchedule d;
  d.duration = 1.0;
  d.omega = [](double t) { return 4.0 * t * t; };
  d.trap = [w2](double t) { return Potential::harmonic(w2, 4.0 * t * t * t / 3.0); };
  PropagationConfig cfg;
  cfg.dt = 1e-4;

  d.frame = Frame::Lab;
  const auto lab = propagate(std::span<const Wavefunction>(&ground, 1), d, cfg);
  d.frame = Frame::Comoving;
  const auto co = propagate(std::span<const Wavefunction>(&ground, 1), d, cfg);
  CHECK(co.frame_offset == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  const auto back = lab_transform(co.states.front(), co.frame_offset);
  CHECK(std::abs(fidelity(lab.states.front(), ground) - fidelity(back, ground)) < 1e-6);
  CHECK(fidelity(lab.states.front(), back) > 1.0 - 1e-6);
}

TEST_CASE("time reversal returns the initial state") {
  const RingGrid g(128);
  std::mt19937_64 rng(10);
  const auto psi0 = testing::random_state(g, 10, rng);
  DriveSchedule fwd;
  fwd.duration = 0.5;
  fwd.trap = [](double t) { return Potential::harmonic(400.0 * (1.0 + t), 0.1 * std::sin(3.0 * t)); };
  DriveSchedule rev = fwd;
  rev.trap = [fwd](double t) { return fwd.trap(0.5 - t); };
  PropagationConfig cfg;
  cfg.dt = 1e-3;

  auto there = propagate(psi0, fwd, cfg);
  for (int m = 0; m < g.size(); ++m) there[m] = std::conj(there[m]);
  auto back = propagate(there, rev, cfg);
  for (int m = 0; m < g.size(); ++m) back[m] = std::conj(back[m]);
  CHECK(fidelity(back, psi0) > 1.0 - 1e-8);
}

TEST_CASE("propagate rejects bad input") {
  const RingGrid g(32);
  const auto pw = plane_wave(0, g);
  PropagationConfig cfg;
  cfg.dt = 0.1;
  CHECK_THROWS_AS(propagate(pw, constant_drive(0.0, 0.0, Frame::Lab), cfg), std::invalid_argument);
  CHECK_THROWS_AS(propagate(pw, constant_drive(0.05, 0.0, Frame::Lab), cfg), std::invalid_argument);

  auto bad = pw;
  bad *= 1.01;
  CHECK_THROWS_AS(propagate(bad, constant_drive(1.0, 0.0, Frame::Lab), cfg), PropagationError);

  DriveSchedule nan = constant_drive(1.0, 0.0, Frame::Lab);
  nan.trap = [](double) { return Potential::harmonic(std::nan(""), 0.0); };
  CHECK_THROWS_AS(propagate(pw, nan, cfg), PropagationError);
}

TEST_CASE("step count covers the duration exactly") {
  const RingGrid g(32);
  const auto pw = plane_wave(0, g);
  PropagationConfig cfg;
  cfg.dt = 0.3;
  cfg.record_stride = 1;
  const auto r = propagate(std::span<const Wavefunction>(&pw, 1), constant_drive(1.0, 2.0, Frame::Comoving), cfg);
  CHECK(r.steps == 4);
  CHECK(r.snapshots.back().t == doctest::Approx(1.0));
  CHECK(r.frame_offset == doctest::Approx(2.0));
}

TEST_CASE("snapshot CSV layout") {
  const RingGrid g(16);
  const auto pw = plane_wave(1, g);
  PropagationConfig cfg;
  cfg.dt = 0.5;
  cfg.record_stride = 1;
  const auto r = propagate(std::span<const Wavefunction>(&pw, 1), constant_drive(1.0, 0.0, Frame::Lab), cfg);
  std::ostringstream os;
  write_snapshots_csv(os, r.snapshots);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,x,re_psi,im_psi");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3 * 16);
}
