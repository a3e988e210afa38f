#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "noonring/crab.hpp"

using namespace noonring;

namespace {

CrabSettings quick(double T = 1.0) {
  CrabSettings s;
  s.T = T;
  s.J = 4;
  s.dt = 1e-4;
  s.grid_size = 32;
  s.seed = 1;
  s.max_evals = 20;
  s.restarts = 1;
  return s;
}

}  // namespace

TEST_CASE("lambda weight examples") {
  CHECK(lambda_weight(5.0, 10.0) == doctest::Approx(-1.0));
  CHECK(lambda_weight(2.5, 10.0) == doctest::Approx(-4.0 / 3.0));
  CHECK(lambda_weight(0.5, 1.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(lambda_weight(0.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(lambda_weight(10.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(lambda_weight(11.0, 10.0), std::domain_error);
}

TEST_CASE("gamma examples") {
  const double T = 10.0;
  CrabCoefficients c;
  c.J = 1;
  c.A = {1.0, 0.0};
  c.B = {0.0, 0.0};
  c.nu = {kPi / T, 1.0};
  // sin(pi / 2) / lambda(T / 2) = -1
  CHECK(crab_gamma(c, T, T / 2) == doctest::Approx(0.0));
  CHECK(crab_gamma(c, T, 0.0) == 1.0);
  CHECK(crab_gamma(c, T, T) == 1.0);
  CHECK(crab_gamma(c, T, -1.0) == 1.0);

  c.A = {0.0, 0.0};
  c.B = {0.0, 2.0};
  c.nu = {0.3, 0.0};
  CHECK(crab_gamma(c, T, 2.5) == doctest::Approx(1.0 - 2.0 * 0.75));
}

TEST_CASE("pulses are pinned to the guess at both ends") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double T = 1.0 + std::abs(u(rng)) * 4.0;
    CrabCoefficients c = initial_coefficients(15, T, rng);
    double total = 0.0;
    for (int j = 0; j <= 15; ++j) {
      c.A[static_cast<std::size_t>(j)] = u(rng);
      c.B[static_cast<std::size_t>(j)] = u(rng);
      total += std::abs(c.A[static_cast<std::size_t>(j)]) + std::abs(c.B[static_cast<std::size_t>(j)]);
    }
    const CrabPulse p{[T](double t) { return kPi * t / T; }, c, T};
    for (double t : {1e-6 * T, T - 1e-6 * T}) {
      const double guess = kPi * t / T;
      CHECK(std::abs(eval_pulse(p, t) - guess) <= 4.0e-6 * total * std::abs(guess) + 1e-15);
    }
    CHECK(eval_pulse(p, 0.0) == 0.0);
    CHECK(eval_pulse(p, T) == doctest::Approx(kPi));
  }
}

TEST_CASE("initial coefficients") {
  std::mt19937_64 rng(5);
  const double T = 10.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = initial_coefficients(15, T, rng);
    REQUIRE(c.A.size() == 16);
    for (double a : c.A) CHECK(a == 0.0);
    for (double b : c.B) CHECK(b == 0.0);
    CHECK(c.nu[0] > 0.0);
    CHECK(c.nu[0] <= kPi / T + 1e-15);
    for (int j = 1; j <= 15; ++j) {
      const double base = kTwoPi * j / T;
      CHECK(c.nu[static_cast<std::size_t>(j)] >= 0.5 * base - 1e-12);
      CHECK(c.nu[static_cast<std::size_t>(j)] <= 1.5 * base + 1e-12);
    }
  }
  CHECK_THROWS_AS(initial_coefficients(0, T, rng), std::invalid_argument);
}

TEST_CASE("names round trip") {
  for (auto k : {ControlKind::Omega, ControlKind::Barrier, ControlKind::Both}) CHECK(parse_control_kind(to_string(k)) == k);
  for (auto m : {FidelityMetric::FermiEdge, FidelityMetric::FullTg}) CHECK(parse_fidelity_metric(to_string(m)) == m);
  CHECK_THROWS_AS(parse_control_kind("phase"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fidelity_metric("trace"), std::invalid_argument);
}

TEST_CASE("zero amplitudes reproduce the linear guess") {
  auto s = quick();
  s.kind = ControlKind::Both;
  const CrabProblem p(s);
  CHECK(p.dimension() == 6 * 5);
  const auto x = p.initial_vector();
  const auto c = p.decode(x);
  REQUIRE(c.omega.has_value());
  REQUIRE(c.barrier.has_value());
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    CHECK(p.omega(c, t) == doctest::Approx(kPi * t));
    CHECK(p.barrier(c, t) == 1.0);
  }
  const auto pulse = sample_pulse(p, x);
  CHECK(pulse.size() == 10001);
  CHECK(pulse.front().t == 0.0);
  CHECK(pulse.front().omega == 0.0);
  CHECK(pulse.back().t == 1.0);
  CHECK(pulse.back().omega == doctest::Approx(kPi));
  CHECK(p.schedule(c).frame == Frame::Comoving);
}

TEST_CASE("negative barrier is clamped unless allowed") {
  auto s = quick();
  s.kind = ControlKind::Barrier;
  std::vector<double> x = CrabProblem(s).initial_vector();
  x[0] = -20.0;  // A_0
  x[2 * 5] = kPi / s.T;
  for (bool allow : {false, true}) {
    s.allow_negative_b = allow;
    const CrabProblem p(s);
    const auto c = p.decode(x);
    // gamma(T/2) = 1 + 20 = 21 with lambda = -1, so push A_0 the other way
    const double b = p.barrier(c, 0.5);
    CHECK(b == doctest::Approx(21.0));
    x[0] = 20.0;
    const double neg = p.barrier(p.decode(x), 0.5);
    if (allow)
      CHECK(neg == doctest::Approx(-19.0));
    else
      CHECK(neg == 0.0);
    x[0] = -20.0;
  }
}

TEST_CASE("frequencies are decoded as magnitudes") {
  const auto s = quick();
  const CrabProblem p(s);
  auto x = p.initial_vector();
  x[2 * 5 + 1] = -3.0;
  CHECK(p.decode(x).omega->coeffs.nu[1] == 3.0);
  CHECK_THROWS_AS(p.decode(std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("non-finite controls score infidelity 1") {
  const CrabProblem p(quick());
  auto x = p.initial_vector();
  x[1] = std::numeric_limits<double>::infinity();
  CHECK(p.infidelity(x) == 1.0);
}

TEST_CASE("single particle metrics agree") {
  auto s = quick();
  s.metric = FidelityMetric::FermiEdge;
  const CrabProblem a(s);
  s.metric = FidelityMetric::FullTg;
  const CrabProblem b(s);
  auto x = a.initial_vector();
  x[1] = 0.3;
  CHECK(a.infidelity(x) == doctest::Approx(b.infidelity(x)).epsilon(1e-12));
  CHECK(1.0 - a.evaluate(x).fidelity == doctest::Approx(a.infidelity(x)).epsilon(1e-12));
}

TEST_CASE("slower linear ramps are more adiabatic") {
  const CrabProblem fast(quick(1.0));
  const CrabProblem slow(quick(10.0));
  const double f = fast.infidelity(fast.initial_vector());
  const double s = slow.infidelity(slow.initial_vector());
  CHECK(f > 0.1);
  CHECK(s < f);
}

TEST_CASE("initial and target orbitals") {
  auto s = quick();
  s.particles = 3;
  const CrabProblem p(s);
  CHECK(p.initial().size() == 3);
  CHECK(p.targets().size() == 3);
  CHECK(mean_momentum(p.initial()[0]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimizer never ends above the baseline and is deterministic") {
  const auto s = quick();
  const auto a = optimize_experiment(s);
  const auto b = optimize_experiment(s);
  CHECK(a.final_infidelity <= a.baseline_infidelity);
  CHECK(a.final_full_tg == a.final_infidelity);
  CHECK(a.optimization.best_x == b.optimization.best_x);
  REQUIRE(a.optimization.trace.size() == b.optimization.trace.size());
  for (std::size_t i = 0; i < a.optimization.trace.size(); ++i)
    CHECK(a.optimization.trace[i].best == b.optimization.trace[i].best);

  std::ostringstream os;
  write_crab_summary_header(os);
  write_crab_summary_row(os, s, a);
  CHECK(os.str().rfind("kind,N,T,J,seed,final_infidelity,baseline_infidelity\nomega,1,1,4,1,", 0) == 0);

  std::ostringstream tr;
  write_trace_csv(tr, a.optimization);
  CHECK(tr.str().rfind("eval,best_infidelity\n1,", 0) == 0);

  std::ostringstream pu;
  write_pulse_csv(pu, a.pulse);
  CHECK(pu.str().rfind("t,omega,b\n0,0,1\n", 0) == 0);
}

TEST_CASE("bad settings") {
  auto s = quick();
  s.particles = 0;
  CHECK_THROWS_AS(CrabProblem{s}, std::invalid_argument);
  s = quick();
  s.dt = 2.0;
  CHECK_THROWS_AS(CrabProblem{s}, std::invalid_argument);
  s = quick();
  s.b_fixed = -1.0;
  CHECK_THROWS_AS(CrabProblem{s}, std::invalid_argument);
}
