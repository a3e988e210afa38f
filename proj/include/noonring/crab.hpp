#pragma once

// Chopped random basis pulses and the rotating-barrier control problem.
//
// A controlled pulse is Gamma(t) = Gamma0(t) * gamma(t) with
//   gamma(t) = 1 + sum_j [A_j sin(nu_j t) + B_j cos(nu_j t)] / lambda(t),
//   lambda(t) = T^2 / (4 t (t - T)),
// so the correction vanishes at t = 0 and t = T.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "noonring/nelder_mead.hpp"
#include "noonring/propagator.hpp"
#include "noonring/tg.hpp"

namespace noonring {

/// T^2 / (4 t (t - T)). Requires 0 < t < T.
double lambda_weight(double t, double T);

struct CrabCoefficients {
  int J = 0;
  std::vector<double> A;   // J + 1 entries
  std::vector<double> B;
  std::vector<double> nu;  // angular frequencies
};

struct CrabPulse {
  std::function<double(double)> guess;
  CrabCoefficients coeffs;
  double T = 0.0;
};

/// gamma(t); exactly 1 at t <= 0 and t >= T.
double crab_gamma(const CrabCoefficients& c, double T, double t);

/// Gamma0(t) gamma(t).
double eval_pulse(const CrabPulse& p, double t);

/// A = B = 0, nu_j = (2 pi j / T)(1 + r_j) with r_j in [-0.5, 0.5] and
/// nu_0 = (2 pi / T) r_0 with r_0 in (0, 0.5].
CrabCoefficients initial_coefficients(int J, double T, std::mt19937_64& rng);

enum class ControlKind { Omega, Barrier, Both };
enum class FidelityMetric { FermiEdge, FullTg };

const char* to_string(ControlKind kind);
ControlKind parse_control_kind(std::string_view name);
const char* to_string(FidelityMetric metric);
FidelityMetric parse_fidelity_metric(std::string_view name);

struct CrabSettings {
  ControlKind kind = ControlKind::Omega;
  int particles = 1;
  double b_fixed = 1.0;
  double T = 10.0;
  int J = 15;
  FidelityMetric metric = FidelityMetric::FermiEdge;
  int grid_size = 32;
  double dt = 1e-4;
  int cutoff = 64;  // momentum window for the initial and target orbitals
  bool allow_negative_b = false;
  std::uint64_t seed = 0;
  long max_evals = 2000;  // per optimizer pass
  int restarts = 3;
};

/// Decoded controls. An unset pulse means "use the guess".
struct CrabControls {
  std::optional<CrabPulse> omega;
  std::optional<CrabPulse> barrier;
};

/// Accelerates the barrier from Omega = 0 to pi in time T. The N orbitals
/// start in the Omega = 0 eigenstates and are scored in the co-moving frame
/// against the adiabatically continued eigenstates at Omega = pi.
///
/// Optimization vector: (A_0..A_J, B_0..B_J, nu_0..nu_J) for each
/// controlled pulse, Omega first.
class CrabProblem {
 public:
  explicit CrabProblem(const CrabSettings& settings);

  const CrabSettings& settings() const { return settings_; }
  const RingGrid& grid() const { return grid_; }
  const OrbitalSet& initial() const { return initial_; }
  const OrbitalSet& targets() const { return targets_; }

  std::size_t dimension() const;
  /// Zero amplitudes and seeded random frequencies.
  std::vector<double> initial_vector() const;

  CrabControls decode(std::span<const double> x) const;
  double omega(const CrabControls& c, double t) const;
  /// Clamped at 0 unless allow_negative_b.
  double barrier(const CrabControls& c, double t) const;
  DriveSchedule schedule(const CrabControls& c) const;

  /// 1 - metric fidelity. Non-finite inputs or norm failures score 1.
  double infidelity(std::span<const double> x) const;
  /// Full many-body report for the pulses encoded by x.
  FidelityReport evaluate(std::span<const double> x) const;

 private:
  CrabSettings settings_;
  RingGrid grid_;
  OrbitalSet initial_;
  OrbitalSet targets_;
};

Objective make_objective(const CrabProblem& problem);

struct PulseSample {
  double t = 0.0;
  double omega = 0.0;
  double b = 0.0;
};

struct ExperimentResult {
  OptimizationResult optimization;
  double baseline_infidelity = 0.0;  // metric value of the linear guess
  double final_infidelity = 0.0;     // metric value at the optimum
  double baseline_full_tg = 0.0;     // 1 - F_TG of the linear guess
  double final_full_tg = 0.0;        // 1 - F_TG at the optimum
  std::vector<PulseSample> pulse;    // optimum sampled on the propagation grid
};

ExperimentResult optimize_experiment(const CrabSettings& settings);

/// Pulse table sampled at the propagation step boundaries.
std::vector<PulseSample> sample_pulse(const CrabProblem& problem, std::span<const double> x);

void write_pulse_csv(std::ostream& os, const std::vector<PulseSample>& pulse);
void write_trace_csv(std::ostream& os, const OptimizationResult& r);
void write_crab_summary_header(std::ostream& os);
void write_crab_summary_row(std::ostream& os, const CrabSettings& s, const ExperimentResult& r);

}  // namespace noonring
