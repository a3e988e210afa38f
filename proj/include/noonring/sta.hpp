#pragma once

// Invariant-based shortcuts for a harmonic trap on the ring: Ermakov
// frequency ramps (squeeze), trap transport from the classical centre-of-
// mass trajectory, and the five-step acceleration protocol
// raise -> squeeze -> transport -> unsqueeze -> lower.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noonring/propagator.hpp"
#include "noonring/tg.hpp"

namespace noonring {

/// A function value with its first and second derivative.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// rho(s) = 1 + (gamma - 1)(6 s^5 - 15 s^4 + 10 s^3), derivatives in s.
Jet rho_polynomial(double s, double gamma);

/// omega^2 = omega0^2 / rho^4 - rho_ddot / rho. Throws std::domain_error for
/// rho <= 0.
double omega2_from_ermakov(double rho, double rho_ddot, double omega0);

/// Ermakov ramp omega0 -> omegaf over [0, tau]; rho(tau) = sqrt(omega0/omegaf).
class SqueezeSchedule {
 public:
  SqueezeSchedule(double omega0, double omegaf, double tau);

  double omega0() const { return omega0_; }
  double omegaf() const { return omegaf_; }
  double tau() const { return tau_; }
  double gamma() const { return gamma_; }

  /// rho(t) with real-time derivatives (rho'' / tau^2 for the second).
  Jet rho(double t) const;
  double omega2(double t) const;
  /// rho_ddot + omega^2 rho - omega0^2 / rho^3.
  double ermakov_residual(double t) const;

  /// Minimum of omega^2 over a dense sample; negative means the trap is
  /// momentarily inverted.
  double min_omega2(int samples = 4001) const;
  bool inverted() const { return min_omega2() < 0.0; }

 private:
  double omega0_, omegaf_, tau_, gamma_;
};

/// q_c(s) = (6d - 3W)s^5 - (15d - 7W)s^4 + (10d - 4W)s^3 + x_start with
/// W = omegaf_velocity * tau and d measured from x_start, so that in real
/// time q_c(tau) = d and dq_c/dt(tau) = omegaf_velocity.
double qc_polynomial(double s, double d, double velocity, double tau, double x_start);

/// x0 = q_c + q_c_ddot / omega^2.
inline double trap_center_from_qc(double qc, double qc_ddot, double omega) {
  return qc + qc_ddot / (omega * omega);
}

/// Transport of a trap of constant frequency `omega` from x_start to d,
/// ending at velocity `velocity`. Lengths live on the unwrapped line.
class TransportSchedule {
 public:
  TransportSchedule(double omega, double tau, double d, double velocity, double x_start = 0.0);

  double omega() const { return omega_; }
  double tau() const { return tau_; }
  double distance() const { return d_; }
  double velocity() const { return velocity_; }
  double start() const { return x_start_; }

  /// q_c with its first and second real-time derivatives.
  Jet qc(double t) const;
  double qc_dddot(double t) const;
  double x0(double t) const;
  double x0_dot(double t) const;
  /// q_c_ddot + omega^2 (q_c - x0).
  double newton_residual(double t) const;

 private:
  double omega_, tau_, d_, velocity_, x_start_;
  double a3_, a4_, a5_;
};

/// s^2 (3 - 2 s).
double smoothstep(double s);

struct StaParams {
  double omega0 = 2.0;
  double omegaf = 100.0;
  double distance = 100.0;
  double velocity = 10.0 * kPi;  // Omega_f
  double tau_raise = 10.0;
  double tau_squeeze = 10.0;
  double tau_transport = 10.0;
  double tau_unsqueeze = 10.0;
  double tau_lower = 10.0;
  double tau_drift = 0.0;
  PotentialKind trap = PotentialKind::Harmonic;
  /// Frequency used in the transport equations; omegaf when unset.
  std::optional<double> transport_omega;
  double x_start = 0.0;
};

struct StaSegment {
  std::string name;
  double start = 0.0;
  double duration = 0.0;
};

/// Piecewise protocol in lab coordinates. Segments are raise, squeeze,
/// transport, unsqueeze, lower and (when tau_drift > 0) drift.
class StaSchedule {
 public:
  explicit StaSchedule(const StaParams& params);

  const StaParams& params() const { return params_; }
  const std::vector<StaSegment>& segments() const { return segments_; }
  const SqueezeSchedule& squeeze() const { return squeeze_; }
  const SqueezeSchedule& unsqueeze() const { return unsqueeze_; }
  const TransportSchedule& transport() const { return transport_; }
  double duration() const;

  double omega2(double t) const;
  /// Unwrapped trap centre.
  double x0(double t) const;
  /// Trap-centre velocity (the rotation rate Omega of the trap).
  double velocity(double t) const;
  Potential potential(double t) const;

  /// Lowest omega^2 over the squeeze and unsqueeze segments.
  double min_omega2() const;

  DriveSchedule drive() const;

 private:
  struct Local {
    std::size_t segment;
    double u;
  };
  Local locate(double t) const;

  StaParams params_;
  SqueezeSchedule squeeze_;
  SqueezeSchedule unsqueeze_;
  TransportSchedule transport_;
  std::vector<StaSegment> segments_;
};

StaSchedule build_protocol(const StaParams& params);

struct StaReport {
  FidelityReport shifted;          // shift-maximized against the targets
  double unshifted_fidelity = 0.0;  // same targets, s = 0
  double min_omega2 = 0.0;
  bool inverted = false;
};

/// Target orbitals for a final velocity that is a multiple of pi: the
/// initial orbitals boosted by n for 2 pi n, and the NOON orbitals boosted
/// by n for (2n + 1) pi.
OrbitalSet sta_final_targets(int n, double velocity, const RingGrid& grid);

/// Propagates sta_initial_orbitals through the protocol (lab frame).
StaReport run_protocol(int n, const StaSchedule& sched, int grid_size, const PropagationConfig& cfg);

/// Lowest `n` eigenstates of a trap centred at x0 = 0.
OrbitalSet trap_eigenstates(int n, PotentialKind kind, double omega, const RingGrid& grid);

/// Fidelity of the Ermakov ramp alone: the omega0 trap ground state is
/// propagated and compared with the omegaf ground state.
double squeeze_fidelity(const SqueezeSchedule& s, PotentialKind kind, int grid_size, const PropagationConfig& cfg);

/// t, omega2, Omega, x0 sampled every `dt` (x0 unwrapped).
void write_schedule_csv(std::ostream& os, const StaSchedule& sched, double dt);
void write_sta_fidelity_header(std::ostream& os);
void write_sta_fidelity_row(std::ostream& os, const StaSchedule& sched, const StaReport& r);

}  // namespace noonring
