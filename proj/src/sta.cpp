#include "noonring/sta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "noonring/csv.hpp"
#include "noonring/spectra.hpp"

namespace noonring {

Jet rho_polynomial(double s, double gamma) {
  const double g = gamma - 1.0;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {1.0 + g * s3 * (10.0 + s * (-15.0 + 6.0 * s)), g * s2 * (30.0 + s * (-60.0 + 30.0 * s)),
          g * s * (60.0 + s * (-180.0 + 120.0 * s))};
}

double omega2_from_ermakov(double rho, double rho_ddot, double omega0) {
  if (!(rho > 0.0)) throw std::domain_error("Ermakov scaling must stay positive");
  const double r2 = rho * rho;
  return omega0 * omega0 / (r2 * r2) - rho_ddot / rho;
}

SqueezeSchedule::SqueezeSchedule(double omega0, double omegaf, double tau)
    : omega0_(omega0), omegaf_(omegaf), tau_(tau), gamma_(0.0) {
  if (!(omega0 > 0.0) || !(omegaf > 0.0)) throw std::invalid_argument("squeeze frequencies must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("squeeze duration must be positive");
  gamma_ = std::sqrt(omega0 / omegaf);
}

Jet SqueezeSchedule::rho(double t) const {
  const double s = std::clamp(t / tau_, 0.0, 1.0);
  Jet j = rho_polynomial(s, gamma_);
  j.d1 /= tau_;
  j.d2 /= tau_ * tau_;
  return j;
}

double SqueezeSchedule::omega2(double t) const {
  const Jet r = rho(t);
  return omega2_from_ermakov(r.value, r.d2, omega0_);
}

double SqueezeSchedule::ermakov_residual(double t) const {
  const Jet r = rho(t);
  return r.d2 + omega2(t) * r.value - omega0_ * omega0_ / (r.value * r.value * r.value);
}

double SqueezeSchedule::min_omega2(int samples) const {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) lo = std::min(lo, omega2(tau_ * i / (samples - 1)));
  return lo;
}

double qc_polynomial(double s, double d, double velocity, double tau, double x_start) {
  const double dd = d - x_start;
  const double w = velocity * tau;
  return x_start + s * s * s * ((10.0 * dd - 4.0 * w) + s * (-(15.0 * dd - 7.0 * w) + s * (6.0 * dd - 3.0 * w)));
}

TransportSchedule::TransportSchedule(double omega, double tau, double d, double velocity, double x_start)
    : omega_(omega), tau_(tau), d_(d), velocity_(velocity), x_start_(x_start) {
  if (!(omega > 0.0)) throw std::invalid_argument("transport frequency must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("transport duration must be positive");
  const double dd = d - x_start;
  const double w = velocity * tau;
  a3_ = 10.0 * dd - 4.0 * w;
  a4_ = -(15.0 * dd - 7.0 * w);
  a5_ = 6.0 * dd - 3.0 * w;
}

Jet TransportSchedule::qc(double t) const {
  const double s = std::clamp(t / tau_, 0.0, 1.0);
  const double s2 = s * s;
  Jet j;
  j.value = x_start_ + s2 * s * (a3_ + s * (a4_ + s * a5_));
  j.d1 = s2 * (3.0 * a3_ + s * (4.0 * a4_ + s * 5.0 * a5_)) / tau_;
  j.d2 = s * (6.0 * a3_ + s * (12.0 * a4_ + s * 20.0 * a5_)) / (tau_ * tau_);
  return j;
}

double TransportSchedule::qc_dddot(double t) const {
  const double s = std::clamp(t / tau_, 0.0, 1.0);
  return (6.0 * a3_ + s * (24.0 * a4_ + s * 60.0 * a5_)) / (tau_ * tau_ * tau_);
}

double TransportSchedule::x0(double t) const {
  const Jet q = qc(t);
  return trap_center_from_qc(q.value, q.d2, omega_);
}

double TransportSchedule::x0_dot(double t) const { return qc(t).d1 + qc_dddot(t) / (omega_ * omega_); }

double TransportSchedule::newton_residual(double t) const {
  const Jet q = qc(t);
  return q.d2 + omega_ * omega_ * (q.value - x0(t));
}

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

namespace {

enum Seg : std::size_t { kRaise, kSqueeze, kTransport, kUnsqueeze, kLower, kDrift };

const StaParams& checked(const StaParams& p) {
  for (double tau : {p.tau_raise, p.tau_squeeze, p.tau_transport, p.tau_unsqueeze, p.tau_lower}) {
    if (!(tau > 0.0)) throw std::invalid_argument("STA segment durations must be positive");
  }
  if (!(p.tau_drift >= 0.0)) throw std::invalid_argument("STA drift duration must be non-negative");
  if (p.trap != PotentialKind::Harmonic && p.trap != PotentialKind::Sinusoidal) {
    throw std::invalid_argument("STA trap must be harmonic or sinusoidal");
  }
  if (p.transport_omega && !(*p.transport_omega > 0.0)) {
    throw std::invalid_argument("transport_omega must be positive");
  }
  return p;
}

}  // namespace

StaSchedule::StaSchedule(const StaParams& params)
    : params_(checked(params)),
      squeeze_(params.omega0, params.omegaf, params.tau_squeeze),
      unsqueeze_(params.omega0, params.omegaf, params.tau_unsqueeze),
      transport_(params.transport_omega.value_or(params.omegaf), params.tau_transport, params.distance,
                 params.velocity, params.x_start) {
  const char* names[] = {"raise", "squeeze", "transport", "unsqueeze", "lower", "drift"};
  const double durations[] = {params.tau_raise,     params.tau_squeeze, params.tau_transport,
                              params.tau_unsqueeze, params.tau_lower,   params.tau_drift};
  double start = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (i == kDrift && durations[i] == 0.0) break;
    segments_.push_back({names[i], start, durations[i]});
    start += durations[i];
  }
}

double StaSchedule::duration() const { return segments_.back().start + segments_.back().duration; }

StaSchedule::Local StaSchedule::locate(double t) const {
  std::size_t i = 0;
  while (i + 1 < segments_.size() && t >= segments_[i + 1].start) ++i;
  return {i, std::clamp(t - segments_[i].start, 0.0, segments_[i].duration)};
}

double StaSchedule::omega2(double t) const {
  const auto [seg, u] = locate(t);
  const double w0 = params_.omega0;
  switch (seg) {
    case kRaise: {
      const double w = w0 * smoothstep(u / params_.tau_raise);
      return w * w;
    }
    case kSqueeze: return squeeze_.omega2(u);
    case kTransport: return params_.omegaf * params_.omegaf;
    // The unsqueeze is the squeeze run backwards in time.
    case kUnsqueeze: return unsqueeze_.omega2(params_.tau_unsqueeze - u);
    case kLower: {
      const double w = w0 * (1.0 - smoothstep(u / params_.tau_lower));
      return w * w;
    }
    default: return 0.0;
  }
}

double StaSchedule::x0(double t) const {
  const auto [seg, u] = locate(t);
  switch (seg) {
    case kRaise:
    case kSqueeze: return params_.x_start;
    case kTransport: return transport_.x0(u);
    case kUnsqueeze: return params_.distance + params_.velocity * u;
    default: return params_.distance + params_.velocity * (params_.tau_unsqueeze + (seg == kLower ? u : params_.tau_lower + u));
  }
}

double StaSchedule::velocity(double t) const {
  const auto [seg, u] = locate(t);
  switch (seg) {
    case kRaise:
    case kSqueeze: return 0.0;
    case kTransport: return transport_.x0_dot(u);
    default: return params_.velocity;
  }
}

Potential StaSchedule::potential(double t) const {
  const double w2 = omega2(t);
  if (w2 == 0.0) return Potential::none();
  return params_.trap == PotentialKind::Harmonic ? Potential::harmonic(w2, x0(t)) : Potential::sinusoidal(w2, x0(t));
}

double StaSchedule::min_omega2() const { return std::min(squeeze_.min_omega2(), unsqueeze_.min_omega2()); }

DriveSchedule StaSchedule::drive() const {
  DriveSchedule d;
  d.duration = duration();
  d.frame = Frame::Lab;
  d.trap = [this](double t) { return potential(t); };
  return d;
}

StaSchedule build_protocol(const StaParams& params) { return StaSchedule(params); }

namespace {

OrbitalSet boosted(const OrbitalSet& set, int n) {
  std::vector<Wavefunction> out;
  for (const auto& psi : set.orbitals()) out.push_back(boost(psi, n));
  return OrbitalSet(std::move(out));
}

}  // namespace

OrbitalSet sta_final_targets(int n, double velocity, const RingGrid& grid) {
  const double m = velocity / kPi;
  const long q = std::lround(m);
  if (std::abs(m - static_cast<double>(q)) > 1e-9) {
    throw std::invalid_argument("STA targets need a final velocity that is a multiple of pi");
  }
  // floor division so that negative odd multiples land on (2n + 1) pi
  const long half = q >= 0 ? q / 2 : -((-q + 1) / 2);
  if (q % 2 == 0) return boosted(sta_initial_orbitals(n, grid), static_cast<int>(half));
  return boosted(sta_target_orbitals(n, grid), static_cast<int>(half));
}

StaReport run_protocol(int n, const StaSchedule& sched, int grid_size, const PropagationConfig& cfg) {
  const RingGrid grid(grid_size);
  const OrbitalSet initial = sta_initial_orbitals(n, grid);
  const OrbitalSet targets = sta_final_targets(n, sched.params().velocity, grid);
  auto result = propagate(initial.orbitals(), sched.drive(), cfg);
  const OrbitalSet final_set(std::move(result.states));

  StaReport r;
  r.shifted = shift_maximized_fidelity(final_set, targets);
  r.unshifted_fidelity = tg_fidelity(final_set, targets).fidelity;
  r.min_omega2 = sched.min_omega2();
  r.inverted = r.min_omega2 < 0.0;
  return r;
}

OrbitalSet trap_eigenstates(int n, PotentialKind kind, double omega, const RingGrid& grid) {
  const Potential p = kind == PotentialKind::Harmonic ? Potential::harmonic(omega * omega)
                                                      : Potential::sinusoidal(omega * omega);
  const int cutoff = std::min(128, grid.size() / 2 - 1);
  return OrbitalSet(eigenstates(build_hamiltonian(0.0, p, cutoff), n, grid).orbitals);
}

double squeeze_fidelity(const SqueezeSchedule& s, PotentialKind kind, int grid_size, const PropagationConfig& cfg) {
  const RingGrid grid(grid_size);
  const Wavefunction start = trap_eigenstates(1, kind, s.omega0(), grid)[0];
  const Wavefunction goal = trap_eigenstates(1, kind, s.omegaf(), grid)[0];
  DriveSchedule d;
  d.duration = s.tau();
  d.trap = [&s, kind](double t) {
    return kind == PotentialKind::Harmonic ? Potential::harmonic(s.omega2(t)) : Potential::sinusoidal(s.omega2(t));
  };
  return fidelity(goal, propagate(start, d, cfg));
}

void write_schedule_csv(std::ostream& os, const StaSchedule& sched, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("schedule sampling step must be positive");
  CsvWriter w(os, {"t", "omega2", "Omega", "x0"});
  const double T = sched.duration();
  const long n = static_cast<long>(std::ceil(T / dt - 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double t = i == n ? T : static_cast<double>(i) * dt;
    w.row({t, sched.omega2(t), sched.velocity(t), sched.x0(t)});
  }
}

void write_sta_fidelity_header(std::ostream& os) { os << "N,trap_kind,omega_f,F,s_star\n"; }

void write_sta_fidelity_row(std::ostream& os, const StaSchedule& sched, const StaReport& r) {
  os << r.shifted.particles << ',' << to_string(sched.params().trap) << ',' << CsvWriter::format(sched.params().omegaf)
     << ',' << CsvWriter::format(r.shifted.fidelity) << ','
     << (r.shifted.shift ? CsvWriter::format(*r.shifted.shift) : std::string("nan")) << '\n';
}

}  // namespace noonring
