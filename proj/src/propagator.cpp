#include "noonring/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "noonring/csv.hpp"

namespace noonring {

SplitStepper::SplitStepper(const RingGrid& grid)
    : grid_(grid),
      fft_(grid.size()),
      potential_phase_(static_cast<std::size_t>(grid.size()), cplx(1.0)),
      kinetic_phase_(static_cast<std::size_t>(grid.size()), cplx(1.0)),
      momenta_(static_cast<std::size_t>(grid.size())) {
  for (int j = 0; j < grid.size(); ++j) momenta_[static_cast<std::size_t>(j)] = kTwoPi * grid.momentum(j);
}

void SplitStepper::set_potential(std::span<const double> v, double dt) {
  potential_trivial_ = true;
  for (std::size_t m = 0; m < v.size(); ++m) {
    if (v[m] == 0.0) {
      potential_phase_[m] = 1.0;
    } else {
      potential_phase_[m] = std::polar(1.0, -0.5 * v[m] * dt);
      potential_trivial_ = false;
    }
  }
}

void SplitStepper::set_kinetic(double omega, double dt) {
  // (p - W)^2 = p^2 - 2 p W + W^2: the p^2 part is cached per dt, the W^2
  // part is a global phase and is dropped, and e^{i p W dt} = z^k is built by
  // recurrence, re-anchored with an exact phase every 16 modes.
  const std::size_t n = momenta_.size();
  if (dt != free_dt_) {
    const double scale = 1.0 / grid_.size();
    free_phase_.resize(n);
    for (std::size_t j = 0; j < n; ++j) free_phase_[j] = std::polar(scale, -0.5 * momenta_[j] * momenta_[j] * dt);
    free_dt_ = dt;
  }
  if (omega == 0.0) {
    std::copy(free_phase_.begin(), free_phase_.end(), kinetic_phase_.begin());
    return;
  }
  const int half = grid_.size() / 2;
  const double angle = kTwoPi * omega * dt;
  const cplx z = std::polar(1.0, angle);
  cplx w = 1.0;
  for (int k = 0; k <= half; ++k) {
    if (k % 16 == 0) w = std::polar(1.0, angle * k);
    if (k < half) kinetic_phase_[static_cast<std::size_t>(k)] = free_phase_[static_cast<std::size_t>(k)] * w;
    if (k > 0) {
      const auto j = static_cast<std::size_t>(grid_.slot(-k));
      kinetic_phase_[j] = free_phase_[j] * std::conj(w);
    }
    w *= z;
  }
}

void SplitStepper::apply(std::span<cplx> amps) {
  const std::size_t n = amps.size();
  if (!potential_trivial_) {
    for (std::size_t m = 0; m < n; ++m) amps[m] *= potential_phase_[m];
  }
  fft_.forward(amps);
  for (std::size_t j = 0; j < n; ++j) amps[j] *= kinetic_phase_[j];
  fft_.backward(amps);
  if (!potential_trivial_) {
    for (std::size_t m = 0; m < n; ++m) amps[m] *= potential_phase_[m];
  }
}

Wavefunction strang_step(const Wavefunction& psi, double omega, std::span<const double> v, double dt) {
  if (static_cast<int>(v.size()) != psi.size()) throw GridMismatch("potential not sampled on the state's grid");
  SplitStepper stepper(psi.grid());
  stepper.set_potential(v, dt);
  stepper.set_kinetic(omega, dt);
  Wavefunction out = psi;
  stepper.apply(out.amps());
  // restore the global phase that set_kinetic leaves out
  out *= std::polar(1.0, -0.5 * omega * omega * dt);
  return out;
}

namespace {

// Sum of the trap and barrier contributions at time t, in the chosen frame.
class PotentialSampler {
 public:
  PotentialSampler(const RingGrid& grid, const DriveSchedule& sched)
      : grid_(grid), sched_(sched), total_(static_cast<std::size_t>(grid.size())),
        scratch_(static_cast<std::size_t>(grid.size())) {}

  std::span<const double> at(double t, double offset) {
    std::fill(total_.begin(), total_.end(), 0.0);
    if (sched_.trap) {
      Potential trap = sched_.trap(t);
      if (sched_.frame == Frame::Comoving) trap.x0 -= offset;
      if (trap.kind != PotentialKind::None) {
        eval_potential(trap, grid_, scratch_);
        for (std::size_t m = 0; m < total_.size(); ++m) total_[m] += scratch_[m];
      }
    }
    if (sched_.barrier) {
      const double b = sched_.barrier(t);
      if (b != 0.0) {
        const double where = sched_.frame == Frame::Comoving ? 0.0 : offset;
        total_[static_cast<std::size_t>(nearest_index(grid_, where))] += b / grid_.dx();
      }
    }
    return total_;
  }

 private:
  const RingGrid& grid_;
  const DriveSchedule& sched_;
  std::vector<double> total_;
  std::vector<double> scratch_;
};

void check_norm(const Wavefunction& psi, double tol, double t, std::size_t index) {
  const double n = psi.norm();
  if (!std::isfinite(n) || std::abs(1.0 - n) > tol) {
    std::ostringstream msg;
    msg << "norm drift " << std::abs(1.0 - n) << " exceeds tolerance " << tol << " for state " << index
        << " at t=" << t;
    throw PropagationError(msg.str());
  }
}

}  // namespace

PropagationResult propagate(std::span<const Wavefunction> initial, const DriveSchedule& sched,
                            const PropagationConfig& cfg) {
  if (initial.empty()) throw std::invalid_argument("propagate: no states given");
  if (!(sched.duration > 0.0)) throw std::invalid_argument("propagate: duration must be positive");
  if (!(cfg.dt > 0.0) || cfg.dt > sched.duration) throw std::invalid_argument("propagate: need 0 < dt <= T");
  const RingGrid grid = initial.front().grid();
  for (std::size_t i = 0; i < initial.size(); ++i) {
    if (initial[i].grid() != grid) throw GridMismatch("propagate: states on different grids");
    check_norm(initial[i], cfg.norm_tol, 0.0, i);
  }

  const long steps = static_cast<long>(std::ceil(sched.duration / cfg.dt - 1e-9));
  const double dt = sched.duration / static_cast<double>(steps);

  PropagationResult result;
  result.states.assign(initial.begin(), initial.end());
  result.steps = steps;

  SplitStepper stepper(grid);
  PotentialSampler sampler(grid, sched);
  const bool comoving = sched.frame == Frame::Comoving;
  const bool static_kinetic = !comoving || !sched.omega;
  if (static_kinetic) stepper.set_kinetic(0.0, dt);

  if (cfg.record_stride > 0) result.snapshots.push_back({0.0, result.states});

  double offset = 0.0;
  for (long n = 0; n < steps; ++n) {
    const double t_mid = (static_cast<double>(n) + 0.5) * dt;
    const double omega = sched.omega ? sched.omega(t_mid) : 0.0;
    const double offset_mid = offset + 0.5 * omega * dt;
    if (!static_kinetic) stepper.set_kinetic(omega, dt);
    stepper.set_potential(sampler.at(t_mid, offset_mid), dt);
    for (auto& psi : result.states) stepper.apply(psi.amps());
    offset += omega * dt;

    if (cfg.record_stride > 0 && (n + 1) % cfg.record_stride == 0) {
      const double t = static_cast<double>(n + 1) * dt;
      for (std::size_t i = 0; i < result.states.size(); ++i) check_norm(result.states[i], cfg.norm_tol, t, i);
      result.snapshots.push_back({t, result.states});
    }
  }
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    check_norm(result.states[i], cfg.norm_tol, sched.duration, i);
  }
  result.frame_offset = offset;
  return result;
}

Wavefunction propagate(const Wavefunction& initial, const DriveSchedule& sched, const PropagationConfig& cfg) {
  auto result = propagate(std::span<const Wavefunction>(&initial, 1), sched, cfg);
  return std::move(result.states.front());
}

Wavefunction comoving_transform(const Wavefunction& psi_lab, double offset) {
  return shift_wavefunction(psi_lab, -offset);
}

Wavefunction lab_transform(const Wavefunction& psi_comoving, double offset) {
  return shift_wavefunction(psi_comoving, offset);
}

double energy(const Wavefunction& psi, double omega, std::span<const double> v) {
  const RingGrid& g = psi.grid();
  const auto c = to_momentum(psi);
  double kinetic = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    const double p = kTwoPi * g.momentum(j) - omega;
    kinetic += 0.5 * p * p * std::norm(c[static_cast<std::size_t>(j)]);
  }
  double potential = 0.0;
  for (int m = 0; m < g.size(); ++m) potential += v[static_cast<std::size_t>(m)] * std::norm(psi[m]);
  return kinetic + potential * g.dx();
}

void write_snapshots_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, std::size_t index) {
  CsvWriter csv(os, {"t", "x", "re_psi", "im_psi"});
  for (const auto& snap : snapshots) {
    const Wavefunction& psi = snap.states.at(index);
    for (int m = 0; m < psi.size(); ++m) {
      csv.row({snap.t, psi.grid().x(m), psi[m].real(), psi[m].imag()});
    }
  }
}

}  // namespace noonring
