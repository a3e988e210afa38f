#pragma once

// Second-order split-operator time evolution on the ring.
//
// A step is  e^{-iV dt/2} (position)  e^{-i(2 pi k - Omega)^2 dt/2} (momentum)
// e^{-iV dt/2} (position). Drives are sampled at step midpoints.

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "noonring/fft.hpp"
#include "noonring/ring.hpp"

namespace noonring {

enum class Frame { Lab, Comoving };

/// Raised when the norm drifts beyond PropagationConfig::norm_tol.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-dependent drive on [0, duration].
///
/// `omega` is the barrier/frame angular velocity Omega(t); its integral
/// X(t) is the accumulated barrier position. `barrier` gives the delta
/// strength b(t), placed at X(t) in the lab. `trap` returns a smooth trap
/// in lab coordinates. Unset callables contribute nothing.
///
/// In the Comoving frame the kinetic factor is (2 pi k - Omega)^2/2, the
/// barrier sits at x = 0 and the trap centre is shifted by -X(t). In the Lab
/// frame the kinetic factor is (2 pi k)^2/2.
struct DriveSchedule {
  double duration = 0.0;
  std::function<double(double)> omega;
  std::function<double(double)> barrier;
  std::function<Potential(double)> trap;
  Frame frame = Frame::Lab;
};

struct PropagationConfig {
  double dt = 2e-4;
  double norm_tol = 1e-10;
  int record_stride = 0;  // 0: final state only
};

struct Snapshot {
  double t = 0.0;
  std::vector<Wavefunction> states;
};

struct PropagationResult {
  std::vector<Wavefunction> states;
  std::vector<Snapshot> snapshots;
  double frame_offset = 0.0;  // X(T), unreduced
  long steps = 0;
};

/// Reusable stepping kernel for one grid. Holds the FFT plan and phase
/// buffers, so it is not shareable across threads.
class SplitStepper {
 public:
  explicit SplitStepper(const RingGrid& grid);

  const RingGrid& grid() const { return grid_; }

  /// Prepares the half-step potential phases e^{-i V dt/2}.
  void set_potential(std::span<const double> v, double dt);
  /// Prepares the kinetic phases for velocity omega, up to the global phase
  /// e^{-i omega^2 dt/2}.
  void set_kinetic(double omega, double dt);

  /// Applies one full step with the prepared phases.
  void apply(std::span<cplx> amps);

 private:
  RingGrid grid_;
  FourierTransform fft_;
  std::vector<cplx> potential_phase_;
  std::vector<cplx> kinetic_phase_;
  std::vector<double> momenta_;
  std::vector<cplx> free_phase_;
  double free_dt_ = 0.0;
  bool potential_trivial_ = true;
};

/// One Strang step of duration dt with constant Omega and potential V.
Wavefunction strang_step(const Wavefunction& psi, double omega, std::span<const double> v, double dt);

/// Evolves every state in `initial` under the same drive.
PropagationResult propagate(std::span<const Wavefunction> initial, const DriveSchedule& sched,
                            const PropagationConfig& cfg);

Wavefunction propagate(const Wavefunction& initial, const DriveSchedule& sched, const PropagationConfig& cfg);

/// psi~(x) = psi_lab(x + X): the state seen from a frame translated by X.
Wavefunction comoving_transform(const Wavefunction& psi_lab, double offset);
/// Inverse of comoving_transform.
Wavefunction lab_transform(const Wavefunction& psi_comoving, double offset);

/// <psi| (p - Omega)^2/2 + V |psi> on the grid.
double energy(const Wavefunction& psi, double omega, std::span<const double> v);

/// CSV with header t,x,re_psi,im_psi for state `index` of every snapshot.
void write_snapshots_csv(std::ostream& os, const std::vector<Snapshot>& snapshots, std::size_t index = 0);

}  // namespace noonring
