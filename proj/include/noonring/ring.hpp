#pragma once

// Spatial discretization of the unit ring x in [-1/2, 1/2), wavefunction
// algebra and the trap/barrier potentials. Natural units hbar = m = L = 1.

#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace noonring {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when two objects living on different grids are combined.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic grid with M points, x_m = -1/2 + m/M.
class RingGrid {
 public:
  static constexpr int kMinSize = 16;
  static constexpr int kMaxSize = 1 << 16;

  /// Throws std::invalid_argument for odd M or M outside [16, 2^16].
  explicit RingGrid(int size);

  int size() const { return size_; }
  double dx() const { return 1.0 / size_; }
  double x(int m) const { return -0.5 + m * dx(); }
  std::vector<double> points() const;

  /// Momentum quantum number stored at FFT slot j (k in [-M/2, M/2)).
  int momentum(int slot) const { return slot < size_ / 2 ? slot : slot - size_; }
  /// FFT slot holding momentum k; k must satisfy -M/2 <= k < M/2.
  int slot(int k) const { return k >= 0 ? k : k + size_; }

  friend bool operator==(const RingGrid&, const RingGrid&) = default;

 private:
  int size_;
};

inline RingGrid make_grid(int size) { return RingGrid(size); }

/// Complex amplitudes sampled on a RingGrid. Norm is sum |psi|^2 dx.
class Wavefunction {
 public:
  Wavefunction(RingGrid grid, std::vector<cplx> amps);

  /// Builds and rescales to unit norm. Throws for a zero state.
  static Wavefunction normalized(RingGrid grid, std::vector<cplx> amps);

  const RingGrid& grid() const { return grid_; }
  int size() const { return grid_.size(); }
  std::span<const cplx> amps() const { return amps_; }
  std::span<cplx> amps() { return amps_; }
  cplx operator[](int m) const { return amps_[static_cast<std::size_t>(m)]; }
  cplx& operator[](int m) { return amps_[static_cast<std::size_t>(m)]; }

  double norm() const;
  void normalize();

  Wavefunction& operator*=(cplx factor);

 private:
  RingGrid grid_;
  std::vector<cplx> amps_;
};

enum class PotentialKind { None, DeltaBarrier, Harmonic, Sinusoidal };

/// Tagged potential parameters. DeltaBarrier uses (b, x0); Harmonic and
/// Sinusoidal use (omega2, x0). x0 is read modulo 1.
struct Potential {
  PotentialKind kind = PotentialKind::None;
  double b = 0.0;
  double omega2 = 0.0;
  double x0 = 0.0;

  static Potential none() { return {}; }
  static Potential delta(double b, double x0 = 0.0) {
    return {PotentialKind::DeltaBarrier, b, 0.0, x0};
  }
  static Potential harmonic(double omega2, double x0 = 0.0) {
    return {PotentialKind::Harmonic, 0.0, omega2, x0};
  }
  static Potential sinusoidal(double omega2, double x0 = 0.0) {
    return {PotentialKind::Sinusoidal, 0.0, omega2, x0};
  }
};

const char* to_string(PotentialKind kind);
PotentialKind parse_potential_kind(std::string_view name);

/// Signed ring displacement (x - x0 + 1/2) mod 1 - 1/2, always in [-1/2, 1/2).
double wrap_displacement(double x, double x0);

/// Grid index closest to position x (read modulo 1).
int nearest_index(const RingGrid& grid, double x);

/// Pointwise samples of the potential. The delta barrier is a Kronecker
/// spike of weight b/dx at the grid point nearest to x0.
std::vector<double> eval_potential(const Potential& p, const RingGrid& grid);
void eval_potential(const Potential& p, const RingGrid& grid, std::span<double> out);

/// <a|b> = sum conj(a) b dx.
cplx inner(const Wavefunction& a, const Wavefunction& b);

/// e^{i 2 pi k x}, normalized. Requires |k| < M/2.
Wavefunction plane_wave(int k, const RingGrid& grid);

/// Momentum coefficients c_k in FFT slot order, psi(x) = sum_k c_k e^{i2pi k x}.
/// For a normalized state sum |c_k|^2 = 1.
std::vector<cplx> to_momentum(const Wavefunction& psi);
Wavefunction from_momentum(const RingGrid& grid, std::span<const cplx> coeffs);

/// Expectation of P = -i d/dx computed as sum 2 pi k |c_k|^2.
double mean_momentum(const Wavefunction& psi);

/// psi(x - s), evaluated spectrally. Exact for band-limited states.
Wavefunction shift_wavefunction(const Wavefunction& psi, double s);

/// Multiplies by e^{i 2 pi n x}; n must be an integer (a Galilean boost).
Wavefunction boost(const Wavefunction& psi, int n);

/// |<a|b>|^2.
inline double fidelity(const Wavefunction& a, const Wavefunction& b) {
  return std::norm(inner(a, b));
}

}  // namespace noonring
