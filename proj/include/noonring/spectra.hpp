#pragma once

// Stationary states in a truncated plane-wave basis.
//
// The basis is k = c-K .. c+K with c the integer nearest to Omega/(2 pi), so
// a shift Omega -> Omega + 2 pi maps the basis onto itself. Potentials enter
// through their exact Fourier coefficients; the delta barrier couples every
// pair of modes with strength b.

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noonring/ring.hpp"

namespace noonring {

struct MomentumHamiltonian {
  double omega = 0.0;
  Potential potential;
  int cutoff = 0;  // K
  int center = 0;  // c
  Eigen::MatrixXcd matrix;

  int dim() const { return 2 * cutoff + 1; }
  int momentum(int i) const { return center - cutoff + i; }
};

/// Fourier coefficient V(q) = integral V(x) e^{-i 2 pi q x} dx of a ring potential.
cplx potential_fourier(const Potential& p, int q);

/// Requires cutoff >= 8.
MomentumHamiltonian build_hamiltonian(double omega, const Potential& p, int cutoff = 64);

/// Lowest eigenpairs; column j of `coefficients` holds c_k for basis index i.
struct Eigensystem {
  std::vector<double> energies;
  Eigen::MatrixXcd coefficients;
  int cutoff = 0;
  int center = 0;

  int momentum(int i) const { return center - cutoff + i; }
};

Eigensystem eigensystem(const MomentumHamiltonian& h, int n);

/// Evaluates sum_k c_k e^{i 2 pi k x} on the grid and normalizes. Every
/// basis momentum must be representable on the grid.
Wavefunction synthesize(const Eigen::VectorXcd& coeffs, int center, int cutoff, const RingGrid& grid);

struct Eigenstates {
  std::vector<double> energies;
  std::vector<Wavefunction> orbitals;
};

/// Eigenvalues and grid orbitals of the n lowest states.
Eigenstates eigenstates(const MomentumHamiltonian& h, int n, const RingGrid& grid);

enum class SweepParameter { Omega, Barrier, TrapFrequency };

const char* column_name(SweepParameter p);

/// Fixed part of a sweep. For Barrier sweeps the potential becomes a delta
/// at potential.x0; for TrapFrequency sweeps omega2 is set to value^2 on the
/// given (Harmonic or Sinusoidal) potential.
struct SweepBase {
  double omega = 0.0;
  Potential potential;
  int cutoff = 64;
};

struct SpectrumTable {
  SweepParameter parameter = SweepParameter::Omega;
  std::vector<double> values;
  std::vector<std::vector<double>> energies;  // [value][level], ascending
  std::vector<Eigensystem> systems;           // filled when vectors are kept
};

SpectrumTable sweep_spectrum(SweepParameter param, const std::vector<double>& values, const SweepBase& base,
                             int n_levels, bool keep_vectors = false, int threads = 1);

/// Header "<param>,E0,...,E{n-1}".
void write_spectrum_csv(std::ostream& os, const SpectrumTable& table);

/// Thrown when a branch cannot be followed unambiguously.
class TrackingError : public std::runtime_error {
 public:
  TrackingError(const std::string& what, double from, double to)
      : std::runtime_error(what), from_(from), to_(to) {}
  double from() const { return from_; }
  double to() const { return to_; }

 private:
  double from_;
  double to_;
};

struct Continuation {
  std::vector<int> levels;  // tracked level index at every table entry
  double min_overlap = 1.0;
  Eigen::VectorXcd final_coefficients;
  int final_center = 0;
  int cutoff = 0;
  double final_energy = 0.0;
};

/// Follows level `level` of table entry 0 through the table by maximal
/// |overlap| with the previous tracked vector. Throws TrackingError when the
/// best overlap is <= 0.5, when the tracked level index changes (a true
/// crossing) or when the tracked level is exactly degenerate.
Continuation adiabatic_continuation(const SpectrumTable& table, int level);

/// Sweeps Omega from `from` to `to` in steps of at most `step`, halving the
/// step until every successive overlap exceeds 0.9, and tracks each level.
std::vector<Continuation> continue_in_omega(const std::vector<int>& levels, double from, double to,
                                            const Potential& p, int cutoff = 64, double step = kPi / 200.0);

}  // namespace noonring
