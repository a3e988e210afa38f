#pragma once

// Tonks-Girardeau states via the Bose-Fermi mapping: an N-boson state is
// the sign-symmetrized Slater determinant of N orbitals, so overlaps reduce
// to determinants of orbital overlap matrices.

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "noonring/ring.hpp"

namespace noonring {

/// N orbitals on a common grid. Orthonormality is checked on construction
/// to 1e-8.
class OrbitalSet {
 public:
  explicit OrbitalSet(std::vector<Wavefunction> orbitals);

  int size() const { return static_cast<int>(orbitals_.size()); }
  const RingGrid& grid() const { return orbitals_.front().grid(); }
  const Wavefunction& operator[](int i) const { return orbitals_[static_cast<std::size_t>(i)]; }
  const std::vector<Wavefunction>& orbitals() const { return orbitals_; }

  /// Every orbital displaced by s.
  OrbitalSet shifted(double s) const;

 private:
  std::vector<Wavefunction> orbitals_;
};

struct FidelityReport {
  int particles = 0;
  double fidelity = 0.0;               // |det <a_i|b_j>|^2
  std::vector<double> per_orbital;     // |<a_i|b_i>|^2
  double fermi_edge = 0.0;             // per_orbital[N-1]
  std::optional<double> shift;         // s* when shift maximization was used
};

/// (i, j) = <a_i|b_j>.
Eigen::MatrixXcd overlap_matrix(const OrbitalSet& a, const OrbitalSet& b);

FidelityReport tg_fidelity(const OrbitalSet& a, const OrbitalSet& b);

/// Independent check of tg_fidelity: builds both N-body wavefunctions on the
/// product grid (M_coarse^N points) from the permutation sum with the
/// sign(x_i - x_j) prefactor and integrates conj(Psi) Phi. Orbitals are
/// resampled spectrally onto the coarse grid. N <= 3, M_coarse <= 64.
cplx tg_bruteforce_overlap(const OrbitalSet& a, const OrbitalSet& b, int coarse_size);

/// 1, i sqrt2 sin(2 pi l x), sqrt2 cos(2 pi l x), ... (N odd, total momentum 0).
OrbitalSet sta_initial_orbitals(int n, const RingGrid& grid);

/// sqrt2 cos((2l+1) pi x) e^{i pi x}, i sqrt2 sin((2l+1) pi x) e^{i pi x}, ...
/// (N odd, total momentum N pi).
OrbitalSet sta_target_orbitals(int n, const RingGrid& grid);

/// Lowest N eigenstates of the rotating-barrier Hamiltonian (barrier at
/// x = 0). At Omega = 0 degenerate pairs are rotated to parity eigenstates
/// about the barrier.
OrbitalSet crab_orbitals(int n, double b, double omega, const RingGrid& grid, int cutoff = 64);

/// Orbitals reached by adiabatically continuing the Omega = 0 orbitals to
/// `omega` at fixed barrier b.
OrbitalSet crab_targets(int n, double b, double omega, const RingGrid& grid, int cutoff = 64);

/// Maximizes F(s) = tg_fidelity(a.shifted(s), b) over s in [0, 1): a coarse
/// scan on 256 samples, then golden-section refinement to |ds| < 1e-6.
/// s* is the displacement carrying a onto b.
FidelityReport shift_maximized_fidelity(const OrbitalSet& a, const OrbitalSet& b);

/// Row "N,F,fermi_edge_F,s_star" (header written by write_fidelity_header).
void write_fidelity_header(std::ostream& os);
void write_fidelity_row(std::ostream& os, const FidelityReport& r);

}  // namespace noonring
