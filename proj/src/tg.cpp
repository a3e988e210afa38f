#include "noonring/tg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "noonring/csv.hpp"
#include "noonring/spectra.hpp"

namespace noonring {

OrbitalSet::OrbitalSet(std::vector<Wavefunction> orbitals) : orbitals_(std::move(orbitals)) {
  if (orbitals_.empty()) throw std::invalid_argument("orbital set must not be empty");
  for (std::size_t i = 0; i < orbitals_.size(); ++i) {
    if (orbitals_[i].grid() != orbitals_.front().grid()) throw GridMismatch("orbitals live on different grids");
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx ov = inner(orbitals_[i], orbitals_[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(ov - expected) > 1e-8) {
        throw std::invalid_argument("orbitals " + std::to_string(j) + " and " + std::to_string(i) +
                                    " are not orthonormal (|overlap - delta| = " +
                                    std::to_string(std::abs(ov - expected)) + ")");
      }
    }
  }
}

OrbitalSet OrbitalSet::shifted(double s) const {
  std::vector<Wavefunction> out;
  out.reserve(orbitals_.size());
  for (const auto& psi : orbitals_) out.push_back(shift_wavefunction(psi, s));
  return OrbitalSet(std::move(out));
}

Eigen::MatrixXcd overlap_matrix(const OrbitalSet& a, const OrbitalSet& b) {
  if (a.size() != b.size()) throw std::invalid_argument("orbital sets differ in particle number");
  if (a.grid() != b.grid()) throw GridMismatch("orbital sets live on different grids");
  const int n = a.size();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = inner(a[i], b[j]);
  return m;
}

namespace {

FidelityReport report_from_overlaps(const Eigen::MatrixXcd& m) {
  FidelityReport r;
  r.particles = static_cast<int>(m.rows());
  r.fidelity = std::norm(m.partialPivLu().determinant());
  for (int i = 0; i < m.rows(); ++i) r.per_orbital.push_back(std::norm(m(i, i)));
  r.fermi_edge = r.per_orbital.back();
  return r;
}

}  // namespace

FidelityReport tg_fidelity(const OrbitalSet& a, const OrbitalSet& b) { return report_from_overlaps(overlap_matrix(a, b)); }

namespace {

std::vector<cplx> resample(const Wavefunction& psi, int coarse_size) {
  const RingGrid fine = psi.grid();
  const RingGrid coarse(coarse_size);
  const auto c = to_momentum(psi);
  std::vector<cplx> slots(static_cast<std::size_t>(coarse_size), cplx(0.0));
  const int half = std::min(fine.size(), coarse_size) / 2;
  for (int k = -half; k < half; ++k) {
    slots[static_cast<std::size_t>(coarse.slot(k))] = c[static_cast<std::size_t>(fine.slot(k))];
  }
  const Wavefunction out = from_momentum(coarse, slots);
  return {out.amps().begin(), out.amps().end()};
}

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

cplx tg_bruteforce_overlap(const OrbitalSet& a, const OrbitalSet& b, int coarse_size) {
  const int n = a.size();
  if (n != b.size()) throw std::invalid_argument("orbital sets differ in particle number");
  if (n > 3) throw std::invalid_argument("brute-force overlap supports at most 3 particles");
  if (coarse_size > 64) throw std::invalid_argument("brute-force grid limited to 64 points");
  const RingGrid coarse(coarse_size);

  std::vector<std::vector<cplx>> psi(static_cast<std::size_t>(n));
  std::vector<std::vector<cplx>> phi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    psi[static_cast<std::size_t>(i)] = resample(a[i], coarse_size);
    phi[static_cast<std::size_t>(i)] = resample(b[i], coarse_size);
  }

  std::vector<std::vector<int>> perms;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  double factorial = 1.0;
  for (int i = 2; i <= n; ++i) factorial *= i;
  const double norm = 1.0 / std::sqrt(factorial);

  const auto points = static_cast<long>(std::pow(coarse_size, n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  cplx total = 0.0;
  for (long flat = 0; flat < points; ++flat) {
    long rest = flat;
    for (int i = 0; i < n; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rest % coarse_size);
      rest /= coarse_size;
    }
    double prefactor = 1.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        prefactor *= sign_of(coarse.x(idx[static_cast<std::size_t>(i)]) - coarse.x(idx[static_cast<std::size_t>(j)]));
    if (prefactor == 0.0) continue;

    cplx big_psi = 0.0;
    cplx big_phi = 0.0;
    for (const auto& p : perms) {
      cplx term_psi = static_cast<double>(permutation_sign(p));
      cplx term_phi = term_psi;
      for (int i = 0; i < n; ++i) {
        const auto orb = static_cast<std::size_t>(p[static_cast<std::size_t>(i)]);
        const auto at = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
        term_psi *= psi[orb][at];
        term_phi *= phi[orb][at];
      }
      big_psi += term_psi;
      big_phi += term_phi;
    }
    total += std::conj(prefactor * norm * big_psi) * (prefactor * norm * big_phi);
  }
  return total * std::pow(coarse.dx(), n);
}

OrbitalSet sta_initial_orbitals(int n, const RingGrid& grid) {
  if (n < 1 || n % 2 == 0) throw std::invalid_argument("STA orbitals need an odd particle number, got " + std::to_string(n));
  std::vector<Wavefunction> out;
  const double r2 = std::sqrt(2.0);
  std::vector<cplx> amps(static_cast<std::size_t>(grid.size()), cplx(1.0));
  out.emplace_back(grid, amps);
  for (int l = 1; 2 * l - 1 < n; ++l) {
    if (2 * l >= grid.size() / 2) throw std::invalid_argument("grid too coarse for requested orbitals");
    for (int m = 0; m < grid.size(); ++m) amps[static_cast<std::size_t>(m)] = cplx(0.0, r2 * std::sin(kTwoPi * l * grid.x(m)));
    out.emplace_back(grid, amps);
    for (int m = 0; m < grid.size(); ++m) amps[static_cast<std::size_t>(m)] = r2 * std::cos(kTwoPi * l * grid.x(m));
    out.emplace_back(grid, amps);
  }
  return OrbitalSet(std::move(out));
}

OrbitalSet sta_target_orbitals(int n, const RingGrid& grid) {
  if (n < 1 || n % 2 == 0) throw std::invalid_argument("STA orbitals need an odd particle number, got " + std::to_string(n));
  std::vector<Wavefunction> out;
  const double r2 = std::sqrt(2.0);
  std::vector<cplx> amps(static_cast<std::size_t>(grid.size()));
  for (int l = 0; static_cast<int>(out.size()) < n; ++l) {
    if (l + 1 >= grid.size() / 2) throw std::invalid_argument("grid too coarse for requested orbitals");
    const double q = (2 * l + 1) * kPi;
    for (int m = 0; m < grid.size(); ++m) {
      const double x = grid.x(m);
      amps[static_cast<std::size_t>(m)] = r2 * std::cos(q * x) * std::polar(1.0, kPi * x);
    }
    out.emplace_back(grid, amps);
    if (static_cast<int>(out.size()) == n) break;
    for (int m = 0; m < grid.size(); ++m) {
      const double x = grid.x(m);
      amps[static_cast<std::size_t>(m)] = cplx(0.0, r2 * std::sin(q * x)) * std::polar(1.0, kPi * x);
    }
    out.emplace_back(grid, amps);
  }
  return OrbitalSet(std::move(out));
}

namespace {

// Largest-magnitude coefficient made real and positive, for reproducible output.
void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  v *= std::conj(v(at)) / std::abs(v(at));
}

// Parity about x = 0 in a window symmetric around k = 0: c_k -> c_{-k}.
Eigen::VectorXcd parity(const Eigen::VectorXcd& v) { return v.reverse(); }

}  // namespace

OrbitalSet crab_orbitals(int n, double b, double omega, const RingGrid& grid, int cutoff) {
  if (n < 1) throw std::invalid_argument("need at least one orbital");
  const MomentumHamiltonian h = build_hamiltonian(omega, Potential::delta(b), cutoff);
  Eigensystem es = eigensystem(h, std::min(n + 1, h.dim()));

  if (h.center == 0 && omega == 0.0) {
    // Rotate exactly degenerate pairs onto odd/even combinations.
    for (int j = 0; j + 1 < static_cast<int>(es.energies.size()); ++j) {
      const double e0 = es.energies[static_cast<std::size_t>(j)];
      const double e1 = es.energies[static_cast<std::size_t>(j + 1)];
      if (std::abs(e1 - e0) > 1e-9 * (1.0 + std::abs(e0))) continue;
      const Eigen::VectorXcd u = es.coefficients.col(j);
      const Eigen::VectorXcd w = es.coefficients.col(j + 1);
      Eigen::VectorXcd odd_u = 0.5 * (u - parity(u));
      Eigen::VectorXcd odd_w = 0.5 * (w - parity(w));
      Eigen::VectorXcd odd = odd_u.norm() >= odd_w.norm() ? odd_u : odd_w;
      odd.normalize();
      Eigen::VectorXcd even_u = 0.5 * (u + parity(u));
      Eigen::VectorXcd even_w = 0.5 * (w + parity(w));
      Eigen::VectorXcd even = even_u.norm() >= even_w.norm() ? even_u : even_w;
      even -= odd.dot(even) * odd;
      even.normalize();
      es.coefficients.col(j) = odd;
      es.coefficients.col(j + 1) = even;
      ++j;
    }
  }

  std::vector<Wavefunction> out;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd v = es.coefficients.col(j);
    fix_phase(v);
    out.push_back(synthesize(v, es.center, es.cutoff, grid));
  }
  return OrbitalSet(std::move(out));
}

OrbitalSet crab_targets(int n, double b, double omega, const RingGrid& grid, int cutoff) {
  std::vector<int> levels(static_cast<std::size_t>(n));
  std::iota(levels.begin(), levels.end(), 0);
  const auto tracked = continue_in_omega(levels, 0.0, omega, Potential::delta(b), cutoff);
  std::vector<Wavefunction> out;
  for (const auto& c : tracked) {
    Eigen::VectorXcd v = c.final_coefficients;
    fix_phase(v);
    out.push_back(synthesize(v, c.final_center, c.cutoff, grid));
  }
  return OrbitalSet(std::move(out));
}

namespace {

// F(s) for a displaced by s, from momentum coefficients:
// <shift(a_i, s)|b_j> = sum_k conj(a_ik) b_jk e^{+i 2 pi k s}.
class ShiftedOverlap {
 public:
  ShiftedOverlap(const OrbitalSet& a, const OrbitalSet& b) : grid_(a.grid()), n_(a.size()) {
    if (a.size() != b.size()) throw std::invalid_argument("orbital sets differ in particle number");
    if (a.grid() != b.grid()) throw GridMismatch("orbital sets live on different grids");
    for (int i = 0; i < n_; ++i) {
      a_.push_back(to_momentum(a[i]));
      b_.push_back(to_momentum(b[i]));
    }
  }

  Eigen::MatrixXcd matrix(double s) const {
    const int size = grid_.size();
    std::vector<cplx> phase(static_cast<std::size_t>(size));
    for (int j = 0; j < size; ++j) phase[static_cast<std::size_t>(j)] = std::polar(1.0, kTwoPi * grid_.momentum(j) * s);
    Eigen::MatrixXcd m(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) {
        cplx sum = 0.0;
        const auto& ai = a_[static_cast<std::size_t>(i)];
        const auto& bk = b_[static_cast<std::size_t>(k)];
        for (int j = 0; j < size; ++j) {
          const auto u = static_cast<std::size_t>(j);
          sum += std::conj(ai[u]) * bk[u] * phase[u];
        }
        m(i, k) = sum;
      }
    }
    return m;
  }

  double fidelity(double s) const { return std::norm(matrix(s).partialPivLu().determinant()); }

 private:
  RingGrid grid_;
  int n_;
  std::vector<std::vector<cplx>> a_;
  std::vector<std::vector<cplx>> b_;
};

}  // namespace

FidelityReport shift_maximized_fidelity(const OrbitalSet& a, const OrbitalSet& b) {
  const ShiftedOverlap overlap(a, b);
  constexpr int kSamples = 256;
  double best_s = 0.0;
  double best_f = -1.0;
  for (int i = 0; i < kSamples; ++i) {
    const double s = static_cast<double>(i) / kSamples;
    const double f = overlap.fidelity(s);
    if (f > best_f) {
      best_f = f;
      best_s = s;
    }
  }

  // Golden-section refinement inside the neighbouring coarse cells.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_s - 1.0 / kSamples;
  double hi = best_s + 1.0 / kSamples;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = overlap.fidelity(c);
  double fd = overlap.fidelity(d);
  while (hi - lo > 1e-6) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = overlap.fidelity(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = overlap.fidelity(d);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double f_mid = overlap.fidelity(mid);
  if (f_mid > best_f) {
    best_f = f_mid;
    best_s = mid;
  }
  best_s -= std::floor(best_s);
  if (best_s >= 1.0) best_s = 0.0;

  FidelityReport r = report_from_overlaps(overlap.matrix(best_s));
  r.shift = best_s;
  return r;
}

void write_fidelity_header(std::ostream& os) { os << "N,F,fermi_edge_F,s_star\n"; }

void write_fidelity_row(std::ostream& os, const FidelityReport& r) {
  os << r.particles << ',' << CsvWriter::format(r.fidelity) << ',' << CsvWriter::format(r.fermi_edge) << ','
     << (r.shift ? CsvWriter::format(*r.shift) : std::string("nan")) << '\n';
}

}  // namespace noonring
