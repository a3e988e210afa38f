#include "noonring/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>
#include <sstream>

#include "noonring/csv.hpp"
#include "noonring/parallel.hpp"

namespace noonring {

cplx potential_fourier(const Potential& p, int q) {
  const cplx position_phase = std::polar(1.0, -kTwoPi * q * p.x0);
  switch (p.kind) {
    case PotentialKind::None:
      return 0.0;
    case PotentialKind::DeltaBarrier:
      return p.b * position_phase;
    case PotentialKind::Harmonic: {
      // Wrapped parabola u^2 on [-1/2, 1/2): mean 1/12, cosine moments (-1)^q/(2 pi^2 q^2).
      if (q == 0) return p.omega2 / 24.0;
      const double sign = (q & 1) ? -1.0 : 1.0;
      const double denom = kTwoPi * q;
      return p.omega2 * sign / (denom * denom) * position_phase;
    }
    case PotentialKind::Sinusoidal: {
      if (q == 0) return p.omega2 / (4.0 * kPi * kPi);
      if (q == 1 || q == -1) return -p.omega2 / (8.0 * kPi * kPi) * position_phase;
      return 0.0;
    }
  }
  return 0.0;
}

MomentumHamiltonian build_hamiltonian(double omega, const Potential& p, int cutoff) {
  if (cutoff < 8) throw std::invalid_argument("momentum cutoff must be at least 8");
  MomentumHamiltonian h;
  h.omega = omega;
  h.potential = p;
  h.cutoff = cutoff;
  h.center = static_cast<int>(std::floor(omega / kTwoPi + 0.5));
  const int dim = h.dim();

  // V(k - k') depends on the difference only; tabulate once.
  std::vector<cplx> vq(static_cast<std::size_t>(2 * dim - 1));
  for (int q = -(dim - 1); q <= dim - 1; ++q) vq[static_cast<std::size_t>(q + dim - 1)] = potential_fourier(p, q);

  h.matrix.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) h.matrix(i, j) = vq[static_cast<std::size_t>(i - j + dim - 1)];
    const double kin = kTwoPi * h.momentum(i) - omega;
    h.matrix(i, i) += 0.5 * kin * kin;
  }
  return h;
}

Eigensystem eigensystem(const MomentumHamiltonian& h, int n) {
  if (n < 1 || n > h.dim()) throw std::invalid_argument("requested level count exceeds basis size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  Eigensystem es;
  es.cutoff = h.cutoff;
  es.center = h.center;
  es.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  es.coefficients = solver.eigenvectors().leftCols(n);
  return es;
}

Wavefunction synthesize(const Eigen::VectorXcd& coeffs, int center, int cutoff, const RingGrid& grid) {
  const int half = grid.size() / 2;
  if (center - cutoff < -half || center + cutoff >= half) {
    throw std::invalid_argument("basis momenta exceed the grid's representable band");
  }
  std::vector<cplx> slots(static_cast<std::size_t>(grid.size()), cplx(0.0));
  for (int i = 0; i < coeffs.size(); ++i) slots[static_cast<std::size_t>(grid.slot(center - cutoff + i))] = coeffs(i);
  Wavefunction psi = from_momentum(grid, slots);
  psi.normalize();
  return psi;
}

Eigenstates eigenstates(const MomentumHamiltonian& h, int n, const RingGrid& grid) {
  const Eigensystem es = eigensystem(h, n);
  Eigenstates out;
  out.energies = es.energies;
  for (int j = 0; j < n; ++j) out.orbitals.push_back(synthesize(es.coefficients.col(j), es.center, es.cutoff, grid));
  return out;
}

const char* column_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::Omega: return "omega";
    case SweepParameter::Barrier: return "b";
    case SweepParameter::TrapFrequency: return "trap_omega";
  }
  return "?";
}

SpectrumTable sweep_spectrum(SweepParameter param, const std::vector<double>& values, const SweepBase& base,
                             int n_levels, bool keep_vectors, int threads) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one parameter value");
  SpectrumTable table;
  table.parameter = param;
  table.values = values;
  table.energies.resize(values.size());
  table.systems.resize(values.size());

  parallel_for(values.size(), threads, [&](std::size_t i) {
    double omega = base.omega;
    Potential p = base.potential;
    switch (param) {
      case SweepParameter::Omega:
        omega = values[i];
        break;
      case SweepParameter::Barrier:
        p = Potential::delta(values[i], base.potential.x0);
        break;
      case SweepParameter::TrapFrequency:
        if (p.kind != PotentialKind::Harmonic && p.kind != PotentialKind::Sinusoidal) p.kind = PotentialKind::Harmonic;
        p.omega2 = values[i] * values[i];
        break;
    }
    Eigensystem es = eigensystem(build_hamiltonian(omega, p, base.cutoff), n_levels);
    table.energies[i] = es.energies;
    if (keep_vectors) table.systems[i] = std::move(es);
  });
  if (!keep_vectors) table.systems.clear();
  return table;
}

void write_spectrum_csv(std::ostream& os, const SpectrumTable& table) {
  const std::size_t levels = table.energies.front().size();
  std::vector<std::string> header{column_name(table.parameter)};
  for (std::size_t n = 0; n < levels; ++n) header.push_back("E" + std::to_string(n));
  CsvWriter csv(os, std::move(header));
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    std::vector<CsvWriter::Cell> row{table.values[i]};
    for (double e : table.energies[i]) row.emplace_back(e);
    csv.row(row);
  }
}

namespace {

// |<a|b>| over the momenta both windows share.
double window_overlap(const Eigen::VectorXcd& a, int center_a, const Eigen::VectorXcd& b, int center_b, int cutoff) {
  const int lo = std::max(center_a, center_b) - cutoff;
  const int hi = std::min(center_a, center_b) + cutoff;
  cplx sum = 0.0;
  for (int k = lo; k <= hi; ++k) sum += std::conj(a(k - center_a + cutoff)) * b(k - center_b + cutoff);
  return std::abs(sum);
}

std::string interval_text(double from, double to) {
  std::ostringstream os;
  os.precision(10);
  os << "[" << from << ", " << to << "]";
  return os.str();
}

}  // namespace

Continuation adiabatic_continuation(const SpectrumTable& table, int level) {
  if (table.systems.size() != table.values.size()) {
    throw std::invalid_argument("adiabatic continuation needs a table with eigenvectors");
  }
  const auto& first = table.systems.front();
  if (level < 0 || level >= static_cast<int>(first.energies.size())) throw std::invalid_argument("level out of range");

  auto degenerate = [](const Eigensystem& es, int j) {
    const double scale = 1e-10 * (1.0 + std::abs(es.energies[static_cast<std::size_t>(j)]));
    const auto n = static_cast<int>(es.energies.size());
    const auto e = [&](int i) { return es.energies[static_cast<std::size_t>(i)]; };
    return (j > 0 && std::abs(e(j) - e(j - 1)) < scale) || (j + 1 < n && std::abs(e(j + 1) - e(j)) < scale);
  };

  Continuation c;
  c.cutoff = first.cutoff;
  c.levels.push_back(level);
  Eigen::VectorXcd tracked = first.coefficients.col(level);
  int center = first.center;

  for (std::size_t i = 1; i < table.systems.size(); ++i) {
    const auto& es = table.systems[i];
    const double from = table.values[i - 1];
    const double to = table.values[i];
    int best = -1;
    double best_overlap = -1.0;
    for (int j = 0; j < es.coefficients.cols(); ++j) {
      const double ov = window_overlap(tracked, center, es.coefficients.col(j), es.center, es.cutoff);
      if (ov > best_overlap) {
        best_overlap = ov;
        best = j;
      }
    }
    if (best_overlap <= 0.5) {
      throw TrackingError("ambiguous tracking: best overlap " + std::to_string(best_overlap) + " on " +
                              interval_text(from, to),
                          from, to);
    }
    if (best != c.levels.back()) {
      throw TrackingError("tracked branch changed level index on " + interval_text(from, to) + " (true crossing)",
                          from, to);
    }
    if (degenerate(es, best)) {
      throw TrackingError("tracked level is degenerate on " + interval_text(from, to), from, to);
    }
    c.min_overlap = std::min(c.min_overlap, best_overlap);
    c.levels.push_back(best);
    tracked = es.coefficients.col(best);
    center = es.center;
  }
  c.final_coefficients = tracked;
  c.final_center = center;
  c.final_energy = table.systems.back().energies[static_cast<std::size_t>(c.levels.back())];
  return c;
}

std::vector<Continuation> continue_in_omega(const std::vector<int>& levels, double from, double to,
                                            const Potential& p, int cutoff, double step) {
  if (levels.empty()) return {};
  const int n_levels = *std::max_element(levels.begin(), levels.end()) + 2;
  const double span = to - from;
  auto intervals = static_cast<int>(std::ceil(std::abs(span) / step - 1e-12));
  intervals = std::max(intervals, 1);

  constexpr int kMaxHalvings = 3;
  for (int attempt = 0;; ++attempt) {
    std::vector<double> values(static_cast<std::size_t>(intervals + 1));
    for (int i = 0; i <= intervals; ++i) values[static_cast<std::size_t>(i)] = from + span * i / intervals;
    if (span == 0.0) values.resize(1);
    const SpectrumTable table =
        sweep_spectrum(SweepParameter::Omega, values, SweepBase{0.0, p, cutoff}, n_levels, true);
    std::vector<Continuation> result;
    bool refine = false;
    try {
      for (int level : levels) {
        result.push_back(adiabatic_continuation(table, level));
        if (result.back().min_overlap <= 0.9) refine = true;
      }
    } catch (const TrackingError&) {
      if (attempt >= kMaxHalvings) throw;
      refine = true;
    }
    if (!refine || attempt >= kMaxHalvings) return result;
    intervals *= 2;
  }
}

}  // namespace noonring
