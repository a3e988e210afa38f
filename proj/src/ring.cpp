#include "noonring/ring.hpp"

#include <cmath>
#include <string>

#include "noonring/fft.hpp"

namespace noonring {

RingGrid::RingGrid(int size) : size_(size) {
  if (size % 2 != 0) {
    throw std::invalid_argument("grid size must be even, got " + std::to_string(size));
  }
  if (size < kMinSize || size > kMaxSize) {
    throw std::invalid_argument("grid size out of range [16, 65536]: " + std::to_string(size));
  }
}

std::vector<double> RingGrid::points() const {
  std::vector<double> xs(static_cast<std::size_t>(size_));
  for (int m = 0; m < size_; ++m) xs[static_cast<std::size_t>(m)] = x(m);
  return xs;
}

Wavefunction::Wavefunction(RingGrid grid, std::vector<cplx> amps)
    : grid_(grid), amps_(std::move(amps)) {
  if (static_cast<int>(amps_.size()) != grid_.size()) {
    throw GridMismatch("amplitude count does not match grid size");
  }
}

Wavefunction Wavefunction::normalized(RingGrid grid, std::vector<cplx> amps) {
  Wavefunction psi(grid, std::move(amps));
  psi.normalize();
  return psi;
}

double Wavefunction::norm() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return std::sqrt(sum * grid_.dx());
}

void Wavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero or non-finite state");
  *this *= cplx(1.0 / n);
}

Wavefunction& Wavefunction::operator*=(cplx factor) {
  for (auto& a : amps_) a *= factor;
  return *this;
}

const char* to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::None: return "none";
    case PotentialKind::DeltaBarrier: return "delta";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Sinusoidal: return "sinusoidal";
  }
  return "?";
}

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "none") return PotentialKind::None;
  if (name == "delta") return PotentialKind::DeltaBarrier;
  if (name == "harmonic" || name == "VH") return PotentialKind::Harmonic;
  if (name == "sinusoidal" || name == "VS") return PotentialKind::Sinusoidal;
  throw std::invalid_argument("unknown potential kind '" + std::string(name) + "'");
}

double wrap_displacement(double x, double x0) {
  double r = x - x0 + 0.5;
  r -= std::floor(r);
  // r - floor(r) rounds up to exactly 1 for tiny negative r.
  if (r >= 1.0) r = 0.0;
  return r - 0.5;
}

int nearest_index(const RingGrid& grid, double x) {
  const double u = wrap_displacement(x, -0.5);  // x + 1/2 reduced to [-1/2, 1/2)
  const double pos = (u < 0.0 ? u + 1.0 : u) / grid.dx();
  auto idx = static_cast<long>(std::lround(pos));
  return static_cast<int>(idx % grid.size());
}

void eval_potential(const Potential& p, const RingGrid& grid, std::span<double> out) {
  if (static_cast<int>(out.size()) != grid.size()) throw GridMismatch("potential buffer size mismatch");
  switch (p.kind) {
    case PotentialKind::None:
      std::fill(out.begin(), out.end(), 0.0);
      break;
    case PotentialKind::DeltaBarrier:
      std::fill(out.begin(), out.end(), 0.0);
      out[static_cast<std::size_t>(nearest_index(grid, p.x0))] = p.b / grid.dx();
      break;
    case PotentialKind::Harmonic:
      for (int m = 0; m < grid.size(); ++m) {
        const double u = wrap_displacement(grid.x(m), p.x0);
        out[static_cast<std::size_t>(m)] = 0.5 * p.omega2 * u * u;
      }
      break;
    case PotentialKind::Sinusoidal: {
      const double pref = p.omega2 / (2.0 * kPi * kPi);
      for (int m = 0; m < grid.size(); ++m) {
        const double s = std::sin(kPi * (grid.x(m) - p.x0));
        out[static_cast<std::size_t>(m)] = pref * s * s;
      }
      break;
    }
  }
}

std::vector<double> eval_potential(const Potential& p, const RingGrid& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  eval_potential(p, grid, v);
  return v;
}

cplx inner(const Wavefunction& a, const Wavefunction& b) {
  if (a.grid() != b.grid()) throw GridMismatch("inner product of states on different grids");
  cplx sum = 0.0;
  const auto aa = a.amps();
  const auto bb = b.amps();
  for (std::size_t m = 0; m < aa.size(); ++m) sum += std::conj(aa[m]) * bb[m];
  return sum * a.grid().dx();
}

Wavefunction plane_wave(int k, const RingGrid& grid) {
  if (2 * std::abs(k) >= grid.size()) {
    throw std::invalid_argument("plane wave k=" + std::to_string(k) + " aliases on a grid of " +
                                std::to_string(grid.size()) + " points");
  }
  std::vector<cplx> amps(static_cast<std::size_t>(grid.size()));
  for (int m = 0; m < grid.size(); ++m) {
    amps[static_cast<std::size_t>(m)] = std::polar(1.0, kTwoPi * k * grid.x(m));
  }
  return Wavefunction(grid, std::move(amps));
}

namespace {

// e^{i 2 pi k x_m} = (-1)^k e^{i 2 pi k m / M} since x_0 = -1/2.
inline double parity_sign(int k) { return (k & 1) ? -1.0 : 1.0; }

}  // namespace

std::vector<cplx> to_momentum(const Wavefunction& psi) {
  const RingGrid& g = psi.grid();
  std::vector<cplx> c(psi.amps().begin(), psi.amps().end());
  FourierTransform(g.size()).forward(c);
  const double scale = 1.0 / g.size();
  for (int j = 0; j < g.size(); ++j) c[static_cast<std::size_t>(j)] *= scale * parity_sign(g.momentum(j));
  return c;
}

Wavefunction from_momentum(const RingGrid& grid, std::span<const cplx> coeffs) {
  if (static_cast<int>(coeffs.size()) != grid.size()) throw GridMismatch("coefficient count mismatch");
  std::vector<cplx> amps(coeffs.begin(), coeffs.end());
  for (int j = 0; j < grid.size(); ++j) amps[static_cast<std::size_t>(j)] *= parity_sign(grid.momentum(j));
  FourierTransform(grid.size()).backward(amps);
  return Wavefunction(grid, std::move(amps));
}

double mean_momentum(const Wavefunction& psi) {
  const auto c = to_momentum(psi);
  double p = 0.0;
  double n = 0.0;
  for (int j = 0; j < psi.size(); ++j) {
    const double w = std::norm(c[static_cast<std::size_t>(j)]);
    p += kTwoPi * psi.grid().momentum(j) * w;
    n += w;
  }
  return p / n;
}

Wavefunction shift_wavefunction(const Wavefunction& psi, double s) {
  const RingGrid& g = psi.grid();
  s -= std::floor(s);  // phases e^{-i 2 pi k s} have period 1 in s
  std::vector<cplx> c(psi.amps().begin(), psi.amps().end());
  FourierTransform fft(g.size());
  fft.forward(c);
  const double scale = 1.0 / g.size();
  for (int j = 0; j < g.size(); ++j) {
    c[static_cast<std::size_t>(j)] *= std::polar(scale, -kTwoPi * g.momentum(j) * s);
  }
  fft.backward(c);
  return Wavefunction(g, std::move(c));
}

Wavefunction boost(const Wavefunction& psi, int n) {
  Wavefunction out = psi;
  const RingGrid& g = psi.grid();
  for (int m = 0; m < g.size(); ++m) out[m] *= std::polar(1.0, kTwoPi * n * g.x(m));
  return out;
}

}  // namespace noonring
