#include "noonring/crab.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "noonring/csv.hpp"
#include "noonring/rng.hpp"

namespace noonring {

double lambda_weight(double t, double T) {
  if (!(t > 0.0 && t < T)) throw std::domain_error("lambda_weight: need 0 < t < T");
  return T * T / (4.0 * t * (t - T));
}

double crab_gamma(const CrabCoefficients& c, double T, double t) {
  if (t <= 0.0 || t >= T) return 1.0;
  double sum = 0.0;
  for (int j = 0; j <= c.J; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double phase = c.nu[u] * t;
    sum += c.A[u] * std::sin(phase) + c.B[u] * std::cos(phase);
  }
  // Dividing by lambda is multiplying by 4 t (t - T) / T^2.
  return 1.0 + sum * 4.0 * t * (t - T) / (T * T);
}

double eval_pulse(const CrabPulse& p, double t) { return p.guess(t) * crab_gamma(p.coeffs, p.T, t); }

CrabCoefficients initial_coefficients(int J, double T, std::mt19937_64& rng) {
  if (J < 1) throw std::invalid_argument("CRAB needs J >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("CRAB needs T > 0");
  CrabCoefficients c;
  c.J = J;
  c.A.assign(static_cast<std::size_t>(J + 1), 0.0);
  c.B.assign(static_cast<std::size_t>(J + 1), 0.0);
  c.nu.resize(static_cast<std::size_t>(J + 1));
  // 1 - u with u in [0, 1) lies in (0, 1]
  c.nu[0] = kTwoPi / T * 0.5 * (1.0 - uniform(rng, 0.0, 1.0));
  for (int j = 1; j <= J; ++j) c.nu[static_cast<std::size_t>(j)] = kTwoPi * j / T * (1.0 + uniform(rng, -0.5, 0.5));
  return c;
}

const char* to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::Omega: return "omega";
    case ControlKind::Barrier: return "b";
    case ControlKind::Both: return "both";
  }
  return "?";
}

ControlKind parse_control_kind(std::string_view name) {
  if (name == "omega" || name == "Omega") return ControlKind::Omega;
  if (name == "b" || name == "barrier") return ControlKind::Barrier;
  if (name == "both") return ControlKind::Both;
  throw std::invalid_argument("unknown control kind '" + std::string(name) + "'");
}

const char* to_string(FidelityMetric metric) {
  return metric == FidelityMetric::FermiEdge ? "fermi_edge" : "full_tg";
}

FidelityMetric parse_fidelity_metric(std::string_view name) {
  if (name == "fermi_edge") return FidelityMetric::FermiEdge;
  if (name == "full_tg") return FidelityMetric::FullTg;
  throw std::invalid_argument("unknown fidelity metric '" + std::string(name) + "'");
}

namespace {

int pulse_count(ControlKind kind) { return kind == ControlKind::Both ? 2 : 1; }

int window_for(const CrabSettings& s) {
  // The target window is centred on k = 1 at Omega = pi.
  return std::min(s.cutoff, s.grid_size / 2 - 2);
}

CrabSettings checked(CrabSettings s) {
  if (s.particles < 1) throw std::invalid_argument("CRAB needs at least one particle");
  if (!(s.T > 0.0)) throw std::invalid_argument("CRAB needs T > 0");
  if (s.J < 1) throw std::invalid_argument("CRAB needs J >= 1");
  if (!(s.b_fixed >= 0.0)) throw std::invalid_argument("CRAB needs b_fixed >= 0");
  if (!(s.dt > 0.0) || s.dt > s.T) throw std::invalid_argument("CRAB needs 0 < dt <= T");
  return s;
}

}  // namespace

CrabProblem::CrabProblem(const CrabSettings& settings)
    : settings_(checked(settings)),
      grid_(settings.grid_size),
      initial_(crab_orbitals(settings.particles, settings.b_fixed, 0.0, grid_, window_for(settings))),
      targets_(crab_targets(settings.particles, settings.b_fixed, kPi, grid_, window_for(settings))) {}

std::size_t CrabProblem::dimension() const {
  return static_cast<std::size_t>(3 * (settings_.J + 1) * pulse_count(settings_.kind));
}

std::vector<double> CrabProblem::initial_vector() const {
  auto rng = make_rng(settings_.seed, "crab.frequencies");
  std::vector<double> x;
  for (int p = 0; p < pulse_count(settings_.kind); ++p) {
    const CrabCoefficients c = initial_coefficients(settings_.J, settings_.T, rng);
    x.insert(x.end(), c.A.begin(), c.A.end());
    x.insert(x.end(), c.B.begin(), c.B.end());
    x.insert(x.end(), c.nu.begin(), c.nu.end());
  }
  return x;
}

CrabControls CrabProblem::decode(std::span<const double> x) const {
  if (x.size() != dimension()) throw std::invalid_argument("CRAB vector has the wrong length");
  const int J = settings_.J;
  const double T = settings_.T;
  auto read = [&](std::size_t offset) {
    CrabCoefficients c;
    c.J = J;
    const auto n = static_cast<std::size_t>(J + 1);
    c.A.assign(x.begin() + offset, x.begin() + offset + n);
    c.B.assign(x.begin() + offset + n, x.begin() + offset + 2 * n);
    c.nu.assign(x.begin() + offset + 2 * n, x.begin() + offset + 3 * n);
    for (auto& v : c.nu) v = std::abs(v);
    return c;
  };
  const double b0 = settings_.b_fixed;
  auto omega_guess = [T](double t) { return kPi * t / T; };
  auto barrier_guess = [b0](double) { return b0; };

  CrabControls out;
  std::size_t offset = 0;
  if (settings_.kind != ControlKind::Barrier) {
    out.omega = CrabPulse{omega_guess, read(offset), T};
    offset += 3 * static_cast<std::size_t>(J + 1);
  }
  if (settings_.kind != ControlKind::Omega) out.barrier = CrabPulse{barrier_guess, read(offset), T};
  return out;
}

double CrabProblem::omega(const CrabControls& c, double t) const {
  return c.omega ? eval_pulse(*c.omega, t) : kPi * t / settings_.T;
}

double CrabProblem::barrier(const CrabControls& c, double t) const {
  const double b = c.barrier ? eval_pulse(*c.barrier, t) : settings_.b_fixed;
  return settings_.allow_negative_b ? b : std::max(b, 0.0);
}

DriveSchedule CrabProblem::schedule(const CrabControls& c) const {
  DriveSchedule s;
  s.duration = settings_.T;
  s.frame = Frame::Comoving;
  s.omega = [this, c](double t) { return omega(c, t); };
  s.barrier = [this, c](double t) { return barrier(c, t); };
  return s;
}

double CrabProblem::infidelity(std::span<const double> x) const {
  for (double v : x)
    if (!std::isfinite(v)) return 1.0;
  const int n = settings_.particles;
  const DriveSchedule sched = schedule(decode(x));
  PropagationConfig cfg;
  cfg.dt = settings_.dt;
  try {
    if (settings_.metric == FidelityMetric::FermiEdge) {
      const Wavefunction out = propagate(initial_[n - 1], sched, cfg);
      return 1.0 - fidelity(targets_[n - 1], out);
    }
    auto result = propagate(initial_.orbitals(), sched, cfg);
    return 1.0 - tg_fidelity(OrbitalSet(std::move(result.states)), targets_).fidelity;
  } catch (const PropagationError& e) {
    std::cerr << "crab: " << e.what() << "; scoring as infidelity 1\n";
    return 1.0;
  }
}

FidelityReport CrabProblem::evaluate(std::span<const double> x) const {
  PropagationConfig cfg;
  cfg.dt = settings_.dt;
  auto result = propagate(initial_.orbitals(), schedule(decode(x)), cfg);
  return tg_fidelity(OrbitalSet(std::move(result.states)), targets_);
}

Objective make_objective(const CrabProblem& problem) {
  return [&problem](std::span<const double> x) { return problem.infidelity(x); };
}

std::vector<PulseSample> sample_pulse(const CrabProblem& problem, std::span<const double> x) {
  const CrabControls c = problem.decode(x);
  const double T = problem.settings().T;
  const long steps = static_cast<long>(std::ceil(T / problem.settings().dt - 1e-9));
  std::vector<PulseSample> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long n = 0; n <= steps; ++n) {
    const double t = n == steps ? T : T * static_cast<double>(n) / static_cast<double>(steps);
    out.push_back({t, problem.omega(c, t), problem.barrier(c, t)});
  }
  return out;
}

ExperimentResult optimize_experiment(const CrabSettings& settings) {
  const CrabProblem problem(settings);
  const std::vector<double> x0 = problem.initial_vector();

  NelderMeadOptions opts;
  opts.max_evals = settings.max_evals;
  opts.restarts = settings.restarts;
  opts.seed = settings.seed;

  ExperimentResult r;
  r.optimization = nelder_mead(make_objective(problem), x0, opts);
  // x0 is the first evaluation, so trace[0] is the baseline.
  r.baseline_infidelity = r.optimization.trace.front().best;
  r.final_infidelity = r.optimization.best_value;
  if (settings.particles == 1 || settings.metric == FidelityMetric::FullTg) {
    r.baseline_full_tg = r.baseline_infidelity;
    r.final_full_tg = r.final_infidelity;
  } else {
    r.baseline_full_tg = 1.0 - problem.evaluate(x0).fidelity;
    r.final_full_tg = 1.0 - problem.evaluate(r.optimization.best_x).fidelity;
  }
  r.pulse = sample_pulse(problem, r.optimization.best_x);
  return r;
}

void write_pulse_csv(std::ostream& os, const std::vector<PulseSample>& pulse) {
  CsvWriter w(os, {"t", "omega", "b"});
  for (const auto& p : pulse) w.row({p.t, p.omega, p.b});
}

void write_trace_csv(std::ostream& os, const OptimizationResult& r) {
  CsvWriter w(os, {"eval", "best_infidelity"});
  for (const auto& p : r.trace) w.row({static_cast<std::int64_t>(p.evaluation), p.best});
}

void write_crab_summary_header(std::ostream& os) {
  os << "kind,N,T,J,seed,final_infidelity,baseline_infidelity\n";
}

void write_crab_summary_row(std::ostream& os, const CrabSettings& s, const ExperimentResult& r) {
  os << to_string(s.kind) << ',' << s.particles << ',' << CsvWriter::format(s.T) << ',' << s.J << ',' << s.seed << ','
     << CsvWriter::format(r.final_full_tg) << ',' << CsvWriter::format(r.baseline_full_tg) << '\n';
}

}  // namespace noonring
