#include "noonring/cli.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "noonring/crab.hpp"
#include "noonring/csv.hpp"
#include "noonring/propagator.hpp"
#include "noonring/spectra.hpp"
#include "noonring/sta.hpp"
#include "noonring/tg.hpp"

namespace noonring::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ParamSpec p(std::string key, std::string type, json def, std::string help) {
  return {std::move(key), std::move(type), std::move(def), std::move(help)};
}

std::vector<ExperimentSpec> build_schema() {
  const ParamSpec seed = p("seed", "uint", 0, "run seed; every random stream is derived from it");
  std::vector<ExperimentSpec> out;
  out.push_back({"spectrum",
                 "lowest levels of the single-particle ring Hamiltonian along a parameter sweep",
                 {"spectrum.csv"},
                 {p("parameter", "string", "omega", "swept quantity: omega, b or trap_omega"),
                  p("from", "number", 0.0, "first sweep value"),
                  p("to", "number", 4.0 * kPi, "last sweep value"),
                  p("points", "int", 201, "number of sweep values"),
                  p("levels", "int", 8, "number of eigenvalues per point"),
                  p("potential", "string", "delta", "none, delta, harmonic or sinusoidal"),
                  p("b", "number", 2.0, "delta barrier height"),
                  p("omega", "number", 0.0, "frame rotation rate when not swept"),
                  p("trap_omega", "number", 0.0, "trap frequency when not swept"),
                  p("x0", "number", 0.0, "barrier or trap centre"),
                  p("cutoff", "int", 64, "momentum window half-width K"), seed}});
  out.push_back({"crab",
                 "CRAB optimization of the barrier acceleration 0 -> pi",
                 {"pulse.csv", "trace.csv", "summary.csv"},
                 {p("kind", "string", "omega", "controlled pulses: omega, b or both"),
                  p("N", "int", 1, "particle number"),
                  p("b", "number", 1.0, "fixed barrier height and barrier guess"),
                  p("T", "number", 10.0, "process time"),
                  p("J", "int", 15, "highest CRAB harmonic"),
                  p("metric", "string", "fermi_edge", "fermi_edge or full_tg"),
                  p("grid_size", "int", 32, "grid points M"),
                  p("dt", "number", 1e-4, "time step"),
                  p("cutoff", "int", 64, "momentum window for initial and target orbitals"),
                  p("allow_negative_b", "bool", false, "permit attractive barrier excursions"),
                  p("max_evals", "int", 2000, "objective evaluations per optimizer pass"),
                  p("restarts", "int", 3, "optimizer passes after the first"), seed}});
  out.push_back({"sta",
                 "five-step shortcut protocol: raise, squeeze, transport, unsqueeze, lower",
                 {"schedule.csv", "fidelity.csv"},
                 {p("N", "int", 1, "odd particle number"),
                  p("trap", "string", "harmonic", "harmonic or sinusoidal"),
                  p("omega0", "number", 2.0, "trap frequency after the raise"),
                  p("omega_f", "number", 100.0, "squeezed trap frequency"),
                  p("d", "number", 100.0, "transport distance (unwrapped)"),
                  p("Omega_f_over_pi", "number", 10.0, "final rotation rate in units of pi"),
                  p("tau_raise", "number", 10.0, "raise duration"),
                  p("tau_squeeze", "number", 10.0, "squeeze duration"),
                  p("tau_transport", "number", 10.0, "transport duration"),
                  p("tau_unsqueeze", "number", 10.0, "unsqueeze duration"),
                  p("tau_lower", "number", 10.0, "lower duration"),
                  p("tau_drift", "number", 0.0, "free drift after the lower"),
                  p("transport_omega", "number|null", nullptr, "frequency in the transport equations (omega_f if null)"),
                  p("grid_size", "int", 256, "grid points M"),
                  p("dt", "number", 1e-4, "time step"),
                  p("schedule_dt", "number", 0.01, "sampling step of schedule.csv"), seed}});
  out.push_back({"tg-fidelity",
                 "many-body fidelity between two orbital sets",
                 {"fidelity.csv"},
                 {p("a", "string", "sta_target", "first set: sta_initial, sta_target, crab_initial, crab_target, crab_eigen"),
                  p("b_set", "string", "sta_target", "second set, same choices"),
                  p("N", "int", 3, "particle number"),
                  p("grid_size", "int", 128, "grid points M"),
                  p("barrier", "number", 1.0, "barrier height for crab_* sets"),
                  p("omega", "number", 0.0, "rotation rate for crab_eigen"),
                  p("boost_a", "int", 0, "integer boost applied to set a"),
                  p("shift_a", "number", 0.0, "displacement applied to set a"),
                  p("shift_maximize", "bool", true, "maximize over a common displacement"),
                  p("cutoff", "int", 60, "momentum window for crab_* sets"), seed}});
  out.push_back({"propagate",
                 "split-step evolution of a single state under a constant drive",
                 {"state.csv", "summary.csv"},
                 {p("initial", "string", "plane_wave", "plane_wave, delta_ground or trap_ground"),
                  p("k", "int", 0, "plane-wave momentum quantum number"),
                  p("potential", "string", "none", "none, delta, harmonic or sinusoidal"),
                  p("b", "number", 1.0, "delta barrier height"),
                  p("trap_omega", "number", 0.0, "trap frequency"),
                  p("x0", "number", 0.0, "trap centre (lab)"),
                  p("omega", "number", 0.0, "barrier/frame rotation rate"),
                  p("frame", "string", "comoving", "lab or comoving"),
                  p("T", "number", 1.0, "duration"),
                  p("dt", "number", 1e-4, "time step"),
                  p("grid_size", "int", 256, "grid points M"),
                  p("record_stride", "int", 0, "snapshot every n steps (0: initial and final only)"), seed}});
  return out;
}

bool matches(const std::string& type, const json& v) {
  if (type == "int") return v.is_number_integer();
  if (type == "uint") return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (type == "number") return v.is_number();
  if (type == "number|null") return v.is_number() || v.is_null();
  if (type == "bool") return v.is_boolean();
  if (type == "string") return v.is_string();
  return false;
}

void assign(json& config, const ExperimentSpec& spec, const std::string& key, const json& value,
            const std::string& origin) {
  if (key == "experiment") {
    if (!value.is_string() || value.get<std::string>() != spec.name) {
      throw ConfigError(origin + ": config is for experiment " + value.dump() + ", not " + spec.name);
    }
    return;
  }
  for (const auto& ps : spec.params) {
    if (ps.key != key) continue;
    if (!matches(ps.type, value)) {
      throw ConfigError(origin + ": key '" + key + "' expects " + ps.type + ", got " + value.dump());
    }
    config[key] = value;
    return;
  }
  throw ConfigError(origin + ": unknown key '" + key + "' for experiment " + spec.name);
}

json parse_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return text;
  return v;
}

// Output files held in memory until the run succeeds.
class Artifacts {
 public:
  std::ostringstream& open(const std::string& name) {
    names_.push_back(name);
    return files_[name];
  }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& name : names_) write_atomic(dir / name, files_.at(name).str());
  }

  const std::vector<std::string>& names() const { return names_; }

  static void write_atomic(const fs::path& target, const std::string& content) {
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
      os << content;
      os.flush();
      if (!os) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::ostringstream> files_;
};

template <class T>
T get(const json& c, const char* key) {
  return c.at(key).get<T>();
}

int positive_int(const json& c, const char* key) {
  const int v = get<int>(c, key);
  if (v <= 0) throw ConfigError(std::string("key '") + key + "' must be positive");
  return v;
}

void run_spectrum(const json& c, int threads, Artifacts& out) {
  const std::string param = get<std::string>(c, "parameter");
  SweepParameter sp;
  if (param == "omega") sp = SweepParameter::Omega;
  else if (param == "b") sp = SweepParameter::Barrier;
  else if (param == "trap_omega") sp = SweepParameter::TrapFrequency;
  else throw ConfigError("parameter must be omega, b or trap_omega");

  const int points = positive_int(c, "points");
  const double from = get<double>(c, "from");
  const double to = get<double>(c, "to");
  std::vector<double> values(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    values[static_cast<std::size_t>(i)] = points == 1 ? from : from + (to - from) * i / (points - 1);
  }

  SweepBase base;
  base.omega = get<double>(c, "omega");
  base.cutoff = get<int>(c, "cutoff");
  const PotentialKind kind = parse_potential_kind(get<std::string>(c, "potential"));
  const double x0 = get<double>(c, "x0");
  const double w = get<double>(c, "trap_omega");
  switch (kind) {
    case PotentialKind::None: base.potential = Potential::none(); break;
    case PotentialKind::DeltaBarrier: base.potential = Potential::delta(get<double>(c, "b"), x0); break;
    case PotentialKind::Harmonic: base.potential = Potential::harmonic(w * w, x0); break;
    case PotentialKind::Sinusoidal: base.potential = Potential::sinusoidal(w * w, x0); break;
  }
  const auto table = sweep_spectrum(sp, values, base, positive_int(c, "levels"), false, threads);
  write_spectrum_csv(out.open("spectrum.csv"), table);
}

void run_crab(const json& c, Artifacts& out, std::ostream& log) {
  CrabSettings s;
  s.kind = parse_control_kind(get<std::string>(c, "kind"));
  s.particles = positive_int(c, "N");
  s.b_fixed = get<double>(c, "b");
  s.T = get<double>(c, "T");
  s.J = positive_int(c, "J");
  s.metric = parse_fidelity_metric(get<std::string>(c, "metric"));
  s.grid_size = get<int>(c, "grid_size");
  s.dt = get<double>(c, "dt");
  s.cutoff = positive_int(c, "cutoff");
  s.allow_negative_b = get<bool>(c, "allow_negative_b");
  s.max_evals = positive_int(c, "max_evals");
  s.restarts = get<int>(c, "restarts");
  if (s.restarts < 0) throw ConfigError("restarts must be non-negative");
  s.seed = get<std::uint64_t>(c, "seed");

  const ExperimentResult r = optimize_experiment(s);
  log << "crab: baseline " << r.baseline_infidelity << " -> " << r.final_infidelity << " after "
      << r.optimization.evaluations << " evaluations\n";
  write_pulse_csv(out.open("pulse.csv"), r.pulse);
  write_trace_csv(out.open("trace.csv"), r.optimization);
  auto& summary = out.open("summary.csv");
  write_crab_summary_header(summary);
  write_crab_summary_row(summary, s, r);
}

void run_sta(const json& c, Artifacts& out, std::ostream& log) {
  StaParams p;
  p.omega0 = get<double>(c, "omega0");
  p.omegaf = get<double>(c, "omega_f");
  p.distance = get<double>(c, "d");
  p.velocity = get<double>(c, "Omega_f_over_pi") * kPi;
  p.tau_raise = get<double>(c, "tau_raise");
  p.tau_squeeze = get<double>(c, "tau_squeeze");
  p.tau_transport = get<double>(c, "tau_transport");
  p.tau_unsqueeze = get<double>(c, "tau_unsqueeze");
  p.tau_lower = get<double>(c, "tau_lower");
  p.tau_drift = get<double>(c, "tau_drift");
  p.trap = parse_potential_kind(get<std::string>(c, "trap"));
  if (!c.at("transport_omega").is_null()) p.transport_omega = get<double>(c, "transport_omega");

  const StaSchedule sched = build_protocol(p);
  PropagationConfig cfg;
  cfg.dt = get<double>(c, "dt");
  const StaReport r = run_protocol(positive_int(c, "N"), sched, get<int>(c, "grid_size"), cfg);
  if (r.inverted) log << "sta: trap frequency squared dips to " << r.min_omega2 << " (inverted trap)\n";
  log << "sta: infidelity " << 1.0 - r.shifted.fidelity << '\n';
  write_schedule_csv(out.open("schedule.csv"), sched, get<double>(c, "schedule_dt"));
  auto& f = out.open("fidelity.csv");
  write_sta_fidelity_header(f);
  write_sta_fidelity_row(f, sched, r);
}

OrbitalSet named_set(const std::string& name, const json& c, const RingGrid& grid) {
  const int n = positive_int(c, "N");
  const double b = get<double>(c, "barrier");
  const int cutoff = positive_int(c, "cutoff");
  if (name == "sta_initial") return sta_initial_orbitals(n, grid);
  if (name == "sta_target") return sta_target_orbitals(n, grid);
  if (name == "crab_initial") return crab_orbitals(n, b, 0.0, grid, cutoff);
  if (name == "crab_target") return crab_targets(n, b, kPi, grid, cutoff);
  if (name == "crab_eigen") return crab_orbitals(n, b, get<double>(c, "omega"), grid, cutoff);
  throw ConfigError("unknown orbital set '" + name + "'");
}

void run_tg_fidelity(const json& c, Artifacts& out) {
  const RingGrid grid(get<int>(c, "grid_size"));
  OrbitalSet a = named_set(get<std::string>(c, "a"), c, grid);
  const OrbitalSet b = named_set(get<std::string>(c, "b_set"), c, grid);
  const int k = get<int>(c, "boost_a");
  const double s = get<double>(c, "shift_a");
  if (k != 0 || s != 0.0) {
    std::vector<Wavefunction> moved;
    for (const auto& psi : a.orbitals()) moved.push_back(shift_wavefunction(boost(psi, k), s));
    a = OrbitalSet(std::move(moved));
  }
  const FidelityReport r = get<bool>(c, "shift_maximize") ? shift_maximized_fidelity(a, b) : tg_fidelity(a, b);
  auto& f = out.open("fidelity.csv");
  write_fidelity_header(f);
  write_fidelity_row(f, r);
}

void run_propagate(const json& c, Artifacts& out) {
  const RingGrid grid(get<int>(c, "grid_size"));
  const std::string init = get<std::string>(c, "initial");
  const PotentialKind kind = parse_potential_kind(get<std::string>(c, "potential"));
  const double b = get<double>(c, "b");
  const double w = get<double>(c, "trap_omega");
  const double x0 = get<double>(c, "x0");
  const double omega = get<double>(c, "omega");
  const std::string frame = get<std::string>(c, "frame");
  if (frame != "lab" && frame != "comoving") throw ConfigError("frame must be lab or comoving");

  Potential trap;
  if (kind == PotentialKind::Harmonic) trap = Potential::harmonic(w * w, x0);
  if (kind == PotentialKind::Sinusoidal) trap = Potential::sinusoidal(w * w, x0);

  Wavefunction psi0 = plane_wave(0, grid);
  if (init == "plane_wave") {
    psi0 = plane_wave(get<int>(c, "k"), grid);
  } else if (init == "delta_ground") {
    psi0 = crab_orbitals(1, b, omega, grid, std::min(64, grid.size() / 2 - 2))[0];
  } else if (init == "trap_ground") {
    if (trap.kind == PotentialKind::None) throw ConfigError("trap_ground needs a harmonic or sinusoidal potential");
    psi0 = shift_wavefunction(trap_eigenstates(1, trap.kind, w, grid)[0], x0);
  } else {
    throw ConfigError("initial must be plane_wave, delta_ground or trap_ground");
  }

  DriveSchedule sched;
  sched.duration = get<double>(c, "T");
  sched.frame = frame == "lab" ? Frame::Lab : Frame::Comoving;
  sched.omega = [omega](double) { return omega; };
  if (kind == PotentialKind::DeltaBarrier) sched.barrier = [b](double) { return b; };
  if (trap.kind != PotentialKind::None) sched.trap = [trap](double) { return trap; };

  PropagationConfig cfg;
  cfg.dt = get<double>(c, "dt");
  const int stride = get<int>(c, "record_stride");
  if (stride < 0) throw ConfigError("record_stride must be non-negative");
  cfg.record_stride = stride;
  auto result = propagate(std::span<const Wavefunction>(&psi0, 1), sched, cfg);
  if (result.snapshots.empty() || result.snapshots.back().t != sched.duration) {
    if (result.snapshots.empty()) result.snapshots.push_back({0.0, {psi0}});
    result.snapshots.push_back({sched.duration, result.states});
  }
  write_snapshots_csv(out.open("state.csv"), result.snapshots, 0);

  const Wavefunction& psi = result.states.front();
  CsvWriter w2(out.open("summary.csv"), {"t", "norm", "mean_momentum", "fidelity_initial", "frame_offset", "steps"});
  w2.row({sched.duration, psi.norm(), mean_momentum(psi), fidelity(psi0, psi), result.frame_offset,
          static_cast<std::int64_t>(result.steps)});
}

void error_record(std::ostream& err, const fs::path& dir, const std::string& kind, int code, const std::string& msg) {
  json rec = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", msg}}}};
  err << rec.dump() << '\n';
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    try {
      Artifacts::write_atomic(dir / "error.json", rec.dump(2) + "\n");
    } catch (const IoError&) {
      // the record on err is authoritative
    }
  }
}

}  // namespace

const std::vector<ExperimentSpec>& experiments() {
  static const std::vector<ExperimentSpec> schema = build_schema();
  return schema;
}

const ExperimentSpec& find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

void list_experiments(std::ostream& os) {
  for (const auto& e : experiments()) {
    os << e.name << ": " << e.summary << "\n  outputs:";
    for (const auto& o : e.outputs) os << ' ' << o;
    os << " manifest.json\n";
    for (const auto& ps : e.params) {
      os << "  " << std::left << std::setw(18) << ps.key << std::setw(12) << ps.type << std::setw(24)
         << ps.default_value.dump() << ps.help << '\n';
    }
  }
}

json resolve_config(const RunRequest& req) {
  const ExperimentSpec& spec = find_experiment(req.experiment);
  json config = json::object();
  for (const auto& ps : spec.params) config[ps.key] = ps.default_value;

  if (req.config_path) {
    std::ifstream is(*req.config_path);
    if (!is) throw IoError("cannot read config " + req.config_path->string());
    json file = json::parse(is, nullptr, false);
    if (file.is_discarded()) throw ConfigError(req.config_path->string() + ": not valid JSON");
    if (!file.is_object()) throw ConfigError(req.config_path->string() + ": top level must be an object");
    for (const auto& [key, value] : file.items()) {
      if (value.is_object() || value.is_array()) {
        throw ConfigError(req.config_path->string() + ": key '" + key + "' must be a scalar");
      }
      assign(config, spec, key, value, req.config_path->string());
    }
  }
  for (const auto& o : req.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    assign(config, spec, o.substr(0, eq), parse_value(o.substr(eq + 1)), "--set");
  }
  if (req.seed) config["seed"] = *req.seed;
  return config;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run(const RunRequest& req, std::ostream& log, std::ostream& err) {
  json config;
  try {
    config = resolve_config(req);
  } catch (const IoError& e) {
    error_record(err, req.out_dir, "io", kIoError, e.what());
    return kIoError;
  } catch (const std::exception& e) {
    error_record(err, req.out_dir, "config", kConfigError, e.what());
    return kConfigError;
  }

  Artifacts out;
  try {
    const std::string& name = req.experiment;
    if (name == "spectrum") run_spectrum(config, std::max(1, req.threads), out);
    else if (name == "crab") run_crab(config, out, log);
    else if (name == "sta") run_sta(config, out, log);
    else if (name == "tg-fidelity") run_tg_fidelity(config, out);
    else run_propagate(config, out);

    json manifest = {{"experiment", name},
                     {"config", config},
                     {"config_hash", config_hash(config)},
                     {"outputs", out.names()}};
    out.open("manifest.json") << manifest.dump(2) << '\n';
    out.commit(req.out_dir);
  } catch (const IoError& e) {
    error_record(err, req.out_dir, "io", kIoError, e.what());
    return kIoError;
  } catch (const ConfigError& e) {
    error_record(err, req.out_dir, "config", kConfigError, e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    error_record(err, req.out_dir, "config", kConfigError, e.what());
    return kConfigError;
  } catch (const json::exception& e) {
    error_record(err, req.out_dir, "config", kConfigError, e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    error_record(err, req.out_dir, "numerical", kNumericalError, e.what());
    return kNumericalError;
  }
  for (const auto& n : out.names()) log << "wrote " << (req.out_dir / n).string() << '\n';
  return kOk;
}

}  // namespace noonring::cli
