#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <optional>
#include <random>
#include <thread>

#include "cli/format.hpp"
#include "qgp/dynamics.hpp"
#include "qgp/geometry.hpp"
#include "qgp/interferometer.hpp"
#include "qgp/scenario.hpp"

namespace qgp::scenario {
namespace {

double hz(const std::map<std::string, double>& p, const char* key) { return kTwoPi * p.at(key); }

// Constant-latitude description used for closed forms and the winding number.
struct Latitude {
  double B;
  double theta0;
  double omega;
};

std::optional<Latitude> latitude(ModelFamily family, const std::map<std::string, double>& p) {
  switch (family) {
    case ModelFamily::rotating: {
      const RotatingFieldParams r{hz(p, "eta_hz"), hz(p, "xi_hz"), p.at("K")};
      return Latitude{r.field_magnitude(), std::atan2(r.xi, r.eta), r.rotation_rate()};
    }
    case ModelFamily::gap_only:
      return Latitude{hz(p, "xi_hz"), 0.5 * kPi, hz(p, "rotation_hz")};
    case ModelFamily::sphere_cap:
      return Latitude{hz(p, "B_hz"), p.at("theta0"), hz(p, "omega_hz")};
    case ModelFamily::sphere_wobble:
      return std::nullopt;
  }
  return std::nullopt;
}

SphereFieldParams sphere_params(ModelFamily family, const std::map<std::string, double>& p) {
  if (family == ModelFamily::sphere_wobble)
    return {hz(p, "B_hz"),
            AngleFunction::sinusoid(p.at("theta0"), p.at("amplitude"), hz(p, "wobble_hz")),
            AngleFunction::linear(0.0, hz(p, "omega_hz"))};
  const Latitude l = *latitude(family, p);
  return {l.B, AngleFunction::constant(l.theta0), AngleFunction::linear(0.0, l.omega)};
}

struct Context {
  ModelPtr model;
  GaugeTrajectory traj;
};

Context prepare(const ScenarioConfig& cfg, const std::map<std::string, double>& params) {
  ModelPtr model = build_model(cfg.family, params);
  const double span =
      cfg.grid.span ? *cfg.grid.span : *cfg.grid.periods * drive_period(cfg.family, params);
  TrackOptions opts;
  opts.mode = cfg.gauge;
  opts.degeneracy_tolerance = cfg.tolerances.degeneracy;
  GaugeTrajectory traj = track(model, TimeGrid::uniform(0.0, span, cfg.grid.samples), opts);
  return {std::move(model), std::move(traj)};
}

GeometryOptions geometry_options(const ScenarioConfig& cfg) {
  GeometryOptions g;
  g.overlap_floor = cfg.tolerances.overlap_floor;
  return g;
}

std::vector<std::string> frame_columns() {
  return {"time", "e0", "e1", "A0", "A1", "delta", "valid"};
}

std::vector<double> frame_row(const GaugeTrajectory& traj, const GeometricSeries& s, std::size_t i) {
  return {traj.grid()[i], traj.eigenvalue(i, 0), traj.eigenvalue(i, 1), s.A_n[i], s.A_m[i], s.delta[i], s.valid[i] ? 1.0 : 0.0};
}

double mean_valid(const GeometricSeries& s) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.delta.size(); ++i)
    if (s.valid[i]) {
      sum += s.delta[i];
      ++n;
    }
  if (n == 0) throw NumericalError("no valid QGP samples on the grid");
  return sum / static_cast<double>(n);
}

struct Outcome {
  RunSummary summary;
  std::string table;
};

void set_grid(RunSummary& s, const GaugeTrajectory& traj) {
  s.t0 = traj.grid().front();
  s.t1 = traj.grid().back();
  s.samples = traj.size();
}

void headline(RunSummary& s, const std::string& key, double value, const std::string& source) {
  if (std::isfinite(value)) {
    s.headline[key] = value;
    s.headline_source[key] = source;
  } else {
    s.flags[key + "_finite"] = false;
  }
}

Outcome run_qgp(const ScenarioConfig& cfg) {
  const Context ctx = prepare(cfg, cfg.model);
  const GeometricSeries s = qgp_direct(ctx.traj, 1, 0, geometry_options(cfg));
  const SphereFieldParams sp = sphere_params(cfg.family, cfg.model);

  auto cols = frame_columns();
  cols.push_back("delta_reference");
  CsvTable table(cols);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ctx.traj.size(); ++i) {
    const double t = ctx.traj.grid()[i];
    const bool moving = sp.theta.d1(t) != 0.0 || sp.phi.d1(t) != 0.0;
    const double ref = moving ? qgp_geodesic(sp, t) : 0.0;
    auto row = frame_row(ctx.traj, s, i);
    row.push_back(ref);
    table.add_row(row);
    if (s.valid[i]) worst = std::max(worst, std::abs(s.delta[i] - ref));
    scale = std::max(scale, std::abs(ref));
  }
  Outcome out;
  set_grid(out.summary, ctx.traj);
  headline(out.summary, "delta_mean", mean_valid(s), "mean(delta) over valid rows");
  headline(out.summary, "delta_reference_max_abs_error", worst,
           "max |delta - delta_reference| over valid rows");
  if (scale > 0.0)
    headline(out.summary, "delta_reference_max_rel_error", worst / scale,
             "max |delta - delta_reference| / max |delta_reference|");
  if (cfg.family == ModelFamily::rotating)
    headline(out.summary, "delta_over_eta", mean_valid(s) / hz(cfg.model, "eta_hz"),
             "mean(delta) / (2 pi eta_hz)");
  out.summary.flags["uncoupled"] = s.uncoupled;
  out.summary.columns = table.columns();
  out.table = table.body();
  return out;
}

struct FrequencyPoint {
  double delta_mean = 0.0;
  FrequencyScan scan;
};

FrequencyPoint frequency_point(const ScenarioConfig& cfg, const GaugeTrajectory& traj) {
  FrequencyOptions fo;
  fo.geometry = geometry_options(cfg);
  if (cfg.swap_arms) fo.arms = fo.arms.swapped();
  FrequencyPoint p{0.0, scan_and_extract_frequency(traj, fo)};
  p.delta_mean = mean_valid(qgp_direct(traj, 1, 0, fo.geometry));
  return p;
}

Outcome run_interfere(const ScenarioConfig& cfg) {
  const Context ctx = prepare(cfg, cfg.model);
  const FrequencyPoint fp = frequency_point(cfg, ctx.traj);
  const GaugeTrajectory& traj = ctx.traj;
  const GeometricSeries s = qgp_direct(traj, 1, 0, geometry_options(cfg));
  ArmAssignment arms;
  if (cfg.swap_arms) arms = arms.swapped();
  const Interferometer ifm(traj, arms, geometry_options(cfg));
  const DifferentialTrace& tr = fp.scan.trace;

  auto cols = frame_columns();
  for (const char* c : {"intensity", "dI_dt2", "envelope", "phase_arg", "qgp_phase"}) cols.push_back(c);
  CsvTable table(cols);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto row = frame_row(traj, s, i);
    row.insert(row.end(), {ifm.intensity(0, i).intensity, tr.dI_dt2[i], tr.envelope[i],
                           tr.phase_arg[i], tr.qgp_phase[i]});
    table.add_row(row);
  }
  Outcome out;
  set_grid(out.summary, traj);
  const double gap_hz = (traj.eigenvalue(0, 1) - traj.eigenvalue(0, 0)) / kTwoPi;
  headline(out.summary, "frequency_hz", fp.scan.dominant_frequency,
           "Hann-windowed periodogram peak of dI_dt2");
  headline(out.summary, "expected_frequency_hz", fp.scan.phase_rate_frequency,
           "|phase_arg[last] - phase_arg[0]| / (2 pi span)");
  headline(out.summary, "gap_hz", gap_hz, "(e1 - e0)[0] / (2 pi)");
  headline(out.summary, "frequency_to_gap", fp.scan.dominant_frequency / gap_hz,
           "frequency_hz / gap_hz");
  headline(out.summary, "delta_mean", fp.delta_mean, "mean(delta) over valid rows");
  if (cfg.family == ModelFamily::rotating)
    headline(out.summary, "delta_over_eta", fp.delta_mean / hz(cfg.model, "eta_hz"),
             "mean(delta) / (2 pi eta_hz)");
  out.summary.flags["below_resolution"] = fp.scan.below_resolution;
  out.summary.columns = table.columns();
  out.table = table.body();
  return out;
}

Outcome run_adiabatic(const ScenarioConfig& cfg) {
  const Context ctx = prepare(cfg, cfg.model);
  AdiabaticReportOptions ro;
  ro.geometry = geometry_options(cfg);
  ro.compute_fidelity = cfg.fidelity;
  ro.propagation_tolerance = cfg.tolerances.propagation;
  const AdiabaticityReport rep = adiabatic_report(ctx.traj, 1, 0, ro);
  const GeometricSeries s = qgp_direct(ctx.traj, 1, 0, ro.geometry);

  auto cols = frame_columns();
  for (const char* c : {"ratio_qgp", "ratio_traditional", "resonant"}) cols.push_back(c);
  if (cfg.fidelity) cols.push_back("fidelity");
  CsvTable table(cols);
  for (std::size_t i = 0; i < ctx.traj.size(); ++i) {
    auto row = frame_row(ctx.traj, s, i);
    row.insert(row.end(), {rep.ratio_qgp[i], rep.ratio_traditional[i], rep.resonant[i] ? 1.0 : 0.0});
    if (cfg.fidelity) row.push_back(rep.fidelity_trace[i]);
    table.add_row(row);
  }
  Outcome out;
  set_grid(out.summary, ctx.traj);
  headline(out.summary, "max_ratio_qgp", rep.max_ratio_qgp, "max(ratio_qgp)");
  headline(out.summary, "max_ratio_traditional", rep.max_ratio_traditional,
           "max(ratio_traditional)");
  if (cfg.fidelity) headline(out.summary, "min_fidelity", rep.min_fidelity, "min(fidelity)");
  out.summary.flags["resonant"] =
      std::any_of(rep.resonant.begin(), rep.resonant.end(), [](bool b) { return b; });
  out.summary.columns = table.columns();
  out.table = table.body();
  return out;
}

Outcome run_theta(const ScenarioConfig& cfg) {
  const std::optional<Latitude> lat = latitude(cfg.family, cfg.model);
  if (!lat || lat->omega == 0.0)
    throw ConfigError("kind theta needs a constant-latitude loop with a nonzero sweep rate");
  CsvTable table({"radial_cells", "angular_cells", "surface_integral", "boundary_integral", "theta",
                  "nearest_integer", "residual"});
  ThetaResult finest;
  ThetaOptions to;
  to.geometry = geometry_options(cfg);
  to.degeneracy_tolerance = cfg.tolerances.degeneracy;
  std::size_t boundary = 0;
  for (std::size_t k = cfg.theta.refinements + 1; k-- > 0;) {
    const std::size_t r = std::max<std::size_t>(1, cfg.theta.radial_cells >> k);
    const std::size_t a = std::max<std::size_t>(4, cfg.theta.angular_cells >> k);
    const SphereCap cap = sphere_cap(lat->B, lat->theta0, lat->omega, r, a);
    finest = theta_winding(cap.family, cap.loop, cap.surface, 1, 0, to);
    boundary = 4 * a + 1;
    table.add_row({static_cast<double>(r), static_cast<double>(a), finest.surface_integral,
                   finest.boundary_integral, finest.theta,
                   static_cast<double>(finest.nearest_integer), finest.residual});
  }
  Outcome out;
  out.summary.t0 = 0.0;
  out.summary.t1 = kTwoPi / std::abs(lat->omega);
  out.summary.samples = boundary;
  headline(out.summary, "theta", finest.theta, "theta, last row");
  headline(out.summary, "nearest_integer", static_cast<double>(finest.nearest_integer),
           "nearest_integer, last row");
  headline(out.summary, "residual", finest.residual, "residual, last row");
  headline(out.summary, "surface_integral", finest.surface_integral, "surface_integral, last row");
  headline(out.summary, "boundary_integral", finest.boundary_integral,
           "boundary_integral, last row");
  out.summary.columns = table.columns();
  out.table = table.body();
  return out;
}

std::vector<double> sweep_values(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.sweep.random_count == 0) return cfg.sweep.values;
  std::mt19937_64 rng(seed);
  std::vector<double> v(cfg.sweep.random_count);
  for (auto& x : v) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = cfg.sweep.from + u * (cfg.sweep.to - cfg.sweep.from);
  }
  return v;
}

Outcome run_sweep(const ScenarioConfig& cfg, std::size_t threads, std::uint64_t seed) {
  const std::vector<double> values = sweep_values(cfg, seed);
  std::vector<std::optional<FrequencyPoint>> points(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        auto params = cfg.model;
        params[cfg.sweep.parameter] = values[i];
        points[i] = frequency_point(cfg, prepare(cfg, params).traj);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  CsvTable table({cfg.sweep.parameter, "delta_mean", "frequency_hz", "expected_frequency_hz",
                  "below_resolution"});
  double fmin = INFINITY, fmax = -INFINITY;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const FrequencyPoint& p = *points[i];
    table.add_row({values[i], p.delta_mean, p.scan.dominant_frequency, p.scan.phase_rate_frequency,
                   p.scan.below_resolution ? 1.0 : 0.0});
    fmin = std::min(fmin, p.scan.dominant_frequency);
    fmax = std::max(fmax, p.scan.dominant_frequency);
  }
  Outcome out;
  out.summary.samples = cfg.grid.samples;
  headline(out.summary, "points", static_cast<double>(values.size()), "row count");
  headline(out.summary, "min_frequency_hz", fmin, "min(frequency_hz)");
  headline(out.summary, "max_frequency_hz", fmax, "max(frequency_hz)");
  out.summary.columns = table.columns();
  out.table = table.body();
  return out;
}

std::map<std::string, std::string> conventions() {
  return {
      {"pair", kPairConvention},
      {"levels", "index 0 is the lower level (-), index 1 the upper (+); delta = Delta_{1,0}"},
      {"theta_orientation",
       "surface (s, t) from the cap center outwards with orientation ds^dt; loop in increasing t"},
      {"input_units", "model frequencies in Hz as E/h; multiplied by 2 pi internally"},
      {"output_units", "time in s; energies, connections and delta in rad/s; frequencies in Hz"},
  };
}

}  // namespace

ModelPtr build_model(ModelFamily family, const std::map<std::string, double>& p) {
  switch (family) {
    case ModelFamily::rotating:
      return rotating_field({hz(p, "eta_hz"), hz(p, "xi_hz"), p.at("K")});
    case ModelFamily::gap_only:
      return gap_only_field(hz(p, "xi_hz"), hz(p, "rotation_hz"));
    case ModelFamily::sphere_cap:
    case ModelFamily::sphere_wobble:
      return sphere_field(sphere_params(family, p));
  }
  throw ConfigError("unknown model family");
}

double drive_period(ModelFamily family, const std::map<std::string, double>& p) {
  if (family == ModelFamily::sphere_cap || family == ModelFamily::sphere_wobble)
    return 1.0 / std::abs(p.at("omega_hz"));
  return build_model(family, p)->characteristic_period;
}

RunResult execute(const ScenarioConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = options.seed.value_or(config.seed);
  Outcome out;
  switch (config.kind) {
    case ExperimentKind::qgp: out = run_qgp(config); break;
    case ExperimentKind::interfere: out = run_interfere(config); break;
    case ExperimentKind::adiabatic_check: out = run_adiabatic(config); break;
    case ExperimentKind::theta: out = run_theta(config); break;
    case ExperimentKind::sweep: out = run_sweep(config, options.threads, seed); break;
  }
  RunSummary& s = out.summary;
  s.name = config.name;
  s.kind = to_string(config.kind);
  s.preset = config.preset;
  s.scenario = config.echo;
  s.scenario["scenario"]["seed"] = std::to_string(seed);
  s.seed = seed;
  s.model_parameters = build_model(config.family, config.model)->parameters;
  s.convention = conventions();
  s.csv_file = config.csv;
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(s), std::move(out.table)};
}

RunResult run(const ScenarioConfig& config, const std::string& out_dir, const RunOptions& options) {
  RunResult result = execute(config, options);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_atomic((dir / config.csv).string(),
               "# generated " + utc_timestamp() + " by qgplab\n" + result.csv_body);
  write_atomic((dir / config.summary).string(), serialize(result.summary));
  return result;
}

}  // namespace qgp::scenario
