#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cli/format.hpp"
#include "qgp/scenario.hpp"

namespace qgp::scenario {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Preset {
  std::string name;
  std::string description;
  ModelFamily family;
  ExperimentKind kind;
  std::map<std::string, double> model;
  double periods;
  std::size_t samples;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"paper-neutron",
       "Neutron spin in a rotating field: eta = 721 kHz, xi = 7.21 kHz, K = 5; interference "
       "oscillates near 5.77 MHz",
       ModelFamily::rotating, ExperimentKind::interfere,
       {{"eta_hz", 721e3}, {"xi_hz", 7.21e3}, {"K", 5.0}}, 20.0, 4001},
      {"qgp-cancel",
       "Rotating field with K = (eta^2 + xi^2) / eta^2, where the QGP cancels the energy gap",
       ModelFamily::rotating, ExperimentKind::interfere,
       {{"eta_hz", 721e3}, {"xi_hz", 7.21e3}, {"K", 1.0001}}, 20.0, 4001},
      {"gap-only",
       "Rotating field with the z-coupling removed (the field stays in the equatorial plane); "
       "the QGP vanishes and the interference follows the bare gap",
       ModelFamily::gap_only, ExperimentKind::interfere,
       {{"xi_hz", 7.21e3}, {"rotation_hz", 1e3}}, 1.0, 4001},
      {"sphere-cap",
       "Spin-1/2 field on the latitude theta0 = pi/4, swept at omega; the standard cap for the "
       "winding number",
       ModelFamily::sphere_cap, ExperimentKind::theta,
       {{"B_hz", 1e6}, {"theta0", kPi / 4.0}, {"omega_hz", 1e5}}, 1.0, 4001},
      {"sphere-wobble",
       "Spin-1/2 field with theta(t) = theta0 + amplitude sin(2 pi wobble_hz t), phi(t) = 2 pi "
       "omega_hz t",
       ModelFamily::sphere_wobble, ExperimentKind::qgp,
       {{"B_hz", 1e6}, {"theta0", kPi / 4.0}, {"amplitude", 0.1}, {"wobble_hz", 1e5},
        {"omega_hz", 1e5}},
       1.0, 4001},
  };
  return table;
}

const std::map<ModelFamily, std::vector<std::string>>& family_keys() {
  static const std::map<ModelFamily, std::vector<std::string>> keys = {
      {ModelFamily::rotating, {"eta_hz", "xi_hz", "K"}},
      {ModelFamily::gap_only, {"xi_hz", "rotation_hz"}},
      {ModelFamily::sphere_cap, {"B_hz", "theta0", "omega_hz"}},
      {ModelFamily::sphere_wobble, {"B_hz", "theta0", "amplitude", "wobble_hz", "omega_hz"}},
  };
  return keys;
}

const char* family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::rotating: return "rotating";
    case ModelFamily::gap_only: return "gap-only";
    case ModelFamily::sphere_cap: return "sphere-cap";
    case ModelFamily::sphere_wobble: return "sphere-wobble";
  }
  return "unknown";
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "kind", "preset", "seed", "gauge", "swap_arms", "fidelity"}},
      {"model",
       {"family", "eta_hz", "xi_hz", "K", "rotation_hz", "B_hz", "theta0", "omega_hz",
        "amplitude", "wobble_hz"}},
      {"grid", {"span", "periods", "samples"}},
      {"output", {"csv", "summary"}},
      {"tolerances", {"propagation", "degeneracy", "overlap_floor"}},
      {"theta", {"radial_cells", "angular_cells", "refinements"}},
      {"sweep", {"parameter", "values", "random", "from", "to"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  const IniEntry* find(const std::string& section, const std::string& key) const {
    const auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  double number(const IniEntry& e, const std::string& key) const {
    return parse_number(e.value, e.line, key);
  }

  static double parse_number(const std::string& text, int line, const std::string& key) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
      throw ConfigParseError("line " + std::to_string(line) + ": key '" + key +
                                 "' needs a finite number, got '" + text + "'",
                             line, key);
    return v;
  }

  std::size_t count(const IniEntry& e, const std::string& key, std::size_t min) const {
    std::size_t v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end || v < min)
      throw ConfigParseError("line " + std::to_string(e.line) + ": key '" + key +
                                 "' needs an integer >= " + std::to_string(min) + ", got '" +
                                 e.value + "'",
                             e.line, key);
    return v;
  }

  bool boolean(const IniEntry& e, const std::string& key) const {
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    throw ConfigParseError("line " + std::to_string(e.line) + ": key '" + key +
                               "' needs true or false, got '" + e.value + "'",
                           e.line, key);
  }

 private:
  const IniDocument& doc_;
};

[[noreturn]] void fail(const IniEntry& e, const std::string& key, const std::string& what) {
  throw ConfigParseError("line " + std::to_string(e.line) + ": key '" + key + "' " + what, e.line,
                         key);
}

ExperimentKind parse_kind(const IniEntry& e) {
  static const std::map<std::string, ExperimentKind> kinds = {
      {"qgp", ExperimentKind::qgp},
      {"interfere", ExperimentKind::interfere},
      {"theta", ExperimentKind::theta},
      {"adiabatic-check", ExperimentKind::adiabatic_check},
      {"sweep", ExperimentKind::sweep},
  };
  const auto it = kinds.find(e.value);
  if (it == kinds.end())
    fail(e, "kind", "must be one of qgp, interfere, theta, adiabatic-check, sweep; got '" +
                        e.value + "'");
  return it->second;
}

GaugeMode parse_gauge(const IniEntry& e) {
  if (e.value == "parallel-transport") return GaugeMode::parallel_transport;
  if (e.value == "analytic") return GaugeMode::analytic;
  if (e.value == "raw") return GaugeMode::raw;
  fail(e, "gauge", "must be parallel-transport, analytic or raw; got '" + e.value + "'");
}

ModelFamily parse_family(const IniEntry& e) {
  for (const auto& [f, keys] : family_keys())
    if (e.value == family_name(f)) return f;
  // Library constructor names.
  if (e.value == "rotating_field") return ModelFamily::rotating;
  if (e.value == "sphere_field") return ModelFamily::sphere_wobble;
  fail(e, "family", "must be rotating, gap-only, sphere-cap or sphere-wobble; got '" + e.value +
                        "'");
}

void check_model(ModelFamily family, const std::map<std::string, double>& m,
                 const std::map<std::string, int>& lines) {
  auto require = [&](const std::string& key, bool ok, const std::string& what) {
    if (ok) return;
    const auto it = lines.find(key);
    const int line = it == lines.end() ? 0 : it->second;
    throw ConfigParseError((line ? "line " + std::to_string(line) + ": " : std::string()) +
                               "model key '" + key + "' " + what,
                           line, key);
  };
  for (const auto& key : family_keys().at(family))
    require(key, m.count(key) == 1, "is required for the " + std::string(family_name(family)) +
                                        " family");
  auto positive = [&](const std::string& key) {
    require(key, m.at(key) > 0.0, "must be positive");
  };
  switch (family) {
    case ModelFamily::rotating:
      positive("eta_hz");
      positive("xi_hz");
      break;
    case ModelFamily::gap_only:
      positive("xi_hz");
      break;
    case ModelFamily::sphere_cap:
    case ModelFamily::sphere_wobble:
      positive("B_hz");
      require("theta0", m.at("theta0") > 0.0 && m.at("theta0") < kPi, "must lie in (0, pi)");
      require("omega_hz", m.at("omega_hz") != 0.0, "must be nonzero");
      break;
  }
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::qgp: return "qgp";
    case ExperimentKind::interfere: return "interfere";
    case ExperimentKind::theta: return "theta";
    case ExperimentKind::adiabatic_check: return "adiabatic-check";
    case ExperimentKind::sweep: return "sweep";
  }
  return "unknown";
}

IniDocument parse_ini(std::string_view text) {
  IniDocument doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigParseError("line " + std::to_string(line_no) + ": unterminated section header",
                               line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed_keys().count(section))
        throw ConfigParseError(
            "line " + std::to_string(line_no) + ": unknown section [" + section + "]", line_no);
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
    if (section.empty())
      throw ConfigParseError("line " + std::to_string(line_no) + ": key '" + key +
                                 "' appears before any [section]",
                             line_no, key);
    if (!allowed_keys().at(section).count(key))
      throw ConfigParseError("line " + std::to_string(line_no) + ": unknown key '" + key +
                                 "' in [" + section + "]",
                             line_no, key);
    auto& entries = doc.sections[section];
    if (entries.count(key))
      throw ConfigParseError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                                 "' (first set on line " + std::to_string(entries[key].line) + ")",
                             line_no, key);
    if (value.empty())
      throw ConfigParseError("line " + std::to_string(line_no) + ": key '" + key + "' has no value",
                             line_no, key);
    entries[key] = IniEntry{value, line_no};
  }
  return doc;
}

ScenarioConfig parse_config(std::string_view text) {
  const IniDocument doc = parse_ini(text);
  const Reader rd(doc);
  ScenarioConfig cfg;

  const Preset* preset = nullptr;
  if (const auto* e = rd.find("scenario", "preset")) {
    for (const auto& p : presets())
      if (p.name == e->value) preset = &p;
    if (!preset) fail(*e, "preset", "names no bundled preset: '" + e->value + "'");
    cfg.preset = preset->name;
    cfg.family = preset->family;
    cfg.kind = preset->kind;
    cfg.model = preset->model;
  }
  if (const auto* e = rd.find("model", "family")) {
    const ModelFamily f = parse_family(*e);
    if (preset && f != preset->family)
      fail(*e, "family", "conflicts with preset '" + preset->name + "'");
    cfg.family = f;
  } else if (!preset) {
    throw ConfigParseError("config needs [scenario] preset or [model] family", 0, "preset");
  }

  if (const auto* e = rd.find("scenario", "name")) cfg.name = e->value;
  if (const auto* e = rd.find("scenario", "kind")) cfg.kind = parse_kind(*e);
  if (const auto* e = rd.find("scenario", "seed"))
    cfg.seed = static_cast<std::uint64_t>(rd.count(*e, "seed", 0));
  if (const auto* e = rd.find("scenario", "gauge")) cfg.gauge = parse_gauge(*e);
  if (const auto* e = rd.find("scenario", "swap_arms")) cfg.swap_arms = rd.boolean(*e, "swap_arms");
  if (const auto* e = rd.find("scenario", "fidelity")) cfg.fidelity = rd.boolean(*e, "fidelity");

  std::map<std::string, int> model_lines;
  if (const auto s = doc.sections.find("model"); s != doc.sections.end()) {
    const auto& legal = family_keys().at(cfg.family);
    for (const auto& [key, e] : s->second) {
      if (key == "family") continue;
      if (std::find(legal.begin(), legal.end(), key) == legal.end())
        fail(e, key, std::string("is not a parameter of the ") + family_name(cfg.family) +
                         " family");
      cfg.model[key] = rd.number(e, key);
      model_lines[key] = e.line;
    }
  }
  check_model(cfg.family, cfg.model, model_lines);

  const auto* span = rd.find("grid", "span");
  const auto* periods = rd.find("grid", "periods");
  if (span && periods) fail(*periods, "periods", "cannot be combined with span");
  if (span) {
    cfg.grid.span = rd.number(*span, "span");
    if (!(*cfg.grid.span > 0.0)) fail(*span, "span", "must be positive");
  } else if (periods) {
    cfg.grid.periods = rd.number(*periods, "periods");
    if (!(*cfg.grid.periods > 0.0)) fail(*periods, "periods", "must be positive");
  } else {
    cfg.grid.periods = preset ? preset->periods : 1.0;
  }
  cfg.grid.samples = preset ? preset->samples : 2001;
  if (const auto* e = rd.find("grid", "samples")) cfg.grid.samples = rd.count(*e, "samples", 5);

  if (const auto* e = rd.find("tolerances", "propagation")) {
    cfg.tolerances.propagation = rd.number(*e, "propagation");
    if (!(cfg.tolerances.propagation > 0.0)) fail(*e, "propagation", "must be positive");
  }
  if (const auto* e = rd.find("tolerances", "degeneracy")) {
    cfg.tolerances.degeneracy = rd.number(*e, "degeneracy");
    if (!(cfg.tolerances.degeneracy > 0.0)) fail(*e, "degeneracy", "must be positive");
  }
  if (const auto* e = rd.find("tolerances", "overlap_floor")) {
    cfg.tolerances.overlap_floor = rd.number(*e, "overlap_floor");
    if (!(cfg.tolerances.overlap_floor > 0.0)) fail(*e, "overlap_floor", "must be positive");
  }

  if (const auto* e = rd.find("theta", "radial_cells"))
    cfg.theta.radial_cells = rd.count(*e, "radial_cells", 1);
  if (const auto* e = rd.find("theta", "angular_cells"))
    cfg.theta.angular_cells = rd.count(*e, "angular_cells", 3);
  if (const auto* e = rd.find("theta", "refinements"))
    cfg.theta.refinements = rd.count(*e, "refinements", 0);
  if (cfg.kind == ExperimentKind::theta && cfg.family == ModelFamily::sphere_wobble)
    throw ConfigParseError("kind theta needs a constant-latitude family, not sphere-wobble", 0,
                           "kind");

  if (cfg.kind == ExperimentKind::sweep) {
    const auto* param = rd.find("sweep", "parameter");
    if (!param) throw ConfigParseError("kind sweep needs [sweep] parameter", 0, "parameter");
    const auto& legal = family_keys().at(cfg.family);
    if (std::find(legal.begin(), legal.end(), param->value) == legal.end())
      fail(*param, "parameter", "'" + param->value + "' is not a model parameter");
    cfg.sweep.parameter = param->value;
    const auto* values = rd.find("sweep", "values");
    const auto* random = rd.find("sweep", "random");
    if (values && random) fail(*random, "random", "cannot be combined with values");
    if (values) {
      std::stringstream ss(values->value);
      std::string item;
      while (std::getline(ss, item, ','))
        cfg.sweep.values.push_back(Reader::parse_number(trim(item), values->line, "values"));
    } else if (random) {
      cfg.sweep.random_count = rd.count(*random, "random", 1);
      const auto* from = rd.find("sweep", "from");
      const auto* to = rd.find("sweep", "to");
      if (!from || !to) fail(*random, "random", "needs from and to");
      cfg.sweep.from = rd.number(*from, "from");
      cfg.sweep.to = rd.number(*to, "to");
      if (!(cfg.sweep.to > cfg.sweep.from)) fail(*to, "to", "must exceed from");
    } else {
      fail(*param, "parameter", "needs values or random");
    }
  } else if (doc.sections.count("sweep") && !doc.sections.at("sweep").empty()) {
    const auto& first = *doc.sections.at("sweep").begin();
    fail(first.second, first.first, "is only valid with kind = sweep");
  }

  cfg.csv = cfg.name + ".csv";
  cfg.summary = cfg.name + ".summary.json";
  if (const auto* e = rd.find("output", "csv")) cfg.csv = e->value;
  if (const auto* e = rd.find("output", "summary")) cfg.summary = e->value;

  // Echo with defaults resolved so a summary fully reproduces the run.
  for (const auto& [section, entries] : doc.sections)
    for (const auto& [key, e] : entries) cfg.echo[section][key] = e.value;
  auto& sc = cfg.echo["scenario"];
  sc["name"] = cfg.name;
  sc["kind"] = to_string(cfg.kind);
  sc["seed"] = std::to_string(cfg.seed);
  sc["gauge"] = cfg.gauge == GaugeMode::analytic ? "analytic"
                : cfg.gauge == GaugeMode::raw    ? "raw"
                                                 : "parallel-transport";
  sc["swap_arms"] = cfg.swap_arms ? "true" : "false";
  sc["fidelity"] = cfg.fidelity ? "true" : "false";
  auto& md = cfg.echo["model"];
  md["family"] = family_name(cfg.family);
  for (const auto& [key, v] : cfg.model) md[key] = format_double(v);
  auto& gr = cfg.echo["grid"];
  if (cfg.grid.span) gr["span"] = format_double(*cfg.grid.span);
  if (cfg.grid.periods) gr["periods"] = format_double(*cfg.grid.periods);
  gr["samples"] = std::to_string(cfg.grid.samples);
  auto& tol = cfg.echo["tolerances"];
  tol["propagation"] = format_double(cfg.tolerances.propagation);
  tol["degeneracy"] = format_double(cfg.tolerances.degeneracy);
  tol["overlap_floor"] = format_double(cfg.tolerances.overlap_floor);
  cfg.echo["output"]["csv"] = cfg.csv;
  cfg.echo["output"]["summary"] = cfg.summary;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& p : presets()) out.push_back({p.name, p.description});
  return out;
}

}  // namespace qgp::scenario
