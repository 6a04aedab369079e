#pragma once

// Scenario files: INI-style "key = value" lines grouped in [sections].
// Quantities take an optional unit after the number ("150 nm", "600 V/cm");
// list-valued keys are comma separated with one trailing unit ("30, 40, 60 nm").
// '#' and ';' start comments. Unknown keys, missing required keys, unit
// mismatches and out-of-range values are reported together, with line numbers.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "toroid/dynamics.hpp"
#include "toroid/errors.hpp"
#include "toroid/geometry.hpp"
#include "toroid/probe.hpp"
#include "toroid/pulses.hpp"
#include "toroid/spectrum.hpp"
#include "toroid/units.hpp"

namespace toroid {

enum class Experiment { Spectrum, Fig5Steady, Fig6Buildup, Fig7Trains, Fig8Radiation, Fig9Probe, Fig10Solid };

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
  static const std::vector<std::pair<std::string, Experiment>> names = {
      {"spectrum", Experiment::Spectrum},         {"fig5_steady", Experiment::Fig5Steady},
      {"fig6_buildup", Experiment::Fig6Buildup},  {"fig7_trains", Experiment::Fig7Trains},
      {"fig8_radiation", Experiment::Fig8Radiation}, {"fig9_probe", Experiment::Fig9Probe},
      {"fig10_solid", Experiment::Fig10Solid}};
  return names;
}

inline std::string experiment_name(Experiment e) {
  for (const auto& [name, value] : experiment_names())
    if (value == e) return name;
  return "unknown";
}

struct PulseConfig {
  std::vector<double> fields{600.0 * units::volt_per_cm};  // E_peak sweep [mV/nm]
  double photon_energy = 2.5;
  double cycles = 2.0;
  double waist = 4.0 * units::micrometre;
  double host_wavelength = 138.0 * units::micrometre;
  std::vector<SequenceKind> schedule{SequenceKind::PS_I};
  double start = 0.5;    // first pair [ps]
  double spacing = 0.0;  // between pair starts; 0 = one pair length plus a quarter period
};

struct TimeConfig {
  double end = 30.0;
  int steps_per_cycle = 64;
  int sample_every = 8;
  double steady_time = 5.0;  // when fig5/fig9 freeze the static field
};

struct RadiationConfig {
  double distance = 10.0;  // in units of R
  int n_theta = 37;
  double time = 0.0;       // observation time of the pattern; 0 = end of the drive
};

struct ProbeConfig {
  ProbeTorus torus;
  std::vector<double> heights{30.0, 40.0, 50.0, 60.0};
  int loop_points = 256;
};

struct Scenario {
  std::string name;
  Experiment experiment = Experiment::Spectrum;
  TorusGeometry geometry;
  std::size_t n_s = 48, n_alpha = 64;
  double padding = 10.0;
  int n_phi = 128;
  BasisSpec basis;
  std::vector<double> headrooms{5.0};
  PulseConfig pulses;
  RelaxationModel relaxation;
  TimeConfig time;
  RadiationConfig radiation;
  ProbeConfig probe;
  std::string output_dir = "output";
  std::string source;  // raw text, hashed for provenance

  // Every resolved parameter, defaults included, for the manifest.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

struct ConfigIssue {
  int line = 0;  // 0 = whole file
  std::string message;
};

struct ParseResult {
  std::optional<Scenario> scenario;
  std::vector<ConfigIssue> issues;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

enum class Dim { None, Length, Energy, Time, Field, Rate, Temperature, Text };

// Factor to internal units, or nullopt when the unit does not fit the dimension.
inline std::optional<double> unit_factor(Dim dim, const std::string& unit) {
  static const std::map<Dim, std::map<std::string, double>> table = {
      {Dim::Length, {{"nm", 1.0}, {"um", 1e3}, {"µm", 1e3}, {"mm", 1e6}}},
      {Dim::Energy, {{"meV", 1.0}, {"eV", 1e3}}},
      {Dim::Time, {{"ps", 1.0}, {"fs", 1e-3}, {"ns", 1e3}}},
      {Dim::Field, {{"V/cm", units::volt_per_cm}, {"kV/cm", 1e3 * units::volt_per_cm}, {"mV/nm", 1.0}}},
      {Dim::Rate, {{"1/ps", 1.0}, {"/ps", 1.0}, {"1/ns", 1e-3}, {"/ns", 1e-3}}},
      {Dim::Temperature, {{"K", 1.0}}}};
  if (dim == Dim::None || dim == Dim::Text) return unit.empty() ? std::optional<double>(1.0) : std::nullopt;
  if (unit.empty()) return 1.0;  // bare numbers are in internal units
  const auto& units_for = table.at(dim);
  auto it = units_for.find(unit);
  if (it == units_for.end()) return std::nullopt;
  return it->second;
}

inline std::string dim_units(Dim dim) {
  switch (dim) {
    case Dim::Length: return "nm, um, mm";
    case Dim::Energy: return "meV, eV";
    case Dim::Time: return "ps, fs, ns";
    case Dim::Field: return "V/cm, kV/cm, mV/nm";
    case Dim::Rate: return "1/ps, 1/ns";
    case Dim::Temperature: return "K";
    default: return "none";
  }
}

struct KeySpec {
  std::string section, key;
  Dim dim;
  bool list = false;
};

inline const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"scenario", "experiment", Dim::Text},
      {"scenario", "name", Dim::Text},
      {"geometry", "variant", Dim::Text},
      {"geometry", "major_radius", Dim::Length},
      {"geometry", "minor_radius", Dim::Length},
      {"geometry", "thickness", Dim::Length},
      {"geometry", "well_depth", Dim::Energy},
      {"geometry", "effective_mass", Dim::None},
      {"grid", "n_s", Dim::None},
      {"grid", "n_alpha", Dim::None},
      {"grid", "padding", Dim::Length},
      {"grid", "n_phi", Dim::None},
      {"basis", "electrons", Dim::None},
      {"basis", "temperature", Dim::Temperature},
      {"basis", "m_max", Dim::None},
      {"basis", "headroom", Dim::None, true},
      {"pulses", "field", Dim::Field, true},
      {"pulses", "photon_energy", Dim::Energy},
      {"pulses", "cycles", Dim::None},
      {"pulses", "waist", Dim::Length},
      {"pulses", "host_wavelength", Dim::Length},
      {"pulses", "schedule", Dim::Text, true},
      {"pulses", "start", Dim::Time},
      {"pulses", "spacing", Dim::Time},
      {"relaxation", "kind", Dim::Text},
      {"relaxation", "rate", Dim::Rate},
      {"relaxation", "pauli_blocking", Dim::Text},
      {"time", "end", Dim::Time},
      {"time", "steps_per_cycle", Dim::None},
      {"time", "sample_every", Dim::None},
      {"time", "steady_time", Dim::Time},
      {"radiation", "distance", Dim::None},
      {"radiation", "n_theta", Dim::None},
      {"radiation", "time", Dim::Time},
      {"probe", "major_radius", Dim::Length},
      {"probe", "minor_radius", Dim::Length},
      {"probe", "heights", Dim::Length, true},
      {"probe", "electrons", Dim::None},
      {"probe", "temperature", Dim::Temperature},
      {"probe", "loop_points", Dim::None},
      {"output", "directory", Dim::Text},
  };
  return keys;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(const std::map<std::string, RawEntry>& entries, std::vector<ConfigIssue>& issues)
      : entries_(entries), issues_(issues) {}

  bool has(const std::string& full) const { return entries_.count(full) != 0; }

  std::optional<std::vector<double>> numbers(const std::string& full, Dim dim) {
    auto it = entries_.find(full);
    if (it == entries_.end()) return std::nullopt;
    const int line = it->second.line;
    std::string text = it->second.value;
    // trailing unit: the part after the last number token
    std::vector<std::string> items;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) items.push_back(trim(item));
    if (items.empty() || items.back().empty()) return fail(line, full + ": empty value");
    std::string unit;
    {
      std::string& last = items.back();
      std::size_t p = 0;
      double tmp = 0.0;
      auto res = std::from_chars(last.data(), last.data() + last.size(), tmp);
      if (res.ec != std::errc()) return fail(line, full + ": expected a number, got '" + last + "'");
      p = static_cast<std::size_t>(res.ptr - last.data());
      unit = trim(std::string_view(last).substr(p));
      last = trim(std::string_view(last).substr(0, p));
    }
    const auto factor = unit_factor(dim, unit);
    if (!factor) return fail(line, full + ": unit '" + unit + "' does not fit (expected " + dim_units(dim) + ")");
    std::vector<double> out;
    for (const auto& item : items) {
      double v = 0.0;
      auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v))
        return fail(line, full + ": expected a number, got '" + item + "'");
      out.push_back(v * *factor);
    }
    return out;
  }

  template <typename T>
  void number(const std::string& full, Dim dim, T& target, double lo, double hi, bool open_lo = false) {
    auto v = numbers(full, dim);
    if (!v) return;
    if (v->size() != 1) {
      issues_.push_back({entries_.at(full).line, full + ": expected a single value"});
      return;
    }
    check_and_set((*v)[0], full, target, lo, hi, open_lo);
  }

  template <typename T>
  void check_and_set(double x, const std::string& full, T& target, double lo, double hi, bool open_lo) {
    const int line = entries_.at(full).line;
    const bool below = open_lo ? !(x > lo) : !(x >= lo);
    if (below || !(x <= hi)) {
      std::ostringstream os;
      os << full << ": value " << x << " out of range " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      issues_.push_back({line, os.str()});
      return;
    }
    if constexpr (std::is_integral_v<T>) {
      if (x != std::floor(x)) {
        issues_.push_back({line, full + ": expected an integer"});
        return;
      }
      target = static_cast<T>(x);
    } else {
      target = x;
    }
  }

  std::optional<std::string> text(const std::string& full) {
    auto it = entries_.find(full);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }
  int line(const std::string& full) const {
    auto it = entries_.find(full);
    return it == entries_.end() ? 0 : it->second.line;
  }
  void issue(int line, std::string msg) { issues_.push_back({line, std::move(msg)}); }

 private:
  std::nullopt_t fail(int line, std::string msg) {
    issues_.push_back({line, std::move(msg)});
    return std::nullopt;
  }
  const std::map<std::string, RawEntry>& entries_;
  std::vector<ConfigIssue>& issues_;
};

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline ParseResult parse_scenario(const std::string& text) {
  using detail::Dim;
  ParseResult result;
  auto& issues = result.issues;
  std::map<std::string, detail::RawEntry> entries;

  std::vector<std::string> known;
  for (const auto& k : detail::schema()) known.push_back(k.section + "." + k.key);
  auto suggest = [&](const std::string& full) {
    std::string best;
    std::size_t dist = std::string::npos;
    for (const auto& k : known) {
      const std::size_t d = detail::edit_distance(full, k);
      if (d < dist) dist = d, best = k;
    }
    return best;
  };

  std::string section;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::size_t cut = raw.find_first_of("#;");
    const std::string line = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({line_no, "malformed section header '" + line + "'"});
        continue;
      }
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "expected 'key = value', got '" + line + "'"});
      continue;
    }
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (std::find(known.begin(), known.end(), full) == known.end()) {
      issues.push_back({line_no, "unknown key '" + full + "' (did you mean '" + suggest(full) + "'?)"});
      continue;
    }
    if (entries.count(full)) {
      issues.push_back({line_no, "duplicate key '" + full + "' (first set on line " +
                                     std::to_string(entries[full].line) + ")"});
      continue;
    }
    entries[full] = {value, line_no};
  }

  Scenario sc;
  sc.source = text;
  detail::Reader rd(entries, issues);

  // required keys, reported together
  std::vector<std::string> required{"scenario.experiment", "geometry.major_radius", "geometry.thickness"};
  const auto variant = rd.text("geometry.variant");
  if (variant && *variant != "tube" && *variant != "solid")
    rd.issue(rd.line("geometry.variant"), "geometry.variant: expected 'tube' or 'solid', got '" + *variant + "'");
  const bool solid = variant && *variant == "solid";
  if (!solid) required.insert(required.begin() + 2, "geometry.minor_radius");
  for (const auto& k : required)
    if (!rd.has(k)) issues.push_back({0, "missing required key '" + k + "'"});

  if (auto e = rd.text("scenario.experiment")) {
    bool found = false;
    for (const auto& [name, value] : experiment_names())
      if (name == *e) sc.experiment = value, found = true;
    if (!found) {
      std::string names;
      for (const auto& [name, value] : experiment_names()) names += (names.empty() ? "" : ", ") + name;
      rd.issue(rd.line("scenario.experiment"), "scenario.experiment: unknown experiment '" + *e + "' (one of " + names + ")");
    }
  }
  sc.name = rd.text("scenario.name").value_or(experiment_name(sc.experiment));

  auto& g = sc.geometry;
  g.variant = solid ? TorusVariant::SolidDonut : TorusVariant::Tube;
  rd.number("geometry.major_radius", Dim::Length, g.major_radius, 0.0, 1e6, true);
  rd.number("geometry.minor_radius", Dim::Length, g.minor_radius, 0.0, 1e6, true);
  rd.number("geometry.thickness", Dim::Length, g.shell_thickness, 0.0, 1e6, true);
  rd.number("geometry.well_depth", Dim::Energy, g.well_depth, 0.0, 1e7, true);
  rd.number("geometry.effective_mass", Dim::None, g.effective_mass, 0.0, 100.0, true);

  rd.number("grid.n_s", Dim::None, sc.n_s, 8, 4096);
  rd.number("grid.n_alpha", Dim::None, sc.n_alpha, 8, 4096);
  if (sc.n_alpha % 2 != 0) rd.issue(rd.line("grid.n_alpha"), "grid.n_alpha: must be even");
  rd.number("grid.padding", Dim::Length, sc.padding, 0.0, 1e4, true);
  rd.number("grid.n_phi", Dim::None, sc.n_phi, 128, 65536);

  rd.number("basis.electrons", Dim::None, sc.basis.electron_count, 0.0, 1e6, true);
  rd.number("basis.temperature", Dim::Temperature, sc.basis.temperature, 0.0, 1e4);
  rd.number("basis.m_max", Dim::None, sc.basis.m_max, 0, 1000);
  if (auto h = rd.numbers("basis.headroom", Dim::None)) {
    sc.headrooms.clear();
    for (double x : *h) {
      double v = 0.0;
      rd.check_and_set(x, "basis.headroom", v, 0.0, 100.0, true);
      sc.headrooms.push_back(v);
    }
  }

  auto& p = sc.pulses;
  if (auto f = rd.numbers("pulses.field", Dim::Field)) {
    p.fields.clear();
    for (double x : *f) {
      double v = 0.0;
      rd.check_and_set(x, "pulses.field", v, 0.0, 1e3, false);
      p.fields.push_back(v);
    }
  }
  rd.number("pulses.photon_energy", Dim::Energy, p.photon_energy, 0.0, 1e4, true);
  rd.number("pulses.cycles", Dim::None, p.cycles, 0.0, 1e4, true);
  rd.number("pulses.waist", Dim::Length, p.waist, 0.0, 1e9, true);
  rd.number("pulses.host_wavelength", Dim::Length, p.host_wavelength, 0.0, 1e10, true);
  rd.number("pulses.start", Dim::Time, p.start, 0.0, 1e6);
  rd.number("pulses.spacing", Dim::Time, p.spacing, 0.0, 1e6);
  if (auto s = rd.text("pulses.schedule")) {
    p.schedule.clear();
    std::stringstream ss(*s);
    for (std::string item; std::getline(ss, item, ',');) {
      item = detail::trim(item);
      if (item == "PS_I" || item == "PSI") p.schedule.push_back(SequenceKind::PS_I);
      else if (item == "PS_II" || item == "PSII") p.schedule.push_back(SequenceKind::PS_II);
      else rd.issue(rd.line("pulses.schedule"), "pulses.schedule: unknown sequence '" + item + "' (PS_I or PS_II)");
    }
    if (p.schedule.empty()) rd.issue(rd.line("pulses.schedule"), "pulses.schedule: empty");
  }

  if (auto k = rd.text("relaxation.kind")) {
    if (*k == "none") sc.relaxation.kind = RelaxationModel::Kind::None;
    else if (*k == "rate_to_thermal") sc.relaxation.kind = RelaxationModel::Kind::RateToThermal;
    else rd.issue(rd.line("relaxation.kind"), "relaxation.kind: expected 'rate_to_thermal' or 'none'");
  }
  rd.number("relaxation.rate", Dim::Rate, sc.relaxation.rate, 0.0, 1e3);
  if (auto b = rd.text("relaxation.pauli_blocking")) {
    if (*b == "true") sc.relaxation.pauli_blocking = true;
    else if (*b == "false") sc.relaxation.pauli_blocking = false;
    else rd.issue(rd.line("relaxation.pauli_blocking"), "relaxation.pauli_blocking: expected true or false");
  }

  rd.number("time.end", Dim::Time, sc.time.end, 0.0, 1e5, true);
  rd.number("time.steps_per_cycle", Dim::None, sc.time.steps_per_cycle, 40, 1 << 20);
  rd.number("time.sample_every", Dim::None, sc.time.sample_every, 1, 1 << 20);
  rd.number("time.steady_time", Dim::Time, sc.time.steady_time, 0.0, 1e5, true);

  rd.number("radiation.distance", Dim::None, sc.radiation.distance, 5.0, 1e4);
  rd.number("radiation.n_theta", Dim::None, sc.radiation.n_theta, 5, 100000);
  rd.number("radiation.time", Dim::Time, sc.radiation.time, 0.0, 1e5);

  auto& pr = sc.probe;
  rd.number("probe.major_radius", Dim::Length, pr.torus.major_radius, 0.0, 1e6, true);
  rd.number("probe.minor_radius", Dim::Length, pr.torus.minor_radius, 0.0, 1e6, true);
  if (auto h = rd.numbers("probe.heights", Dim::Length)) pr.heights = *h;
  rd.number("probe.electrons", Dim::None, pr.torus.electrons, 0, 1000000);
  rd.number("probe.temperature", Dim::Temperature, pr.torus.temperature, 0.0, 1e4);
  rd.number("probe.loop_points", Dim::None, pr.loop_points, 8, 1 << 20);

  if (auto d = rd.text("output.directory")) sc.output_dir = *d;

  sc.basis.headroom = sc.headrooms.front();
  sc.basis.photon_energy = p.photon_energy;
  if (sc.relaxation.kind == RelaxationModel::Kind::RateToThermal && !(sc.relaxation.rate > 0.0) &&
      rd.has("relaxation.rate"))
    rd.issue(rd.line("relaxation.rate"), "relaxation.rate: must be > 0 for rate_to_thermal (use kind = none)");

  // cross-block checks through the module validators
  if (issues.empty()) {
    try {
      sc.geometry.validate();
      (void)build_section_grid(sc.geometry, sc.n_s, sc.n_alpha, sc.padding);
    } catch (const std::exception& e) {
      issues.push_back({0, std::string("geometry/grid: ") + e.what()});
    }
    try {
      sc.probe.torus.validate();
    } catch (const std::exception& e) {
      issues.push_back({0, e.what()});
    }
  }
  std::stable_sort(issues.begin(), issues.end(),
                   [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  if (issues.empty()) result.scenario = std::move(sc);
  return result;
}

inline std::string format_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& i : issues) out += (i.line > 0 ? "line " + std::to_string(i.line) + ": " : "") + i.message + "\n";
  return out;
}

// Throws ConfigError with every issue listed.
inline Scenario load_scenario(const std::string& text) {
  ParseResult r = parse_scenario(text);
  if (!r.scenario) throw ConfigError(format_issues(r.issues));
  return std::move(*r.scenario);
}

inline std::vector<std::pair<std::string, std::string>> Scenario::resolved() const {
  using detail::format_number;
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + format_number(x);
    return s;
  };
  std::string sched;
  for (auto k : pulses.schedule) sched += (sched.empty() ? "" : ",") + std::string(k == SequenceKind::PS_I ? "PS_I" : "PS_II");
  return {
      {"scenario.name", name},
      {"scenario.experiment", experiment_name(experiment)},
      {"geometry.variant", geometry.variant == TorusVariant::Tube ? "tube" : "solid"},
      {"geometry.major_radius_nm", format_number(geometry.major_radius)},
      {"geometry.minor_radius_nm", format_number(geometry.minor_radius)},
      {"geometry.thickness_nm", format_number(geometry.shell_thickness)},
      {"geometry.well_depth_meV", format_number(geometry.well_depth)},
      {"geometry.effective_mass", format_number(geometry.effective_mass)},
      {"grid.n_s", std::to_string(n_s)},
      {"grid.n_alpha", std::to_string(n_alpha)},
      {"grid.padding_nm", format_number(padding)},
      {"grid.n_phi", std::to_string(n_phi)},
      {"basis.electrons", format_number(basis.electron_count)},
      {"basis.temperature_K", format_number(basis.temperature)},
      {"basis.m_max", std::to_string(basis.m_max)},
      {"basis.headroom", join(headrooms)},
      {"pulses.field_mV_per_nm", join(pulses.fields)},
      {"pulses.photon_energy_meV", format_number(pulses.photon_energy)},
      {"pulses.cycles", format_number(pulses.cycles)},
      {"pulses.waist_nm", format_number(pulses.waist)},
      {"pulses.host_wavelength_nm", format_number(pulses.host_wavelength)},
      {"pulses.schedule", sched},
      {"pulses.start_ps", format_number(pulses.start)},
      {"pulses.spacing_ps", format_number(pulses.spacing)},
      {"relaxation.kind", relaxation.kind == RelaxationModel::Kind::None ? "none" : "rate_to_thermal"},
      {"relaxation.rate_per_ps", format_number(relaxation.rate)},
      {"relaxation.pauli_blocking", relaxation.pauli_blocking ? "true" : "false"},
      {"time.end_ps", format_number(time.end)},
      {"time.steps_per_cycle", std::to_string(time.steps_per_cycle)},
      {"time.sample_every", std::to_string(time.sample_every)},
      {"time.steady_time_ps", format_number(time.steady_time)},
      {"radiation.distance_R", format_number(radiation.distance)},
      {"radiation.n_theta", std::to_string(radiation.n_theta)},
      {"radiation.time_ps", format_number(radiation.time)},
      {"probe.major_radius_nm", format_number(probe.torus.major_radius)},
      {"probe.minor_radius_nm", format_number(probe.torus.minor_radius)},
      {"probe.heights_nm", join(probe.heights)},
      {"probe.electrons", std::to_string(probe.torus.electrons)},
      {"probe.temperature_K", format_number(probe.torus.temperature)},
      {"probe.loop_points", std::to_string(probe.loop_points)},
      {"output.directory", output_dir},
  };
}

}  // namespace toroid
