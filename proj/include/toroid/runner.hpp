#pragma once

// Executes one scenario end to end and writes columnar text exports plus a
// key=value manifest. Data files depend only on the scenario text and the
// run options; the manifest additionally records wall time.

#include <openssl/evp.h>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <fftw3.h>

#include "toroid/experiments.hpp"
#include "toroid/scenario.hpp"

namespace toroid {

inline constexpr const char* artifact_version = "0.1.0";

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct RunOptions {
  std::string output_dir;       // overrides the scenario's directory when set
  int threads = 0;              // 0 = OpenMP default
  double resolution_scale = 1.0;
};

struct RunReport {
  std::filesystem::path directory;
  std::vector<std::string> files;
  std::string manifest;
  double wall_seconds = 0.0;
};

// Multiplies every grid count; n_alpha stays even.
inline Scenario scaled(Scenario sc, double scale) {
  if (!(scale > 0.0)) throw ConfigError("resolution scale must be > 0");
  if (scale == 1.0) return sc;
  sc.n_s = static_cast<std::size_t>(std::max(8.0, std::round(static_cast<double>(sc.n_s) * scale)));
  sc.n_alpha = 2 * static_cast<std::size_t>(std::max(4.0, std::round(static_cast<double>(sc.n_alpha) * scale / 2.0)));
  sc.n_phi = std::max(128, static_cast<int>(std::lround(sc.n_phi * scale)));
  return sc;
}

class Exporter {
 public:
  Exporter(std::filesystem::path dir, std::string hash, std::string experiment)
      : dir_(std::move(dir)), hash_(std::move(hash)), experiment_(std::move(experiment)) {
    std::filesystem::create_directories(dir_);
  }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows, const std::string& note = "") {
    std::ostringstream os;
    os << "# scenario_sha256=" << hash_ << " experiment=" << experiment_ << "\n";
    if (!note.empty()) os << "# " << note << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "\t" : "") << columns[c];
    os << "\n";
    char buf[64];
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.10e", row[c]);
        os << (c ? "\t" : "") << buf;
      }
      os << "\n";
    }
    write(name, os.str());
  }

  // Named scalar results as a two-column table.
  void summary(const std::string& name, const std::vector<std::pair<std::string, double>>& values) {
    std::ostringstream os;
    os << "# scenario_sha256=" << hash_ << " experiment=" << experiment_ << "\n";
    os << "quantity\tvalue\n";
    char buf[64];
    for (const auto& [k, v] : values) {
      std::snprintf(buf, sizeof buf, "%.10e", v);
      os << k << "\t" << buf << "\n";
    }
    write(name, os.str());
  }

  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  void write(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
    files_.push_back(name);
  }
  std::filesystem::path dir_;
  std::string hash_, experiment_;
  std::vector<std::string> files_;
};

namespace detail {

inline std::string sweep_suffix(std::size_t i, std::size_t n, const char* tag) {
  return n > 1 ? "_" + std::string(tag) + std::to_string(i) : "";
}

inline void export_series(Exporter& ex, const std::string& stem, const DriveRun& run) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < run.time.size(); ++k)
    rows.push_back({run.time[k], run.tz[k], run.tz_free[k], run.m_phi[k], run.j_z[k], run.polar[k], run.a_cvb[k],
                    run.a_lin[k]});
  ex.table(stem + "_series.tsv",
           {"t_ps", "T_z", "T_z_field_free", "M_phi", "J_z", "J_polar", "A_cvb_at_R", "A_linear"}, rows,
           "T in e nm^2 (moment units of the current integral / c), J in e nm/ps, A in mV ps/nm");
}

inline void export_populations(Exporter& ex, const std::string& name, const EigenBasis& basis,
                               const BlockDensityMatrix& rho) {
  const PolarPopulations pp = polar_populations(basis, rho, 2);
  std::vector<std::vector<double>> rows;
  for (std::size_t b = 0; b < pp.m.size(); ++b) {
    std::vector<double> row{static_cast<double>(pp.m[b])};
    for (int l = -2; l <= 2; ++l) row.push_back(pp.at(b, l));
    rows.push_back(row);
  }
  ex.table(name, {"m", "P_l-2", "P_l-1", "P_l0", "P_l+1", "P_l+2"}, rows);
}

inline void run_spectrum(const Scenario& sc, Exporter& ex) {
  const Prepared p = prepare(sc, sc.headrooms.front());
  std::vector<std::vector<double>> rows;
  for (const auto& b : p.basis.blocks)
    for (const auto& s : b.states) {
      const auto [l, w] = dominant_polar(s.l_weights);
      auto get = [&](int q) {
        auto it = s.l_weights.find(q);
        return it == s.l_weights.end() ? 0.0 : it->second;
      };
      rows.push_back({static_cast<double>(s.m), static_cast<double>(s.n), s.energy,
                      s.parity == Parity::Even ? 1.0 : -1.0, s.occupation, static_cast<double>(l), w, get(-2), get(-1),
                      get(0), get(1), get(2)});
    }
  ex.table("spectrum_levels.tsv",
           {"m", "n", "energy_meV", "parity", "occupation", "abs_l_dominant", "weight_dominant", "w_l-2", "w_l-1",
            "w_l0", "w_l+1", "w_l+2"},
           rows);
  ex.summary("spectrum_summary.tsv", {{"fermi_level_meV", p.basis.fermi_level},
                                      {"ground_energy_meV", p.basis.ground_energy()},
                                      {"cutoff_meV", p.basis.cutoff},
                                      {"states", static_cast<double>(p.basis.state_count())}});
}

inline void run_buildup(const Scenario& sc, Exporter& ex, const std::string& stem) {
  for (std::size_t i = 0; i < sc.pulses.fields.size(); ++i)
    for (std::size_t h = 0; h < sc.headrooms.size(); ++h) {
      const Prepared p = prepare(sc, sc.headrooms[h]);
      const PulseTrain train = make_train(sc.pulses, sc.pulses.fields[i], sc.geometry.major_radius);
      const DriveRun run = run_drive(p.basis, train, sc.relaxation, drive_options(sc, carrier_window(sc.pulses.photon_energy)));
      const std::string tag = stem + sweep_suffix(i, sc.pulses.fields.size(), "e") +
                              sweep_suffix(h, sc.headrooms.size(), "h");
      export_series(ex, tag, run);
      export_populations(ex, tag + "_populations.tsv", p.basis, run.final_state);
      ex.summary(tag + "_summary.tsv", {{"field_mV_per_nm", sc.pulses.fields[i]},
                                        {"headroom", sc.headrooms[h]},
                                        {"states", static_cast<double>(p.basis.state_count())},
                                        {"peak_abs_T_z", run.peak_abs_tz()},
                                        {"final_T_z", run.tz.back()},
                                        {"trace_drift", run.trace_drift}});
    }
}

inline void run_steady(const Scenario& sc, Exporter& ex) {
  const Prepared p = prepare(sc, sc.headrooms.front());
  const PulseTrain train = make_train(sc.pulses, sc.pulses.fields.front(), sc.geometry.major_radius);
  const CurrentField f = steady_current(p.basis, train, sc.relaxation, sc.time.steady_time, sc.time.steps_per_cycle);
  const double rr = sc.geometry.major_radius;
  BiotSavartOptions bs;
  bs.n_phi = sc.n_phi;
  const FieldMap map = field_map(p.grid, f, sc.n_phi, 0.0, 2.0 * rr, -rr, rr, 61, 61);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < map.x.size(); ++k) {
    const Vec3& a = map.a[k];
    rows.push_back({map.x[k], map.z[k], a[0], a[2], std::sqrt(a[0] * a[0] + a[2] * a[2])});
  }
  ex.table("fig5_fieldmap.tsv", {"x_nm", "z_nm", "A_x", "A_z", "abs_A"}, rows, "y = 0 plane, A in mV ps/nm");
  const AxisProfile axis = axis_profile(p.grid, f, bs);
  rows.clear();
  for (std::size_t k = 0; k < axis.z.size(); ++k) rows.push_back({axis.z[k], axis.a_z[k], axis.fit[k]});
  ex.table("fig5_axis.tsv", {"z_nm", "A_z", "fit"}, rows);
  const auto rays = far_field(p.grid, f, bs, {0.3, 0.9, units::pi / 2.0});
  rows.clear();
  for (const auto& ray : rays)
    for (std::size_t k = 0; k < ray.r.size(); ++k) rows.push_back({ray.theta, ray.r[k], ray.magnitude[k]});
  ex.table("fig5_far.tsv", {"theta", "r_nm", "abs_A"}, rows);
  const Vec3 t = toroidal_moment(p.grid, f);
  const Mat3 q = quadrupole_moment(p.grid, f);
  ex.summary("fig5_moments.tsv", {{"T_x", t[0]},
                                  {"T_y", t[1]},
                                  {"T_z", t[2]},
                                  {"M_phi", magnetic_moment(p.grid, f)},
                                  {"Q_frobenius", frobenius(q)},
                                  {"axis_fit_coefficient", axis.coefficient},
                                  {"axis_fit_residual", axis.residual},
                                  {"far_slope_theta_0.3", rays[0].slope},
                                  {"far_slope_theta_0.9", rays[1].slope},
                                  {"far_slope_theta_pi/2", rays[2].slope}});
}

// Smallest shift that maps the schedule onto itself; the whole length if none.
inline int schedule_period(const std::vector<SequenceKind>& s) {
  const int n = static_cast<int>(s.size());
  for (int p = 1; p < n; ++p) {
    bool ok = true;
    for (int i = 0; i + p < n && ok; ++i) ok = s[i] == s[i + p];
    if (ok) return p;
  }
  return std::max(n, 1);
}

inline void run_trains(const Scenario& sc, Exporter& ex) {
  const Prepared p = prepare(sc, sc.headrooms.front());
  const PulseTrain train = make_train(sc.pulses, sc.pulses.fields.front(), sc.geometry.major_radius);
  DriveOptions o = drive_options(sc, carrier_window(sc.pulses.photon_energy));
  o.end = std::max(o.end, train.end_time());
  const DriveRun run = run_drive(p.basis, train, sc.relaxation, o);
  export_series(ex, "fig7", run);
  const double period = 2.0 * units::pi * units::hbar / sc.pulses.photon_energy;
  const auto [ta, va] = cycle_average(run.time, run.tz_free, period);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < ta.size(); ++k) rows.push_back({ta[k], va[k]});
  ex.table("fig7_averaged.tsv", {"t_ps", "T_z_field_free_cycle_avg"}, rows);
  const SpectralPeak pk = train_peak(run, sc.pulses.photon_energy);
  rows.clear();
  for (std::size_t k = 0; k < pk.spectrum.frequency.size(); ++k)
    rows.push_back({pk.spectrum.frequency[k], pk.spectrum.magnitude[k]});
  ex.table("fig7_spectrum.tsv", {"omega_rad_per_ps", "magnitude"}, rows);
  const double spacing = schedule_spacing(sc.pulses);
  const int slots = schedule_period(sc.pulses.schedule);
  ex.summary("fig7_summary.tsv", {{"pair_spacing_ps", spacing},
                                  {"schedule_period_slots", static_cast<double>(slots)},
                                  {"schedule_omega_rad_per_ps", 2.0 * units::pi / (slots * spacing)},
                                  {"peak_omega_rad_per_ps", pk.frequency},
                                  {"bin_rad_per_ps", pk.bin}});
}

inline void run_radiation(const Scenario& sc, Exporter& ex) {
  const Prepared p = prepare(sc, sc.headrooms.front());
  const PulseTrain train = make_train(sc.pulses, sc.pulses.fields.front(), sc.geometry.major_radius);
  DriveOptions o = drive_options(sc, carrier_window(sc.pulses.photon_energy));
  o.radiation = true;
  const DriveRun run = run_drive(p.basis, train, sc.relaxation, o);
  const double rr = sc.geometry.major_radius;
  const double when = sc.radiation.time > 0.0 ? sc.radiation.time : loudest_time(run.radiation_full, train);
  const RadiationPattern pat = radiation_pattern(run.radiation_full, rr, sc.radiation.distance, when, sc.radiation.n_theta);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < pat.theta.size(); ++k) rows.push_back({pat.theta[k], pat.a_theta[k], pat.reference[k]});
  ex.table("fig8_pattern.tsv", {"theta", "abs_A_theta", "sin_theta"}, rows);
  rows.clear();
  for (std::size_t k = 0; k < pat.r.size(); ++k) rows.push_back({pat.r[k], pat.poynting[k]});
  ex.table("fig8_poynting.tsv", {"r_nm", "S_r"}, rows);
  const EmissionSeries em = emission_series(run, train, rr, sc.radiation.distance, 2.0);
  rows.clear();
  for (std::size_t k = 0; k < em.time.size(); ++k) rows.push_back({em.time[k], em.e_full[k], em.e_static[k]});
  ex.table("fig8_emission.tsv", {"emission_time_ps", "abs_E_full", "abs_E_static_part"}, rows,
           "observer at r = distance * R, theta = pi/2");
  export_series(ex, "fig8", run);
  ex.summary("fig8_summary.tsv", {{"emission_time_ps", when},
                                  {"pattern_correlation_sin", pat.correlation},
                                  {"poynting_slope", pat.poynting_slope},
                                  {"in_pulse_max_E", em.in_pulse_max},
                                  {"post_pulse_max_E_static_part", em.post_static_max},
                                  {"post_pulse_max_E_full", em.post_full_max}});
}

inline void run_probe(const Scenario& sc, Exporter& ex) {
  const Prepared p = prepare(sc, sc.headrooms.front());
  const PulseTrain train = make_train(sc.pulses, sc.pulses.fields.front(), sc.geometry.major_radius);
  const CurrentField f = steady_current(p.basis, train, sc.relaxation, sc.time.steady_time, sc.time.steps_per_cycle);
  const FieldFn field = source_field(p.grid, f, sc.n_phi);
  std::vector<std::vector<double>> sweep, levels, weights;
  ProbeTorus torus = sc.probe.torus;
  for (double dz : sc.probe.heights) {
    torus.height = dz;
    const LoopSamples loop = sample_loop(field, torus, 0.0, sc.probe.loop_points);
    const PolarSpectrum sp = shifted_polar_spectrum(torus, loop);
    sweep.push_back({dz, sp.gamma, induced_toroidization(torus, sp)});
    for (const auto& lv : sp.levels) {
      if (std::abs(lv.l) > 12) continue;
      levels.push_back({dz, static_cast<double>(lv.l), lv.energy, lv.energy_unshifted, lv.occupation});
      for (const auto& [l2, w] : lv.weights) weights.push_back({dz, static_cast<double>(lv.l), static_cast<double>(l2), w});
    }
  }
  ex.table("fig9_sweep.tsv", {"d_z_nm", "gamma", "T2_moment"}, sweep);
  ex.table("fig9_levels.tsv", {"d_z_nm", "l", "energy_meV", "energy_unshifted_meV", "occupation"}, levels);
  ex.table("fig9_weights.tsv", {"d_z_nm", "l", "l_component", "weight"}, weights);
}

}  // namespace detail

inline RunReport run(const Scenario& input, const RunOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (opt.threads > 0) omp_set_num_threads(opt.threads);
  const Scenario sc = scaled(input, opt.resolution_scale);
  const std::string hash = sha256_hex(sc.source);
  const std::filesystem::path dir = opt.output_dir.empty() ? std::filesystem::path(sc.output_dir) : std::filesystem::path(opt.output_dir);
  Exporter ex(dir, hash, experiment_name(sc.experiment));
  switch (sc.experiment) {
    case Experiment::Spectrum: detail::run_spectrum(sc, ex); break;
    case Experiment::Fig5Steady: detail::run_steady(sc, ex); break;
    case Experiment::Fig6Buildup: detail::run_buildup(sc, ex, "fig6"); break;
    case Experiment::Fig7Trains: detail::run_trains(sc, ex); break;
    case Experiment::Fig8Radiation: detail::run_radiation(sc, ex); break;
    case Experiment::Fig9Probe: detail::run_probe(sc, ex); break;
    case Experiment::Fig10Solid: detail::run_buildup(sc, ex, "fig10"); break;
  }
  RunReport report;
  report.directory = dir;
  report.files = ex.files();
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream m;
  m << "scenario_sha256=" << hash << "\n";
  m << "artifact_version=" << artifact_version << "\n";
  m << "eigen_version=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << "\n";
  m << "fftw_version=" << fftw_version << "\n";
  m << "compiler=" << __VERSION__ << "\n";
  m << "threads=" << omp_get_max_threads() << "\n";
  m << "resolution_scale=" << detail::format_number(opt.resolution_scale) << "\n";
  m << "wall_time_s=" << detail::format_number(report.wall_seconds) << "\n";
  for (const auto& [k, v] : sc.resolved()) m << "param." << k << "=" << v << "\n";
  m << "file_count=" << report.files.size() << "\n";
  for (std::size_t i = 0; i < report.files.size(); ++i) {
    std::ifstream in(dir / report.files[i], std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    m << "file." << i << "=" << report.files[i] << "\n";
    m << "file." << i << ".sha256=" << sha256_hex(buf.str()) << "\n";
  }
  report.manifest = m.str();
  std::ofstream(dir / "manifest.txt", std::ios::binary) << report.manifest;
  return report;
}

}  // namespace toroid
