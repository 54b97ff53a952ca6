#pragma once

// Subcommand implementations. Each writes its artifacts and returns a
// process exit code: 0 success, 2 config error, 3 numerical failure,
// 4 convergence failure.

#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "kerrcat/analysis.hpp"
#include "kerrcat/analytic_q.hpp"
#include "kerrcat/cli/config.hpp"
#include "kerrcat/constants.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/lindblad.hpp"
#include "kerrcat/trap_params.hpp"
#include "kerrcat/version.hpp"

namespace kerrcat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConvergence = 4;

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NonPositiveInput*>(&e) ||
      dynamic_cast<const InvalidArgument*>(&e))
    return kExitConfig;
  if (dynamic_cast<const SeriesNotConverged*>(&e) || dynamic_cast<const GridTooSmall*>(&e) ||
      dynamic_cast<const InsufficientDecay*>(&e))
    return kExitConvergence;
  return kExitNumerical;
}

/// Shortest round-trip decimal (at most 17 significant digits); "inf"/"nan".
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON number, or the strings "inf"/"nan" where JSON has no literal.
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline std::string header_line(const RunConfig& cfg) {
  return std::string("# kerrcat ") + kVersion + " config_digest=" + config_digest(cfg.effective);
}

/// CLI flag values layered over the config document before parsing.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::string> backend;
  std::optional<std::string> time;
  std::optional<double> grid_extent;
  std::optional<std::size_t> grid_res;
  std::optional<std::size_t> cutoff;
  std::optional<double> t_final;
  std::optional<std::size_t> samples;
  std::optional<std::vector<double>> sweep_alpha0;
  std::optional<std::vector<double>> sweep_gamma;
};

inline json apply_overrides(json doc, const Overrides& o) {
  if (o.out) doc["output_dir"] = *o.out;
  if (o.backend) doc["qsurface"]["backend"] = *o.backend;
  if (o.time) doc["qsurface"]["time"] = *o.time;
  if (o.grid_extent) doc["grid"]["half_extent"] = *o.grid_extent;
  if (o.grid_res) doc["grid"]["resolution"] = *o.grid_res;
  if (o.cutoff) doc["cutoff"] = *o.cutoff;
  if (o.t_final) doc["evolve"]["t_final"] = *o.t_final;
  if (o.samples) doc["evolve"]["samples"] = *o.samples;
  if (o.sweep_alpha0) doc["sweep"]["alpha0"] = *o.sweep_alpha0;
  if (o.sweep_gamma) doc["sweep"]["gamma"] = *o.sweep_gamma;
  return doc;
}

namespace detail {

inline std::filesystem::path prepare_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  return std::filesystem::path(cfg.output_dir) / name;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

// ---------------------------------------------------------------- params

inline json params_json(const RunConfig& cfg) {
  json out;
  out["artifact_version"] = kVersion;
  out["config_digest"] = config_digest(cfg.effective);
  out["constants_table"] = constants::kTableVersion;
  if (cfg.mode == Mode::kDimensionless) {
    const auto& d = *cfg.dimensionless;
    out["mode"] = "dimensionless";
    out["params"] = {{"alpha0", detail::complex_json(d.alpha0)},
                     {"gamma_over_mu", d.gamma_over_mu},
                     {"t_cat_mu", std::numbers::pi / 2.0}};
    return out;
  }
  const auto p = trap::derive(*cfg.physical);
  out["mode"] = "physical";
  out["constants"] = {{"elementary_charge", constants::elementary_charge},
                      {"electron_mass", constants::electron_mass},
                      {"hbar", constants::hbar},
                      {"speed_of_light", constants::speed_of_light},
                      {"boltzmann", constants::boltzmann}};
  out["params"] = {{"omega_c", p.omega_c},
                   {"cyclotron_frequency_hz", p.cyclotron_frequency_hz()},
                   {"omega_z", p.omega_z},
                   {"axial_frequency_hz", p.axial_frequency_hz()},
                   {"omega_M", p.omega_M},
                   {"omega_p", p.omega_p},
                   {"detuning", p.detuning},
                   {"mu", p.mu},
                   {"k", p.k},
                   {"alpha0", detail::complex_json(p.alpha0)},
                   {"gamma", p.gamma},
                   {"t_cat", p.t_cat},
                   {"t_revival", p.t_revival},
                   {"t_dec", json_number(p.t_dec)},
                   {"ratio", json_number(p.ratio)}};
  out["warnings"] = p.warnings;
  return out;
}

inline int cmd_params(const RunConfig& cfg, std::ostream& out) {
  out << params_json(cfg).dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- qsurface

inline QSurface numeric_surface(const KerrSystem& sys, std::size_t cutoff, const PhaseGrid& grid, double t) {
  lindblad::EvolutionSpec spec;
  spec.sys = sys;
  spec.cutoff = cutoff;
  spec.t_final = t;
  spec.sample_times = {t};
  spec.annotate = false;
  const auto initial = density_from_pure(coherent_state(sys.alpha0, cutoff, Truncation::kRenormalize));
  const auto records = lindblad::evolve(spec, initial);
  return lindblad::q_from_rho(records.back().rho, grid, t);
}

inline QSurface compute_qsurface(const RunConfig& cfg, double t, Backend backend) {
  const auto sys = kerr_system(cfg);
  const auto grid = cfg.grid.make();
  if (backend == Backend::kAnalytic) return analytic::q_surface(grid, t, sys);
  return numeric_surface(sys, surface_cutoff(cfg, sys.alpha0, grid), grid, t);
}

inline void write_qsurface_csv(std::ostream& out, const QSurface& s, const RunConfig& cfg) {
  out << header_line(cfg) << "\n";
  out << "re_alpha,im_alpha,q\n";
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const auto a = s.grid.node(k);
    out << format_double(a.real()) << ',' << format_double(a.imag()) << ',' << format_double(s.values[k]) << '\n';
  }
}

inline void write_gnuplot(const std::filesystem::path& csv, const std::string& body) {
  std::ofstream gp(csv.string() + ".gp", std::ios::binary);
  if (!gp) throw ConfigError("cannot write gnuplot script for '" + csv.string() + "'");
  gp << "# gnuplot script for " << csv.filename().string() << "\n";
  gp << "set datafile separator ','\n";
  gp << body;
}

inline int cmd_qsurface(const RunConfig& cfg, bool gnuplot = false) {
  const auto sys = kerr_system(cfg);
  const double t = parse_time(cfg.qsurface_time, sys);
  const auto surface = compute_qsurface(cfg, t, cfg.backend);
  const std::string name =
      std::string("qsurface_") + (cfg.backend == Backend::kAnalytic ? "analytic" : "numeric") + ".csv";
  const auto path = detail::prepare_output(cfg, name);
  auto out = detail::open_output(path);
  write_qsurface_csv(out, surface, cfg);
  if (gnuplot) {
    write_gnuplot(path, "set view map\nset xlabel 'Re alpha'\nset ylabel 'Im alpha'\n"
                        "splot '" + path.filename().string() + "' every ::2 using 1:2:3 with points pt 5 ps 0.5 palette notitle\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evolve

inline std::vector<lindblad::EvolutionRecord> run_evolution(const RunConfig& cfg) {
  const auto sys = kerr_system(cfg);
  lindblad::EvolutionSpec spec;
  spec.sys = sys;
  spec.cutoff = effective_cutoff(cfg, sys.alpha0);
  spec.t_final = cfg.evolve_t_final;
  spec.sample_times = lindblad::uniform_samples(cfg.evolve_t_final, cfg.evolve_samples);
  const auto initial = density_from_pure(coherent_state(sys.alpha0, spec.cutoff, Truncation::kRenormalize));
  return lindblad::evolve(spec, initial);
}

inline void write_evolve_csv(std::ostream& out, const std::vector<lindblad::EvolutionRecord>& records,
                             const RunConfig& cfg) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  out << header_line(cfg) << "\n";
  out << "t,mean_n,purity,trace_err,cat_fidelity,coherence\n";
  for (const auto& r : records) {
    out << format_double(r.time) << ',' << format_double(r.mean_n) << ',' << format_double(r.purity) << ','
        << format_double(r.trace_error) << ',' << format_double(r.cat_fidelity.value_or(nan)) << ','
        << format_double(r.coherence.value_or(nan)) << '\n';
  }
}

inline int cmd_evolve(const RunConfig& cfg, bool gnuplot = false) {
  const auto records = run_evolution(cfg);
  const auto path = detail::prepare_output(cfg, "evolve.csv");
  auto out = detail::open_output(path);
  write_evolve_csv(out, records, cfg);
  if (gnuplot) {
    write_gnuplot(path, "set xlabel 't'\nplot '" + path.filename().string() +
                            "' every ::2 using 1:2 with lines title 'mean_n', '' every ::2 using 1:5 with lines "
                            "title 'cat_fidelity', '' every ::2 using 1:6 with lines title 'coherence'\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  double tolerance = 0.0;
  double measured = 0.0;
  bool passed = false;
  std::string error;  // error kind when the check could not be computed
};

struct ValidationReport {
  std::vector<Check> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

// Runs body, which returns the measured value; the check passes when
// compare(measured, tolerance) holds. Library errors become failed checks.
template <typename Body, typename Compare>
void run_check(ValidationReport& rep, std::string name, double tol, Body&& body, Compare&& ok) {
  Check c{std::move(name), tol, std::numeric_limits<double>::quiet_NaN(), false, {}};
  try {
    c.measured = body();
    c.passed = ok(c.measured, tol);
  } catch (const Error& e) {
    c.error = e.kind();
  }
  rep.checks.push_back(std::move(c));
}

inline bool at_most(double m, double tol) { return m <= tol; }

inline double gaussian_deviation(const QSurface& s, std::complex<double> alpha0) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k)
    worst = std::max(worst, std::abs(s.values[k] - std::exp(-std::norm(s.grid.node(k) - alpha0))));
  return worst;
}

}  // namespace detail

/// Dual-path and invariant checks for the configured system.
inline ValidationReport run_validation(const RunConfig& cfg) {
  using detail::at_most;
  using detail::run_check;
  ValidationReport rep;
  const auto sys = kerr_system(cfg);
  const auto grid = cfg.grid.make();
  const std::size_t cutoff = surface_cutoff(cfg, sys.alpha0, grid);
  const auto a0 = sys.alpha0;

  run_check(rep, "initial_condition_analytic", 1e-10,
            [&] { return detail::gaussian_deviation(analytic::q_surface(grid, 0.0, sys), a0); }, at_most);

  // One numeric trajectory feeds the remaining numeric checks.
  std::vector<double> fractions;
  if (sys.mu > 0.0) fractions = {0.25, 0.5, 1.0};
  std::vector<double> times{0.0};
  for (double f : fractions) times.push_back(f * sys.t_cat());
  std::optional<std::vector<lindblad::EvolutionRecord>> traj;
  run_check(rep, "numeric_evolution", 0.0,
            [&] {
              lindblad::EvolutionSpec spec;
              spec.sys = sys;
              spec.cutoff = cutoff;
              spec.t_final = times.back();
              spec.sample_times = times;
              traj = lindblad::evolve(
                  spec, density_from_pure(coherent_state(a0, cutoff, Truncation::kRenormalize)));
              return 0.0;
            },
            at_most);

  if (traj) {
    const auto& recs = *traj;
    run_check(rep, "initial_condition_numeric", 1e-10,
              [&] { return detail::gaussian_deviation(lindblad::q_from_rho(recs[0].rho, grid), a0); }, at_most);
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      run_check(rep, "dual_path_t" + format_double(fractions[i]) + "_tcat", 1e-6,
                [&] {
                  const double t = times[i + 1];
                  return max_abs_difference(analytic::q_surface(grid, t, sys),
                                            lindblad::q_from_rho(recs[i + 1].rho, grid, t));
                },
                at_most);
    }
    run_check(rep, "energy_decay", 1e-8,
              [&] {
                double worst = 0.0;
                for (const auto& r : recs)
                  worst = std::max(worst, std::abs(r.mean_n - std::norm(a0) * std::exp(-sys.gamma * r.time)));
                return worst;
              },
              at_most);
    run_check(rep, "trace", 1e-8,
              [&] {
                double worst = 0.0;
                for (const auto& r : recs) worst = std::max(worst, r.trace_error);
                return worst;
              },
              at_most);
    run_check(rep, "hermiticity", 1e-10,
              [&] {
                double worst = 0.0;
                for (const auto& r : recs) worst = std::max(worst, r.rho.hermiticity_error());
                return worst;
              },
              at_most);
    run_check(rep, "positivity", -1e-9,
              [&] {
                double lowest = std::numeric_limits<double>::infinity();
                for (const auto& r : recs) lowest = std::min(lowest, r.rho.min_eigenvalue());
                return lowest;
              },
              [](double m, double tol) { return m >= tol; });
    run_check(rep, "wigner_bound", 2.0 / std::numbers::pi + 1e-9,
              [&] {
                double worst = 0.0;
                for (auto axis : {analysis::Axis::kReal, analysis::Axis::kImaginary})
                  for (const auto& [x, w] : analysis::wigner_slice(recs.back().rho, axis, grid.half_extent(), 41))
                    worst = std::max(worst, std::abs(w));
                return worst;
              },
              at_most);
    if (sys.gamma == 0.0 && sys.mu > 0.0) {
      run_check(rep, "cat_fidelity_numeric", 1e-8,
                [&] { return 1.0 - analysis::cat_fidelity(recs.back().rho, a0); }, at_most);
    }
  }

  const double t_end = sys.mu > 0.0 ? sys.t_cat() : 0.0;
  run_check(rep, "q_range", 1e-9,
            [&] {
              const auto s = analytic::q_surface(grid, t_end, sys);
              double excess = 0.0;
              for (double v : s.values) excess = std::max({excess, -v, v - 1.0});
              return excess;
            },
            at_most);
  run_check(rep, "q_normalization", 1e-3,
            [&] { return std::abs(analytic::q_surface(grid, t_end, sys).normalization() - 1.0); }, at_most);

  if (sys.gamma == 0.0 && sys.mu > 0.0) {
    run_check(rep, "cat_surface_agreement", 1e-8,
              [&] {
                const auto cat = density_from_pure(cat_state(a0, std::max(cutoff, auto_cutoff(a0))));
                return max_abs_difference(analytic::q_surface(grid, sys.t_cat(), sys), lindblad::q_from_rho(cat, grid));
              },
              at_most);
    run_check(rep, "kerr_revival", 1e-8,
              [&] {
                return max_abs_difference(analytic::q_surface(grid, sys.t_revival(), sys),
                                          analytic::q_surface(grid, 0.0, sys));
              },
              at_most);
    run_check(rep, "kerr_parity", 1e-8,
              [&] {
                const auto half = analytic::q_surface(grid, 0.5 * sys.t_revival(), sys);
                const PhaseGrid mirrored(-grid.center(), grid.half_extent(), grid.resolution());
                const auto start = analytic::q_surface(mirrored, 0.0, sys);
                double worst = 0.0;
                for (std::size_t k = 0; k < half.values.size(); ++k)
                  worst = std::max(worst, std::abs(half.values[k] - start.values[grid.mirrored(k)]));
                return worst;
              },
              at_most);
  }
  return rep;
}

inline json report_json(const ValidationReport& rep, const RunConfig& cfg) {
  json out;
  out["artifact_version"] = kVersion;
  out["config_digest"] = config_digest(cfg.effective);
  out["passed"] = rep.passed();
  out["checks"] = json::array();
  for (const auto& c : rep.checks) {
    json j{{"name", c.name}, {"tolerance", c.tolerance}, {"measured", json_number(c.measured)}, {"passed", c.passed}};
    if (!c.error.empty()) j["error"] = c.error;
    out["checks"].push_back(std::move(j));
  }
  return out;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& summary) {
  const auto rep = run_validation(cfg);
  const auto doc = report_json(rep, cfg);
  const auto path = detail::prepare_output(cfg, "validate.json");
  auto out = detail::open_output(path);
  out << doc.dump(2) << "\n";
  summary << doc.dump(2) << "\n";
  if (rep.passed()) return kExitOk;
  for (const auto& c : rep.checks)
    if (c.error == "SeriesNotConverged" || c.error == "GridTooSmall") return kExitConvergence;
  return kExitNumerical;
}

// ---------------------------------------------------------------- sweep

/// One CatReport per (alpha0, gamma), alpha0 outer. Gammas are in the mode's
/// rate units (gamma/mu when dimensionless).
inline std::vector<analysis::CatReport> run_sweep(const RunConfig& cfg) {
  const auto base = kerr_system(cfg);
  std::vector<analysis::CatReport> rows;
  for (const auto a : cfg.sweep_alpha0) {
    for (const double g : cfg.sweep_gamma) {
      KerrSystem sys = base;
      sys.alpha0 = a;
      sys.gamma = g;
      rows.push_back(analysis::cat_report(sys, effective_cutoff(cfg, a)));
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<analysis::CatReport>& rows, const RunConfig& cfg) {
  out << header_line(cfg) << "\n";
  out << "alpha0_re,alpha0_im,gamma,t_cat,fidelity_at_tcat,wigner_origin,coherence,t_dec_fitted,t_dec_formula\n";
  for (const auto& r : rows) {
    out << format_double(r.alpha0.real()) << ',' << format_double(r.alpha0.imag()) << ',' << format_double(r.gamma)
        << ',' << format_double(r.t_cat) << ',' << format_double(r.fidelity_at_tcat) << ','
        << format_double(r.wigner_origin) << ',' << format_double(r.coherence) << ','
        << format_double(r.t_dec_fitted) << ',' << format_double(r.t_dec_formula) << '\n';
  }
}

inline int cmd_sweep(const RunConfig& cfg, bool gnuplot = false) {
  const auto rows = run_sweep(cfg);
  const auto path = detail::prepare_output(cfg, "sweep.csv");
  auto out = detail::open_output(path);
  write_sweep_csv(out, rows, cfg);
  if (gnuplot) {
    write_gnuplot(path, "set logscale xy\nset xlabel 't_dec formula'\nset ylabel 't_dec fitted'\nplot '" +
                            path.filename().string() + "' every ::2 using 9:8 with points title 'fitted', x title 'formula'\n");
  }
  return kExitOk;
}

}  // namespace kerrcat::cli
