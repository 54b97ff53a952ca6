#pragma once

// Run configuration: a single versioned JSON document.
//
// {
//   "schema_version": 1,
//   "mode": "dimensionless" | "physical",
//   "dimensionless": {"alpha0": 2 | [re, im], "gamma_over_mu": 0.01, "detuning_over_mu": 0},
//   "physical": {"B": 5.71, "V0": 10, "d": 0.0033, "T": 4, "drive_amplitude": 0, "drive_duration": 0,
//                "pump_frequency": <rad/s>, "detuning": <rad/s>, "gamma": 1, "alpha0_override": [2, 0]},
//   "grid": {"center": [0, 0], "half_extent": 5, "resolution": 101},
//   "cutoff": 40,
//   "output_dir": "out",
//   "seed": 0,
//   "qsurface": {"time": 1.5707963, "backend": "analytic"},
//   "evolve": {"t_final": 10, "samples": 11},
//   "sweep": {"alpha0": [1, 2], "gamma": [0.01, 0.02]}
// }
//
// Times are in units of 1/mu in dimensionless mode and seconds in physical
// mode. Only one of "dimensionless" and "physical" may be present.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <complex>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/kerr_system.hpp"
#include "kerrcat/phase_grid.hpp"
#include "kerrcat/trap_params.hpp"
#include "kerrcat/version.hpp"

namespace kerrcat::cli {

using json = nlohmann::json;
using cplx = std::complex<double>;

enum class Mode { kDimensionless, kPhysical };
enum class Backend { kAnalytic, kNumeric };

struct DimensionlessParams {
  cplx alpha0{2.0, 0.0};
  double gamma_over_mu = 0.01;
  double detuning_over_mu = 0.0;
};

struct GridParams {
  cplx center{0.0, 0.0};
  double half_extent = 5.0;
  std::size_t resolution = 101;

  PhaseGrid make() const { return PhaseGrid(center, half_extent, resolution); }
};

struct RunConfig {
  Mode mode = Mode::kDimensionless;
  std::optional<trap::TrapConfig> physical;
  std::optional<DimensionlessParams> dimensionless;
  GridParams grid;
  std::optional<std::size_t> cutoff;
  std::string output_dir = ".";
  std::uint64_t seed = 0;  // reserved; no code path consumes randomness

  std::string qsurface_time = "0";
  Backend backend = Backend::kAnalytic;
  double evolve_t_final = 0.0;
  std::size_t evolve_samples = 11;
  std::vector<cplx> sweep_alpha0;
  std::vector<double> sweep_gamma;

  json effective;  // the document after CLI overrides; hashed into the digest
};

namespace detail {

inline double get_number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? get_number(j, key) : fallback;
}

inline cplx to_complex(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(what + " must be a number or a [re, im] pair");
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items())
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

inline trap::TrapConfig parse_physical(const json& p) {
  reject_unknown(p, {"B", "V0", "d", "T", "drive_amplitude", "drive_duration", "pump_frequency", "detuning", "gamma",
                     "alpha0_override"},
                 "physical");
  trap::TrapConfig c;
  c.magnetic_field = get_number(p, "B");
  c.electrode_potential = get_number(p, "V0");
  c.trap_dimension = get_number(p, "d");
  c.temperature = number_or(p, "T", 0.0);
  c.drive_amplitude = number_or(p, "drive_amplitude", 0.0);
  c.drive_duration = number_or(p, "drive_duration", 0.0);
  if (p.contains("pump_frequency")) c.pump_frequency = get_number(p, "pump_frequency");
  if (p.contains("detuning")) c.detuning = get_number(p, "detuning");
  c.gamma = number_or(p, "gamma", 0.0);
  if (p.contains("alpha0_override")) c.alpha0_override = to_complex(p.at("alpha0_override"), "alpha0_override");
  try {
    trap::validate(c);
  } catch (const Error& e) {
    throw ConfigError(std::string("physical: ") + e.what());
  }
  return c;
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"schema_version", "mode", "dimensionless", "physical", "grid", "cutoff", "output_dir", "seed",
                  "qsurface", "evolve", "sweep"},
                 "config");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kConfigSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kConfigSchemaVersion));

  RunConfig cfg;
  cfg.effective = doc;
  const std::string mode = doc.value("mode", std::string("dimensionless"));
  if (mode == "dimensionless") {
    cfg.mode = Mode::kDimensionless;
  } else if (mode == "physical") {
    cfg.mode = Mode::kPhysical;
  } else {
    throw ConfigError("mode must be 'dimensionless' or 'physical'");
  }
  if (doc.contains("dimensionless") && doc.contains("physical"))
    throw ConfigError("exactly one of 'dimensionless' and 'physical' may be given");

  if (cfg.mode == Mode::kPhysical) {
    if (!doc.contains("physical")) throw ConfigError("physical mode needs a 'physical' section");
    cfg.physical = parse_physical(doc["physical"]);
  } else {
    DimensionlessParams d;
    if (doc.contains("physical")) throw ConfigError("dimensionless mode cannot take a 'physical' section");
    if (doc.contains("dimensionless")) {
      const auto& s = doc["dimensionless"];
      reject_unknown(s, {"alpha0", "gamma_over_mu", "detuning_over_mu"}, "dimensionless");
      if (s.contains("alpha0")) d.alpha0 = to_complex(s["alpha0"], "alpha0");
      d.gamma_over_mu = number_or(s, "gamma_over_mu", d.gamma_over_mu);
      d.detuning_over_mu = number_or(s, "detuning_over_mu", 0.0);
    }
    if (!(d.gamma_over_mu >= 0.0)) throw ConfigError("gamma_over_mu must be >= 0");
    if (!std::isfinite(d.alpha0.real()) || !std::isfinite(d.alpha0.imag()))
      throw ConfigError("alpha0 must be finite");
    cfg.dimensionless = d;
  }

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    reject_unknown(g, {"center", "half_extent", "resolution"}, "grid");
    if (g.contains("center")) cfg.grid.center = to_complex(g["center"], "grid.center");
    cfg.grid.half_extent = number_or(g, "half_extent", cfg.grid.half_extent);
    if (g.contains("resolution")) {
      if (!g["resolution"].is_number_integer() || g["resolution"].get<long long>() <= 0)
        throw ConfigError("grid.resolution must be a positive integer");
      cfg.grid.resolution = g["resolution"].get<std::size_t>();
    }
  }
  try {
    (void)cfg.grid.make();
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  if (doc.contains("cutoff") && !doc["cutoff"].is_null()) {
    if (!doc["cutoff"].is_number_integer() || doc["cutoff"].get<long long>() <= 0)
      throw ConfigError("cutoff must be a positive integer");
    cfg.cutoff = doc["cutoff"].get<std::size_t>();
  }
  cfg.output_dir = doc.value("output_dir", std::string("."));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("qsurface")) {
    const auto& q = doc["qsurface"];
    reject_unknown(q, {"time", "backend"}, "qsurface");
    if (q.contains("time")) {
      const auto& t = q["time"];
      if (t.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << t.get<double>();
        cfg.qsurface_time = os.str();
      } else if (t.is_string()) {
        cfg.qsurface_time = t.get<std::string>();
      } else {
        throw ConfigError("qsurface.time must be a number or string");
      }
    }
    if (q.contains("backend")) {
      const auto b = q["backend"].get<std::string>();
      if (b == "analytic") cfg.backend = Backend::kAnalytic;
      else if (b == "numeric") cfg.backend = Backend::kNumeric;
      else throw ConfigError("qsurface.backend must be 'analytic' or 'numeric'");
    }
  }
  if (doc.contains("evolve")) {
    const auto& e = doc["evolve"];
    reject_unknown(e, {"t_final", "samples"}, "evolve");
    cfg.evolve_t_final = number_or(e, "t_final", 0.0);
    if (!(cfg.evolve_t_final >= 0.0)) throw ConfigError("evolve.t_final must be >= 0");
    if (e.contains("samples")) {
      if (!e["samples"].is_number_integer() || e["samples"].get<long long>() <= 0)
        throw ConfigError("evolve.samples must be a positive integer");
      cfg.evolve_samples = e["samples"].get<std::size_t>();
    }
  }
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    reject_unknown(s, {"alpha0", "gamma"}, "sweep");
    if (s.contains("alpha0")) {
      if (!s["alpha0"].is_array()) throw ConfigError("sweep.alpha0 must be an array");
      for (const auto& v : s["alpha0"]) cfg.sweep_alpha0.push_back(to_complex(v, "sweep.alpha0 entry"));
    }
    if (s.contains("gamma")) {
      if (!s["gamma"].is_array()) throw ConfigError("sweep.gamma must be an array");
      for (const auto& v : s["gamma"]) {
        if (!v.is_number() || !(v.get<double>() >= 0.0)) throw ConfigError("sweep.gamma entries must be >= 0");
        cfg.sweep_gamma.push_back(v.get<double>());
      }
    }
  }
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
}

/// Dynamics parameters implied by the config. Physical mode works in SI
/// seconds; dimensionless mode sets mu = 1.
inline KerrSystem kerr_system(const RunConfig& cfg) {
  if (cfg.mode == Mode::kPhysical) {
    const auto p = trap::derive(*cfg.physical);
    return KerrSystem{p.alpha0, p.mu, p.gamma, p.detuning};
  }
  const auto& d = *cfg.dimensionless;
  return KerrSystem{d.alpha0, 1.0, d.gamma_over_mu, d.detuning_over_mu};
}

/// Number of levels used by numeric paths: the override, else the auto rule.
inline std::size_t effective_cutoff(const RunConfig& cfg, cplx alpha0) {
  return cfg.cutoff ? *cfg.cutoff : auto_cutoff(alpha0);
}

/// Cutoff for numeric Q surfaces. The overlap <alpha|psi> sums terms
/// (conj(alpha) alpha0)^n / n!, so the default also covers a Poisson tail of
/// mean |alpha0| max|alpha| over the grid.
inline std::size_t surface_cutoff(const RunConfig& cfg, cplx alpha0, const PhaseGrid& grid) {
  if (cfg.cutoff) return *cfg.cutoff;
  return std::max(auto_cutoff(alpha0), auto_cutoff(std::sqrt(std::abs(alpha0) * grid.max_abs_node())));
}

/// Parses "1.25", "t_cat", "0.5*t_cat", "2t_revival".
inline double parse_time(const std::string& text, const KerrSystem& sys) {
  auto scaled = [&](const std::string& unit, double value) -> std::optional<double> {
    if (text.size() < unit.size() || text.compare(text.size() - unit.size(), unit.size(), unit) != 0)
      return std::nullopt;
    std::string prefix = text.substr(0, text.size() - unit.size());
    if (!prefix.empty() && prefix.back() == '*') prefix.pop_back();
    double factor = 1.0;
    if (!prefix.empty()) {
      try {
        std::size_t used = 0;
        factor = std::stod(prefix, &used);
        if (used != prefix.size()) throw ConfigError("bad time factor '" + prefix + "'");
      } catch (const std::logic_error&) {
        throw ConfigError("bad time factor '" + prefix + "'");
      }
    }
    return factor * value;
  };
  double t = 0.0;
  if (auto v = scaled("t_cat", sys.t_cat())) {
    t = *v;
  } else if (auto w = scaled("t_revival", sys.t_revival())) {
    t = *w;
  } else {
    try {
      std::size_t used = 0;
      t = std::stod(text, &used);
      if (used != text.size()) throw ConfigError("bad time '" + text + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad time '" + text + "'");
    }
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("time must be finite and >= 0, got '" + text + "'");
  return t;
}

/// FNV-1a 64 over the canonical dump of the effective config. The output
/// directory is left out so relocated runs stay byte-identical.
inline std::string config_digest(const json& effective) {
  json hashed = effective;
  if (hashed.is_object()) hashed.erase("output_dir");
  const std::string s = hashed.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kerrcat::cli
