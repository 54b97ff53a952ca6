#pragma once

// Cat formation and decoherence diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kerrcat/analytic_q.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/lindblad.hpp"
#include "kerrcat/metrics.hpp"

namespace kerrcat::analysis {

struct DecoherenceFit {
  double time = 0.0;       // -1 / slope of ln C(t)
  double intercept = 0.0;  // fitted ln C(0)
  double rms_residual = 0.0;
  std::size_t points = 0;
  bool crossed_one_over_e = false;  // whether any sample fell below 1/e
};

/// Log-linear least squares of ln C(t) over the initial decay window: from
/// the first sample until C drops below max(e^-2, 1e-4).
inline DecoherenceFit fit_decoherence_time(std::span<const double> times, std::span<const double> coherence) {
  if (times.size() != coherence.size()) throw DimensionMismatch("times and coherence lengths differ");
  const double floor = std::max(std::exp(-2.0), 1e-4);
  std::vector<double> xs;
  std::vector<double> ys;
  bool crossed = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (coherence[i] < std::exp(-1.0)) crossed = true;
    if (coherence[i] < floor) break;
    xs.push_back(times[i]);
    ys.push_back(std::log(coherence[i]));
  }
  const double t_last = xs.empty() ? 0.0 : xs.back();
  if (xs.size() < 5) {
    throw InsufficientDecay("need at least 5 samples in the decay window, have " + std::to_string(xs.size()), 0.0);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientDecay("decay window spans no time", t_last);
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) {
    // C never fell within the window; its 1/e time is at least the window length.
    throw InsufficientDecay("coherence does not decay over the sampled window", t_last);
  }
  DecoherenceFit fit;
  fit.time = -1.0 / slope;
  fit.intercept = my - slope * mx;
  fit.points = xs.size();
  fit.crossed_one_over_e = crossed;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

inline DecoherenceFit fit_decoherence_time(std::span<const lindblad::EvolutionRecord> records) {
  std::vector<double> times;
  std::vector<double> c;
  for (const auto& r : records) {
    if (!r.coherence) throw InvalidArgument("record at t = " + std::to_string(r.time) + " carries no coherence value");
    times.push_back(r.time);
    c.push_back(*r.coherence);
  }
  return fit_decoherence_time(times, c);
}

/// Default sampling window for the decoherence fit: short enough that
/// 1 - e^{-gamma t} stays linear in t to about 0.5%.
inline double decoherence_window(double gamma, std::complex<double> alpha0) {
  return std::min(1.0 / (gamma * std::norm(alpha0)), 0.01 / gamma);
}

/// Coherence trace of the two-branch state under pure damping (Kerr term
/// off, so the branches stay coherent states on the damped trajectory).
inline std::vector<lindblad::EvolutionRecord> decoherence_run(std::complex<double> alpha0, double gamma,
                                                              std::size_t cutoff, std::size_t samples = 21,
                                                              unsigned threads = 0) {
  lindblad::EvolutionSpec spec;
  spec.sys = KerrSystem{alpha0, 0.0, gamma, 0.0};
  spec.cutoff = cutoff;
  spec.t_final = decoherence_window(gamma, alpha0);
  spec.sample_times = lindblad::uniform_samples(spec.t_final, samples);
  spec.threads = threads;
  return lindblad::evolve(spec, density_from_pure(cat_state(alpha0, cutoff)));
}

/// Same metric evaluated from the closed-form series for an initial
/// two-branch state under the full Kerr + damping dynamics.
inline double analytic_coherence(const KerrSystem& sys, double t, const analytic::SeriesOptions& opts = {}) {
  const auto dyads = analytic::cat_initial(sys.alpha0);
  const auto a = branch_amplitude(sys.alpha0, t, sys.gamma);
  const double plus = analytic::matrix_element(a, a, t, sys, dyads, opts).real();
  const double minus = analytic::matrix_element(-a, -a, t, sys, dyads, opts).real();
  if (plus <= 1e-15 || minus <= 1e-15) throw DegenerateBranches("branch populations vanish");
  return std::abs(analytic::matrix_element(a, -a, t, sys, dyads, opts)) / std::sqrt(plus * minus);
}

enum class Axis { kReal, kImaginary };

/// W along one axis at `resolution` evenly spaced points in [-extent, extent].
inline std::vector<std::pair<double, double>> wigner_slice(const DensityOperator& rho, Axis axis, double extent,
                                                           std::size_t resolution) {
  if (resolution == 0) throw InvalidArgument("slice resolution must be >= 1");
  if (!(extent >= 0.0)) throw InvalidArgument("slice extent must be >= 0");
  std::vector<std::pair<double, double>> out;
  out.reserve(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double x =
        resolution == 1 ? 0.0 : -extent + 2.0 * extent * static_cast<double>(i) / static_cast<double>(resolution - 1);
    const std::complex<double> alpha = axis == Axis::kReal ? std::complex<double>{x, 0.0} : std::complex<double>{0.0, x};
    out.emplace_back(x, wigner(rho, alpha));
  }
  return out;
}

struct CatReport {
  std::complex<double> alpha0;
  double gamma = 0.0;
  double t_cat = 0.0;
  double t_revival = 0.0;
  double fidelity_at_tcat = 0.0;
  double wigner_origin = 0.0;
  double coherence = 0.0;
  double t_dec_fitted = 0.0;   // +inf without damping
  double t_dec_formula = 0.0;  // 1/(gamma |alpha0|^2), +inf without damping
};

/// Evolves |alpha0> to t_cat under the full dynamics and fits the decay of
/// the two-branch coherence.
inline CatReport cat_report(const KerrSystem& sys, std::size_t cutoff, unsigned threads = 0) {
  sys.validate();
  if (!(sys.mu > 0.0)) throw InvalidArgument("cat_report needs mu > 0");
  CatReport rep;
  rep.alpha0 = sys.alpha0;
  rep.gamma = sys.gamma;
  rep.t_cat = sys.t_cat();
  rep.t_revival = sys.t_revival();

  lindblad::EvolutionSpec spec;
  spec.sys = sys;
  spec.cutoff = cutoff;
  spec.t_final = rep.t_cat;
  spec.sample_times = {rep.t_cat};
  spec.threads = threads;
  const auto at_cat = lindblad::evolve(spec, density_from_pure(coherent_state(sys.alpha0, cutoff)));
  const auto& rho = at_cat.back().rho;
  rep.fidelity_at_tcat = cat_fidelity(rho, sys.alpha0);
  rep.wigner_origin = wigner(rho, 0.0);
  rep.coherence = coherence_metric(rho, sys.alpha0, rep.t_cat, sys.gamma);

  constexpr double inf = std::numeric_limits<double>::infinity();
  const double rate = sys.gamma * std::norm(sys.alpha0);
  rep.t_dec_formula = rate > 0.0 ? 1.0 / rate : inf;
  if (rate > 0.0) {
    const auto records = decoherence_run(sys.alpha0, sys.gamma, cutoff, 21, threads);
    rep.t_dec_fitted = fit_decoherence_time(records).time;
  } else {
    rep.t_dec_fitted = inf;
  }
  return rep;
}

}  // namespace kerrcat::analysis
