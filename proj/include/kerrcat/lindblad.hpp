#pragma once

// Fixed-step RK4 integration of the damped Kerr master equation
//
//   d rho/dt = i mu [n^2, rho] - i delta [n, rho] + (gamma/2)(2 a rho a+ - n rho - rho n)
//
// in a truncated number basis. Element-wise,
//
//   d rho_mn/dt = [i mu (m^2 - n^2) - i delta (m - n) - gamma (m + n)/2] rho_mn
//               + gamma sqrt((m+1)(n+1)) rho_{m+1,n+1},
//
// so each band of fixed m - n is an independent upper-bidiagonal linear
// system. Bands with m - n >= 0 are integrated; the rest follow by Hermiticity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kerrcat/detail/parallel.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/kerr_system.hpp"
#include "kerrcat/metrics.hpp"
#include "kerrcat/phase_grid.hpp"

namespace kerrcat::lindblad {

/// dt from the stiffness rule 0.05 / (gamma N + mu N^2 + |delta| N).
struct AutoStep {};
struct FixedStep {
  double dt;
};
/// Halve dt from the rule value until two successive runs agree to tolerance.
struct AccuracyTarget {
  double tolerance = 1e-9;
  int max_halvings = 10;
};
using StepControl = std::variant<AutoStep, FixedStep, AccuracyTarget>;

struct EvolutionSpec {
  KerrSystem sys;
  std::size_t cutoff = 0;
  double t_final = 0.0;
  std::vector<double> sample_times;
  StepControl step = AutoStep{};
  double leak_threshold = 1e-8;  // max population allowed in the top level
  bool annotate = true;          // compute cat fidelity and coherence per record
  unsigned threads = 0;

  void validate() const {
    sys.validate();
    if (cutoff == 0) throw InvalidArgument("cutoff must be >= 1");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InvalidArgument("t_final must be finite and >= 0");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
      throw InvalidArgument("sample_times must be sorted");
    for (double t : sample_times)
      if (!(t >= 0.0 && t <= t_final)) throw InvalidArgument("sample time outside [0, t_final]");
    if (const auto* f = std::get_if<FixedStep>(&step); f != nullptr && !(f->dt > 0.0))
      throw InvalidArgument("fixed dt must be > 0");
  }
};

struct EvolutionRecord {
  double time = 0.0;
  DensityOperator rho;
  double mean_n = 0.0;
  double purity = 0.0;
  double trace_error = 0.0;
  double boundary_population = 0.0;
  std::optional<double> cat_fidelity;
  std::optional<double> coherence;
};

/// Evenly spaced samples 0, t_final/(count-1), ..., t_final.
inline std::vector<double> uniform_samples(double t_final, std::size_t count) {
  if (count <= 1 || t_final == 0.0) return {t_final};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = t_final * static_cast<double>(i) / static_cast<double>(count - 1);
  out.back() = t_final;
  return out;
}

/// Time derivative of rho under the master equation (full matrix, no band shortcut).
inline Matrix rhs(const DensityOperator& rho, const KerrSystem& sys) {
  const auto n = static_cast<Eigen::Index>(rho.cutoff());
  const Matrix& r = rho.matrix();
  Matrix out(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dm = static_cast<double>(m);
      const double dk = static_cast<double>(k);
      const cplx coeff{-0.5 * sys.gamma * (dm + dk), sys.mu * (dm * dm - dk * dk) - sys.detuning * (dm - dk)};
      cplx v = coeff * r(m, k);
      if (m + 1 < n && k + 1 < n) v += sys.gamma * std::sqrt((dm + 1.0) * (dk + 1.0)) * r(m + 1, k + 1);
      out(m, k) = v;
    }
  }
  return out;
}

inline double max_stable_dt(const KerrSystem& sys, std::size_t cutoff) {
  const double n = static_cast<double>(cutoff);
  const double stiffness = sys.gamma * n + sys.mu * n * n + std::abs(sys.detuning) * n;
  return stiffness > 0.0 ? 0.05 / stiffness : std::numeric_limits<double>::infinity();
}

namespace detail {

// One band y_j = rho_{j+d, j}, j < N - d.
class Band {
 public:
  Band(const KerrSystem& sys, std::size_t cutoff, std::size_t d) : diag_(cutoff - d), off_(cutoff - d, 0.0) {
    const double dd = static_cast<double>(d);
    for (std::size_t j = 0; j < diag_.size(); ++j) {
      const double jj = static_cast<double>(j);
      const double m = jj + dd;
      diag_[j] = cplx{-0.5 * sys.gamma * (m + jj), sys.mu * (m * m - jj * jj) - sys.detuning * dd};
      if (j + 1 < diag_.size()) off_[j] = sys.gamma * std::sqrt((m + 1.0) * (jj + 1.0));
    }
    k1_.resize(diag_.size());
    k2_.resize(diag_.size());
    k3_.resize(diag_.size());
    k4_.resize(diag_.size());
    tmp_.resize(diag_.size());
  }

  void step(std::vector<cplx>& y, double h) {
    apply(y, k1_);
    axpy(y, k1_, 0.5 * h, tmp_);
    apply(tmp_, k2_);
    axpy(y, k2_, 0.5 * h, tmp_);
    apply(tmp_, k3_);
    axpy(y, k3_, h, tmp_);
    apply(tmp_, k4_);
    const double w = h / 6.0;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += w * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

 private:
  void apply(const std::vector<cplx>& y, std::vector<cplx>& out) const {
    const std::size_t n = y.size();
    for (std::size_t j = 0; j + 1 < n; ++j) out[j] = diag_[j] * y[j] + off_[j] * y[j + 1];
    out[n - 1] = diag_[n - 1] * y[n - 1];
  }
  static void axpy(const std::vector<cplx>& y, const std::vector<cplx>& k, double h, std::vector<cplx>& out) {
    for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] + h * k[j];
  }

  std::vector<cplx> diag_;
  std::vector<double> off_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

inline std::size_t step_count(double interval, double dt) {
  if (interval <= 0.0) return 0;
  if (!std::isfinite(dt)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(interval / dt - 1e-9)));
}

inline std::vector<Matrix> integrate(const EvolutionSpec& spec, const Matrix& initial, double dt) {
  const std::size_t n = spec.cutoff;
  const auto ni = static_cast<Eigen::Index>(n);
  std::vector<Matrix> out(spec.sample_times.size(), Matrix::Zero(ni, ni));
  kerrcat::detail::parallel_for(n, spec.threads, [&](std::size_t d) {
    Band band(spec.sys, n, d);
    std::vector<cplx> y(n - d);
    for (std::size_t j = 0; j < y.size(); ++j)
      y[j] = initial(static_cast<Eigen::Index>(j + d), static_cast<Eigen::Index>(j));
    double t = 0.0;
    for (std::size_t s = 0; s < spec.sample_times.size(); ++s) {
      const double interval = spec.sample_times[s] - t;
      const std::size_t steps = step_count(interval, dt);
      const double h = steps > 0 ? interval / static_cast<double>(steps) : 0.0;
      for (std::size_t i = 0; i < steps; ++i) band.step(y, h);
      t = spec.sample_times[s];
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (!std::isfinite(y[j].real()) || !std::isfinite(y[j].imag()))
          throw StepSizeUnstable("non-finite density element in band " + std::to_string(d) + " at t = " +
                                 std::to_string(t));
        const auto row = static_cast<Eigen::Index>(j + d);
        const auto col = static_cast<Eigen::Index>(j);
        out[s](row, col) = y[j];
        if (d > 0) out[s](col, row) = std::conj(y[j]);
      }
    }
  });
  return out;
}

inline double max_difference(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return worst;
}

inline void check_leak(const Matrix& rho, double threshold, double t) {
  const auto top = rho.rows() - 1;
  const double pop = rho(top, top).real();
  if (pop > threshold) {
    throw CutoffLeak("population " + std::to_string(pop) + " in top level " + std::to_string(top) +
                     " at t = " + std::to_string(t) + " exceeds " + std::to_string(threshold));
  }
}

}  // namespace detail

/// Integrates from `initial` and returns one record per sample time.
inline std::vector<EvolutionRecord> evolve(const EvolutionSpec& spec, const DensityOperator& initial) {
  spec.validate();
  if (initial.cutoff() != spec.cutoff) throw DimensionMismatch("initial state cutoff differs from spec cutoff");
  detail::check_leak(initial.matrix(), spec.leak_threshold, 0.0);

  const double rule_dt = max_stable_dt(spec.sys, spec.cutoff);
  std::vector<Matrix> states;
  if (const auto* fixed = std::get_if<FixedStep>(&spec.step)) {
    states = detail::integrate(spec, initial.matrix(), fixed->dt);
  } else if (const auto* target = std::get_if<AccuracyTarget>(&spec.step)) {
    double dt = rule_dt;
    states = detail::integrate(spec, initial.matrix(), dt);
    bool converged = !std::isfinite(dt);
    for (int i = 0; i < target->max_halvings && !converged; ++i) {
      dt *= 0.5;
      auto finer = detail::integrate(spec, initial.matrix(), dt);
      converged = detail::max_difference(states, finer) < target->tolerance;
      states = std::move(finer);
    }
    if (!converged) throw StepSizeUnstable("step halving did not reach the accuracy target");
  } else {
    states = detail::integrate(spec, initial.matrix(), rule_dt);
  }

  std::vector<EvolutionRecord> records;
  records.reserve(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const double t = spec.sample_times[s];
    detail::check_leak(states[s], spec.leak_threshold, t);
    auto rho = DensityOperator::adopt(std::move(states[s]));
    const double tr_err = rho.trace_error();
    if (tr_err > 1e-6 || rho.matrix().cwiseAbs().maxCoeff() > 1.0 + 1e-6)
      throw StepSizeUnstable("trace drifted by " + std::to_string(tr_err) + " at t = " + std::to_string(t));
    const double mean_n = expectation_n(rho);
    const double pur = purity(rho);
    const double top = rho(rho.cutoff() - 1, rho.cutoff() - 1).real();
    EvolutionRecord rec{t, std::move(rho), mean_n, pur, tr_err, top, std::nullopt, std::nullopt};
    if (spec.annotate) {
      rec.cat_fidelity = analysis::cat_fidelity(rec.rho, spec.sys.alpha0);
      try {
        rec.coherence = analysis::coherence_metric(rec.rho, spec.sys.alpha0, t, spec.sys.gamma);
      } catch (const DegenerateBranches&) {
        rec.coherence = std::nullopt;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

/// Q on every grid node from a density operator.
inline QSurface q_from_rho(const DensityOperator& rho, const PhaseGrid& grid, double time = 0.0,
                           unsigned threads = 0) {
  QSurface surface{grid, time, std::vector<double>(grid.size(), 0.0)};
  kerrcat::detail::parallel_for(grid.resolution(), threads, [&](std::size_t row) {
    for (std::size_t i = 0; i < grid.resolution(); ++i) {
      const std::size_t flat = row * grid.resolution() + i;
      surface.values[flat] = husimi_q(rho, grid.node(flat));
    }
  });
  return surface;
}

}  // namespace kerrcat::lindblad
