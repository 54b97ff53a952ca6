#pragma once

// Closed-form Husimi function of the damped Kerr oscillator as a double
// power series
//
//   Q(alpha,t) = e^{-|alpha|^2-|a0|^2} sum_{p,q} (alpha a0*)^p/p! (alpha* a0)^q/q! Z_pq(t)
//   Z_pq(t)    = exp{ -(p+q)/2 lambda t + gamma |a0|^2 (1 - e^{-lambda t})/lambda },
//   lambda     = gamma + 2i mu (p-q).
//
// The same series with |a0|^2 replaced by a b* gives <beta|rho(t)|kappa> for
// the initial dyad |a><b|, which is what the off-diagonal coherent matrix
// elements of an evolved superposition need.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kerrcat/detail/parallel.hpp"
#include "kerrcat/detail/special.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/kerr_system.hpp"
#include "kerrcat/phase_grid.hpp"

namespace kerrcat::analytic {

using cplx = std::complex<double>;

struct SeriesOptions {
  double tolerance = 1e-10;     // bound on the truncated tail
  std::size_t max_order = 800;  // hard cap on p, q
  unsigned threads = 0;         // 0: hardware concurrency
};

/// Initial-state term weight * |ket><bra|.
struct InitialDyad {
  cplx ket;
  cplx bra;
  cplx weight{1.0, 0.0};
};

inline std::vector<InitialDyad> coherent_initial(cplx alpha0) { return {{alpha0, alpha0, 1.0}}; }

/// Dyads of (e^{-i pi/4}|a> - e^{i pi/4}|-a>)/sqrt(2).
inline std::vector<InitialDyad> cat_initial(cplx alpha0) {
  const cplx wp = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4);
  const cplx wm = -std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4);
  const cplx amp[2] = {alpha0, -alpha0};
  const cplx w[2] = {wp, wm};
  std::vector<InitialDyad> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.push_back({amp[i], amp[j], w[i] * std::conj(w[j])});
  return out;
}

/// Series order cap max(25, ceil(r + 10 sqrt r)) for the Poisson-weighted terms.
inline std::size_t series_order(double r) {
  return std::max<std::size_t>(25, static_cast<std::size_t>(std::ceil(r + 10.0 * std::sqrt(r))));
}

namespace detail {

using kerrcat::detail::log_factorial;

// log Z_pq for coupling c (= a b*); the detuning enters as e^{i delta (p-q) t}.
inline cplx log_z(std::size_t p, std::size_t q, double t, const KerrSystem& sys, cplx coupling) {
  const double dpq = static_cast<double>(p) - static_cast<double>(q);
  const cplx lambda{sys.gamma, 2.0 * sys.mu * dpq};
  const double half_sum = 0.5 * static_cast<double>(p + q);
  return -half_sum * lambda * t + sys.gamma * coupling * kerrcat::detail::relaxation_integral(lambda, t) +
         cplx{0.0, sys.detuning * dpq * t};
}

// Z_pq for fixed t, system and coupling, p, q < order. Row p, column q.
struct ZTable {
  std::size_t order = 0;
  std::vector<cplx> z;

  ZTable(std::size_t n, double t, const KerrSystem& sys, cplx coupling) : order(n), z(n * n) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) z[p * n + q] = std::exp(log_z(p, q, t, sys, coupling));
  }
};

// u_p = e^{-(|x|^2+|y|^2)/2} (x y*)^p / p!, p < order, in log space.
inline void scaled_powers(cplx x, cplx y, std::size_t order, std::vector<cplx>& out) {
  out.assign(order, cplx{0.0, 0.0});
  const double base = -0.5 * (std::norm(x) + std::norm(y));
  const cplx w = x * std::conj(y);
  const double r = std::abs(w);
  if (r == 0.0) {
    out[0] = std::exp(base);
    return;
  }
  const double log_r = std::log(r);
  const double phase = std::arg(w);
  for (std::size_t p = 0; p < order; ++p) {
    const double pp = static_cast<double>(p);
    out[p] = std::polar(std::exp(base + pp * log_r - log_factorial(p)), pp * phase);
  }
}

// Bound on the dropped terms (p >= order or q >= order) of one dyad.
// With |Z_pq| <= e^{-(p+q) gamma t/2} e^{|a||b|(1-e^{-gamma t})} the
// prefactored double sum reduces to Poisson tails at damped rates.
inline double tail_bound(cplx bra, cplx ket, const InitialDyad& d, double t, const KerrSystem& sys,
                         std::size_t order) {
  const double decay = std::exp(-0.5 * sys.gamma * t);
  const double na = std::abs(d.ket);
  const double nb = std::abs(d.bra);
  const double r_u = std::abs(ket) * nb * decay;
  const double r_v = std::abs(bra) * na * decay;
  const double du = std::abs(ket) - nb * decay;
  const double dv = std::abs(bra) - na * decay;
  const double log_env = -0.5 * du * du - 0.5 * dv * dv -
                         0.5 * (na - nb) * (na - nb) * (-std::expm1(-sys.gamma * t));
  using kerrcat::detail::log_poisson_tail_bound;
  const double tails =
      std::exp(log_poisson_tail_bound(r_u, order)) + std::exp(log_poisson_tail_bound(r_v, order));
  return std::abs(d.weight) * std::exp(log_env) * tails;
}

inline cplx contract(const std::vector<cplx>& u, const std::vector<cplx>& v, const ZTable& table) {
  const std::size_t n = table.order;
  cplx total{0.0, 0.0};
  for (std::size_t p = 0; p < n; ++p) {
    const cplx* row = &table.z[p * n];
    cplx acc{0.0, 0.0};
    for (std::size_t q = 0; q < n; ++q) acc += v[q] * row[q];
    total += u[p] * acc;
  }
  return total;
}

inline double dyad_rate(cplx bra, cplx ket, const InitialDyad& d) {
  return std::max(std::abs(ket) * std::abs(d.bra), std::abs(bra) * std::abs(d.ket));
}

inline std::size_t converged_order(cplx bra, cplx ket, std::span<const InitialDyad> dyads, double t,
                                   const KerrSystem& sys, const SeriesOptions& opts) {
  double r = 0.0;
  for (const auto& d : dyads) r = std::max(r, dyad_rate(bra, ket, d));
  std::size_t order = std::min(series_order(r), opts.max_order);
  for (;;) {
    double bound = 0.0;
    for (const auto& d : dyads) bound += tail_bound(bra, ket, d, t, sys, order);
    if (bound <= opts.tolerance) return order;
    if (order >= opts.max_order) {
      throw SeriesNotConverged("series tail bound " + std::to_string(bound) + " exceeds tolerance at order " +
                               std::to_string(order));
    }
    order = std::min(opts.max_order, order + order / 4 + 1);
  }
}

inline void check_range(double q, cplx alpha) {
  if (!(q >= -1e-9 && q <= 1.0 + 1e-9)) {
    throw SeriesNotConverged("Q(" + std::to_string(alpha.real()) + "," + std::to_string(alpha.imag()) +
                             ") = " + std::to_string(q) + " outside [0,1]");
  }
}

inline double real_part_checked(cplx value, cplx alpha) {
  if (std::abs(value.imag()) > 1e-10) {
    throw SeriesNotConverged("Q series has imaginary residue " + std::to_string(value.imag()) + " at alpha = (" +
                             std::to_string(alpha.real()) + "," + std::to_string(alpha.imag()) + ")");
  }
  return value.real();
}

}  // namespace detail

/// Z_pq(t). The detuning phase e^{i delta (p-q) t} is folded in and is 1 on
/// resonance.
inline cplx z_factor(std::size_t p, std::size_t q, double t, const KerrSystem& sys) {
  if (!(t >= 0.0)) throw InvalidArgument("z_factor: t must be >= 0");
  return std::exp(detail::log_z(p, q, t, sys, std::norm(sys.alpha0)));
}

/// <bra|rho(t)|ket> for rho(0) = sum of weighted dyads.
inline cplx matrix_element(cplx bra, cplx ket, double t, const KerrSystem& sys,
                           std::span<const InitialDyad> dyads, const SeriesOptions& opts = {}) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  sys.validate();
  const std::size_t order = detail::converged_order(bra, ket, dyads, t, sys, opts);
  std::vector<cplx> u;
  std::vector<cplx> v;
  cplx total{0.0, 0.0};
  for (const auto& d : dyads) {
    const detail::ZTable table(order, t, sys, d.ket * std::conj(d.bra));
    detail::scaled_powers(ket, d.bra, order, u);
    detail::scaled_powers(d.ket, bra, order, v);
    total += d.weight * detail::contract(u, v, table);
  }
  return total;
}

/// Q(alpha, t) for the coherent initial state |sys.alpha0>.
inline double q_value(cplx alpha, double t, const KerrSystem& sys, const SeriesOptions& opts = {}) {
  const auto dyads = coherent_initial(sys.alpha0);
  const double q = detail::real_part_checked(matrix_element(alpha, alpha, t, sys, dyads, opts), alpha);
  detail::check_range(q, alpha);
  return q;
}

/// Q(alpha, t) on every grid node. The Z table is shared; nodes are
/// independent and written in place, so the result does not depend on the
/// thread count.
inline QSurface q_surface(const PhaseGrid& grid, double t, const KerrSystem& sys, const SeriesOptions& opts = {}) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  sys.validate();
  const InitialDyad dyad{sys.alpha0, sys.alpha0, 1.0};
  const cplx far = grid.max_abs_node();
  const std::size_t order = detail::converged_order(far, far, std::span(&dyad, 1), t, sys, opts);
  const detail::ZTable table(order, t, sys, std::norm(sys.alpha0));

  QSurface surface{grid, t, std::vector<double>(grid.size(), 0.0)};
  kerrcat::detail::parallel_for(grid.resolution(), opts.threads, [&](std::size_t row) {
    std::vector<cplx> u;
    std::vector<cplx> v;
    for (std::size_t i = 0; i < grid.resolution(); ++i) {
      const std::size_t flat = row * grid.resolution() + i;
      const cplx alpha = grid.node(flat);
      const double bound = detail::tail_bound(alpha, alpha, dyad, t, sys, order);
      if (bound > opts.tolerance) {
        throw SeriesNotConverged("tail bound " + std::to_string(bound) + " at grid node (" +
                                 std::to_string(alpha.real()) + "," + std::to_string(alpha.imag()) + ")");
      }
      detail::scaled_powers(alpha, sys.alpha0, order, u);
      detail::scaled_powers(sys.alpha0, alpha, order, v);
      const double q = detail::real_part_checked(detail::contract(u, v, table), alpha);
      detail::check_range(q, alpha);
      surface.values[flat] = q;
    }
  });
  return surface;
}

/// <n> from the antinormally ordered moment (1/pi) int |alpha|^2 Q = <n> + 1.
inline double mean_n_from_q(const QSurface& surface) {
  const double norm = surface.normalization();
  if (std::abs(norm - 1.0) > 1e-3) {
    throw GridTooSmall("Q surface normalizes to " + std::to_string(norm) + "; enlarge or refine the grid");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < surface.values.size(); ++k) s += std::norm(surface.grid.node(k)) * surface.values[k];
  const double h = surface.grid.spacing();
  return s * h * h / std::numbers::pi - 1.0;
}

}  // namespace kerrcat::analytic
