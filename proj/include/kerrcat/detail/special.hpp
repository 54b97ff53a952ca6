#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace kerrcat::detail {

using cplx = std::complex<double>;

inline double log_factorial(std::size_t n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// (1 - e^{-lambda t}) / lambda, continuous through lambda = 0.
/// Below |lambda t| = 1e-6 the third-order Taylor form is exact to rounding.
inline cplx relaxation_integral(cplx lambda, double t) {
  const cplx x = lambda * t;
  if (std::abs(x) < 1e-6) return t * (1.0 - x / 2.0 + x * x / 6.0);
  return -expm1(-x) / lambda;
}

// Upper bound on log P[X >= order] for X ~ Poisson(rate), from the
// next-term ratio: the tail is at most pmf(order) / (1 - rate/(order+1)).
inline double log_poisson_tail_bound(double rate, std::size_t order) {
  if (rate <= 0.0) return order == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double k = static_cast<double>(order);
  if (k + 1.0 <= rate) return 0.0;
  const double log_pmf = -rate + k * std::log(rate) - std::lgamma(k + 1.0);
  return std::min(0.0, log_pmf - std::log1p(-rate / (k + 1.0)));
}

// Amplitudes <n|beta> of the exact (untruncated) coherent state for n < count,
// evaluated in log space so large |beta| neither overflows nor underflows early.
inline std::vector<cplx> coherent_amplitudes_exact(cplx beta, std::size_t count) {
  std::vector<cplx> out(count, cplx{0.0, 0.0});
  const double r = std::abs(beta);
  const double half_norm = 0.5 * r * r;
  if (r == 0.0) {
    if (count > 0) out[0] = 1.0;
    return out;
  }
  const double log_r = std::log(r);
  const double phase = std::arg(beta);
  for (std::size_t n = 0; n < count; ++n) {
    const double nn = static_cast<double>(n);
    const double log_mag = -half_norm + nn * log_r - 0.5 * log_factorial(n);
    out[n] = std::polar(std::exp(log_mag), nn * phase);
  }
  return out;
}

/// Dense matrix of displacement elements <m|D(beta)|n>, m,n < dim, row-major.
///
/// For m >= n: sqrt(n!/m!) beta^{m-n} e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2),
/// and <n|D(beta)|m> = (-1)^{m-n} conj(<m|D(beta)|n>)
/// The Laguerre values come from the three-term recurrence in n at fixed
/// order, rescaled to stay inside double range; prefactors are log-space.
inline std::vector<cplx> displacement_elements(cplx beta, std::size_t dim) {
  std::vector<cplx> out(dim * dim, cplx{0.0, 0.0});
  const double x = std::norm(beta);
  const double r = std::abs(beta);
  const double log_r = r > 0.0 ? std::log(r) : 0.0;
  const double phase = std::arg(beta);
  constexpr double kRescale = 1e150;
  const double log_rescale = std::log(kRescale);

  for (std::size_t k = 0; k < dim; ++k) {
    if (k > 0 && r == 0.0) break;
    const double kk = static_cast<double>(k);
    // L_n^{(k)}(x) for n = 0 .. dim-1-k, held as cur * e^{scale}; L_{-1} = 0.
    double prev = 0.0;
    double cur = 1.0;
    double scale = 0.0;
    for (std::size_t n = 0; n + k < dim; ++n) {
      if (n > 0) {
        const double j = static_cast<double>(n - 1);
        const double next = ((2.0 * j + 1.0 + kk - x) * cur - (j + kk) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
      }
      if (std::abs(cur) > kRescale) {
        cur /= kRescale;
        prev /= kRescale;
        scale += log_rescale;
      }
      const std::size_t m = n + k;
      double value = 0.0;
      if (cur != 0.0) {
        const double log_mag = 0.5 * (log_factorial(n) - log_factorial(m)) + kk * log_r -
                               0.5 * x + scale + std::log(std::abs(cur));
        value = std::copysign(std::exp(log_mag), cur);
      }
      const cplx elem = std::polar(1.0, kk * phase) * value;
      out[m * dim + n] = elem;
      if (k > 0) out[n * dim + m] = ((k % 2 == 0) ? 1.0 : -1.0) * std::conj(elem);
    }
  }
  return out;
}

}  // namespace kerrcat::detail
