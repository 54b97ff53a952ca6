#pragma once

// Independent reference computations for the test suites. Nothing here
// calls into the library's evaluation paths: amplitudes use explicit
// factorials, displacements use a dense matrix exponential in a padded
// space, and the series factor uses 50-digit arithmetic.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// e^{-|a|^2/2} a^n / sqrt(n!) with tgamma, no recurrence.
inline std::vector<cplx> coherent_bruteforce(cplx a, std::size_t n) {
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long double fact = std::tgamma(static_cast<long double>(k) + 1.0L);
    out[k] = std::exp(-0.5 * std::norm(a)) * std::pow(a, static_cast<int>(k)) /
             static_cast<double>(std::sqrt(fact));
  }
  return out;
}

inline double poisson_pmf(double mean, std::size_t k) {
  return std::exp(-mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0));
}

inline Matrix annihilation(std::size_t n) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) a(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(double(k));
  return a;
}

/// exp(alpha a+ - alpha* a) in an n-level space.
inline Matrix displacement_dense(cplx alpha, std::size_t n) {
  const Matrix a = annihilation(n);
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return gen.exp();
}

/// (2/pi) sum_k (-1)^k <k|D+ rho D|k> with rho zero-padded by `pad` levels.
inline double wigner_dense(const Matrix& rho, cplx alpha, std::size_t pad = 100) {
  const auto n = static_cast<std::size_t>(rho.rows());
  const std::size_t big = n + pad;
  Matrix r = Matrix::Zero(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(big));
  r.topLeftCorner(rho.rows(), rho.cols()) = rho;
  const Matrix d = displacement_dense(alpha, big);
  const Matrix displaced = d.adjoint() * r * d;
  double s = 0.0;
  // Only the levels that are well inside the padded space carry weight.
  for (std::size_t k = 0; k + 40 < big; ++k)
    s += ((k % 2 == 0) ? 1.0 : -1.0) * displaced(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
  return 2.0 / std::numbers::pi * s;
}

/// Z_pq(t) evaluated with 50 significant digits, no Taylor branch.
inline cplx z_factor_mp(int p, int q, double t, double mu, double gamma, double alpha0_sq) {
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp tt = t;
  const mp lr = gamma;                       // Re lambda
  const mp li = mp(2) * mu * (p - q);        // Im lambda
  const mp half = mp(p + q) / 2;
  // e^{-lambda t}
  const mp em = exp(-lr * tt);
  const mp er = em * cos(li * tt);
  const mp ei = -em * sin(li * tt);
  // (1 - e^{-lambda t}) / lambda
  const mp nr = 1 - er;
  const mp ni = -ei;
  const mp den = lr * lr + li * li;
  mp fr, fi;
  if (den == 0) {
    fr = tt;
    fi = 0;
  } else {
    fr = (nr * lr + ni * li) / den;
    fi = (ni * lr - nr * li) / den;
  }
  const mp g = mp(gamma) * alpha0_sq;
  const mp xr = -half * lr * tt + g * fr;
  const mp xi = -half * li * tt + g * fi;
  const mp mag = exp(xr);
  return {static_cast<double>(mag * cos(xi)), static_cast<double>(mag * sin(xi))};
}

/// Random density matrix A A+ / Tr with complex Gaussian A.
inline Matrix random_density(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto ni = static_cast<Eigen::Index>(n);
  Matrix a(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) a(i, j) = cplx{g(rng), g(rng)};
  Matrix r = a * a.adjoint();
  r /= r.trace();
  // exact Hermitian symmetrization against rounding
  return 0.5 * (r + r.adjoint());
}

}  // namespace oracle
