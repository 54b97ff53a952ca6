#pragma once

// Truncated Fock-space kernel: pure states, density operators and the
// phase-space functions evaluated from them.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kerrcat/detail/special.hpp"
#include "kerrcat/errors.hpp"

namespace kerrcat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Weight allowed to fall outside the truncated basis before a state
/// constructor refuses the cutoff.
inline constexpr double kTruncationTolerance = 1e-12;

/// A point of the complex phase plane (dimensionless coherent amplitude).
class PhasePoint {
 public:
  PhasePoint() = default;
  PhasePoint(cplx alpha) : alpha_(alpha) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
      throw InvalidArgument("phase point must be finite");
  }
  PhasePoint(double re) : PhasePoint(cplx{re, 0.0}) {}  // NOLINT(google-explicit-constructor)

  cplx value() const noexcept { return alpha_; }
  double norm() const noexcept { return std::norm(alpha_); }

 private:
  cplx alpha_{0.0, 0.0};
};

/// Cutoff rule ceil(|alpha|^2 + 8|alpha| + 10): the Poisson tail beyond it
/// stays below 1e-12 for |alpha| <= 6.
inline std::size_t auto_cutoff(PhasePoint alpha) {
  const double r = std::abs(alpha.value());
  return static_cast<std::size_t>(std::ceil(r * r + 8.0 * r + 10.0));
}

enum class Truncation {
  kStrict,       // throw CutoffTooSmall if the lost weight exceeds tolerance
  kRenormalize,  // accept any loss and renormalize
};

/// Pure state amplitudes c_0..c_{N-1} in the number basis.
class FockVector {
 public:
  explicit FockVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw InvalidArgument("FockVector cutoff must be >= 1");
  }

  std::size_t cutoff() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t n) const { return amps_.at(n); }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : amps_) s += std::norm(c);
    return s;
  }

  FockVector normalized() const {
    const double nrm = std::sqrt(norm_squared());
    if (nrm == 0.0) throw InvalidArgument("cannot normalize a zero vector");
    std::vector<cplx> out(amps_);
    for (auto& c : out) c /= nrm;
    return FockVector(std::move(out));
  }

  Eigen::VectorXcd to_eigen() const {
    return Eigen::Map<const Eigen::VectorXcd>(amps_.data(), static_cast<Eigen::Index>(amps_.size()));
  }

 private:
  std::vector<cplx> amps_;
};

/// <a|b>
inline cplx inner_product(const FockVector& a, const FockVector& b) {
  if (a.cutoff() != b.cutoff()) throw DimensionMismatch("inner_product: cutoffs differ");
  cplx s{0.0, 0.0};
  for (std::size_t n = 0; n < a.cutoff(); ++n) s += std::conj(a[n]) * b[n];
  return s;
}

inline FockVector number_state(std::size_t n, std::size_t cutoff) {
  if (n >= cutoff) throw CutoffTooSmall("number state " + std::to_string(n) + " needs cutoff > n");
  std::vector<cplx> amps(cutoff, cplx{0.0, 0.0});
  amps[n] = 1.0;
  return FockVector(std::move(amps));
}

namespace detail {

// c_{n+1} = c_n alpha / sqrt(n+1), c_0 = e^{-|alpha|^2/2}.
inline std::vector<cplx> coherent_recurrence(cplx alpha, std::size_t cutoff) {
  std::vector<cplx> c(cutoff);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n + 1 < cutoff; ++n)
    c[n + 1] = c[n] * alpha / std::sqrt(static_cast<double>(n + 1));
  return c;
}

inline void check_truncation(double kept_weight, double exact_weight, std::size_t cutoff,
                             Truncation policy, const char* what) {
  const double lost = exact_weight - kept_weight;
  if (policy == Truncation::kStrict && lost > kTruncationTolerance * exact_weight) {
    throw CutoffTooSmall(std::string(what) + ": cutoff " + std::to_string(cutoff) +
                         " loses weight " + std::to_string(lost));
  }
}

}  // namespace detail

/// D(alpha)|0> in the number basis, renormalized after truncation.
inline FockVector coherent_state(PhasePoint alpha, std::size_t cutoff,
                                 Truncation policy = Truncation::kStrict) {
  if (cutoff == 0) throw InvalidArgument("cutoff must be >= 1");
  auto c = detail::coherent_recurrence(alpha.value(), cutoff);
  FockVector v(std::move(c));
  detail::check_truncation(v.norm_squared(), 1.0, cutoff, policy, "coherent_state");
  return v.normalized();
}

/// (e^{-i pi/4}|a> - e^{i pi/4}|-a>)/sqrt(2), the two-branch state reached by
/// Kerr evolution at t = pi/(2 mu). Its exact norm is
/// 1 - Re(i <a|-a>) = 1 since <a|-a> = e^{-2|a|^2} is real.
inline FockVector cat_state(PhasePoint alpha0, std::size_t cutoff,
                            Truncation policy = Truncation::kStrict) {
  if (cutoff == 0) throw InvalidArgument("cutoff must be >= 1");
  const cplx a = alpha0.value();
  const auto plus = detail::coherent_recurrence(a, cutoff);
  const cplx w_plus = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4);
  const cplx w_minus = -std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4);
  std::vector<cplx> amps(cutoff);
  for (std::size_t n = 0; n < cutoff; ++n) {
    // <n|-a> = (-1)^n <n|a>
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    amps[n] = (w_plus + parity * w_minus) * plus[n];
  }
  FockVector v(std::move(amps));
  const cplx overlap = std::exp(-2.0 * std::norm(a));  // <a|-a>
  const double exact_norm = std::norm(w_plus) + std::norm(w_minus) +
                            2.0 * std::real(std::conj(w_plus) * w_minus * overlap);
  detail::check_truncation(v.norm_squared(), exact_norm, cutoff, policy, "cat_state");
  return v.normalized();
}

/// N x N Hermitian, unit-trace matrix in the number basis.
class DensityOperator {
 public:
  static constexpr double kHermiticityTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-10;

  /// Validates Hermiticity and unit trace.
  static DensityOperator from_matrix(Matrix m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw DimensionMismatch("density matrix must be square and non-empty");
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermiticityTolerance)
      throw InvalidArgument("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr_err = std::abs(m.trace() - cplx{1.0, 0.0});
    if (tr_err > kTraceTolerance)
      throw InvalidArgument("density matrix trace deviates from 1 by " + std::to_string(tr_err));
    return DensityOperator(std::move(m));
  }

  /// Adopts a matrix produced by a trusted evolution; only the shape is checked.
  static DensityOperator adopt(Matrix m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw DimensionMismatch("density matrix must be square and non-empty");
    return DensityOperator(std::move(m));
  }

  std::size_t cutoff() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
  const Matrix& matrix() const noexcept { return rho_; }
  cplx operator()(std::size_t m, std::size_t n) const {
    return rho_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  }

  double trace_error() const { return std::abs(rho_.trace() - cplx{1.0, 0.0}); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  explicit DensityOperator(Matrix m) : rho_(std::move(m)) {}
  Matrix rho_;
};

inline DensityOperator density_from_pure(const FockVector& psi) {
  const Eigen::VectorXcd v = psi.to_eigen();
  return DensityOperator::from_matrix(v * v.adjoint());
}

/// Equal-weight or weighted mixture of pure states.
inline DensityOperator mixture(std::span<const FockVector> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size())
    throw DimensionMismatch("mixture: states and weights must be non-empty and of equal length");
  const auto dim = static_cast<Eigen::Index>(states.front().cutoff());
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].cutoff() != states.front().cutoff()) throw DimensionMismatch("mixture: cutoffs differ");
    const Eigen::VectorXcd v = states[i].to_eigen();
    m += weights[i] * (v * v.adjoint());
  }
  return DensityOperator::from_matrix(std::move(m));
}

/// <n> = sum_m m rho_mm
inline double expectation_n(const DensityOperator& rho) {
  double s = 0.0;
  for (std::size_t m = 1; m < rho.cutoff(); ++m) s += static_cast<double>(m) * rho(m, m).real();
  return s;
}

/// Tr rho^2
inline double purity(const DensityOperator& rho) {
  // Tr(rho rho) = sum_{mn} rho_mn rho_nm = sum |rho_mn|^2 for Hermitian rho.
  return rho.matrix().cwiseAbs2().sum();
}

/// <psi|rho|psi>
inline double fidelity(const DensityOperator& rho, const FockVector& psi) {
  if (rho.cutoff() != psi.cutoff()) throw DimensionMismatch("fidelity: cutoffs differ");
  const Eigen::VectorXcd v = psi.to_eigen();
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

/// <beta|rho|gamma> against exact (untruncated) coherent probes. Only the
/// probe components inside rho's support contribute, so the result is exact
/// for the truncated rho at any probe amplitude.
inline cplx coherent_matrix_element(const DensityOperator& rho, PhasePoint bra, PhasePoint ket) {
  const auto n = rho.cutoff();
  const auto b = detail::coherent_amplitudes_exact(bra.value(), n);
  const auto k = detail::coherent_amplitudes_exact(ket.value(), n);
  const Eigen::Map<const Eigen::VectorXcd> vb(b.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXcd> vk(k.data(), static_cast<Eigen::Index>(n));
  return (vb.adjoint() * rho.matrix() * vk)(0, 0);
}

/// Q(alpha) = <alpha|rho|alpha>, no 1/pi factor: Q(alpha) = e^{-|alpha-a|^2}
/// for rho = |a><a|.
inline double husimi_q(const DensityOperator& rho, PhasePoint alpha) {
  return coherent_matrix_element(rho, alpha, alpha).real();
}

/// Wigner function through the displaced parity,
/// W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^dag] = (2/pi) sum_{mn} rho_mn (-1)^m <n|D(2 alpha)|m>.
inline double wigner(const DensityOperator& rho, PhasePoint alpha) {
  const std::size_t n = rho.cutoff();
  const auto d = detail::displacement_elements(2.0 * alpha.value(), n);
  cplx s{0.0, 0.0};
  for (std::size_t m = 0; m < n; ++m) {
    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
    cplx col{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) col += rho(m, k) * d[k * n + m];
    s += parity * col;
  }
  return 2.0 / std::numbers::pi * s.real();
}

}  // namespace kerrcat
