#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "kerrcat/analysis.hpp"
#include "oracles.hpp"

using namespace kerrcat;
using namespace kerrcat::analysis;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

DensityOperator branch_mixture(cplx a, std::size_t n) {
  const std::vector<FockVector> s{coherent_state(a, n), coherent_state(-a, n)};
  const std::vector<double> w{0.5, 0.5};
  return mixture(s, w);
}

}  // namespace

TEST_CASE("cat_fidelity", "[analysis]") {
  REQUIRE(cat_fidelity(density_from_pure(cat_state(2.0, 40)), 2.0) == Approx(1.0).margin(1e-12));

  SECTION("a single branch overlaps by one half") {
    const auto plus = oracle::coherent_bruteforce(2.0, 40);
    const auto minus = oracle::coherent_bruteforce(-2.0, 40);
    const cplx wp = std::polar(1.0, -pi / 4) / std::sqrt(2.0);
    const cplx wm = std::polar(1.0, pi / 4) / std::sqrt(2.0);
    cplx overlap{0.0, 0.0};
    for (std::size_t n = 0; n < 40; ++n) overlap += std::conj(wp * plus[n] - wm * minus[n]) * plus[n];
    const double f = cat_fidelity(density_from_pure(coherent_state(2.0, 40)), 2.0);
    REQUIRE(std::abs(f - std::norm(overlap)) < 1e-12);
    REQUIRE(f == Approx(0.5).margin(1e-6));
  }
  SECTION("global phase does not matter") {
    const auto c = cat_state(cplx{1.0, 1.5}, 40);
    std::vector<cplx> rotated(c.amplitudes().begin(), c.amplitudes().end());
    for (auto& x : rotated) x *= std::polar(1.0, 2.1);
    REQUIRE(cat_fidelity(density_from_pure(FockVector(rotated)), cplx{1.0, 1.5}) == Approx(1.0).margin(1e-12));
  }
  SECTION("Kerr evolution reaches the cat") {
    lindblad::EvolutionSpec spec;
    spec.sys = KerrSystem{2.0, 1.0, 0.0};
    spec.cutoff = 40;
    spec.t_final = spec.sys.t_cat();
    spec.sample_times = {spec.t_final};
    const auto recs = lindblad::evolve(spec, density_from_pure(coherent_state(2.0, 40)));
    REQUIRE(cat_fidelity(recs.back().rho, 2.0) >= 1.0 - 1e-10);
  }
  SECTION("range") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 20; ++i) {
      const auto rho = DensityOperator::from_matrix(oracle::random_density(12, rng));
      const double f = cat_fidelity(rho, 1.2);
      REQUIRE(f >= 0.0);
      REQUIRE(f <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("coherence_metric", "[analysis]") {
  REQUIRE(std::abs(coherence_metric(density_from_pure(cat_state(2.0, 40)), 2.0, 0.0, 0.01) - 1.0) < 1e-9);
  REQUIRE(coherence_metric(branch_mixture(2.0, 40), 2.0, 0.0, 0.01) < 1e-3);

  SECTION("branch relabeling symmetry") {
    for (cplx a : {cplx{2.0, 0.0}, cplx{0.7, -1.1}}) {
      const auto rho = density_from_pure(cat_state(a, 40));
      REQUIRE(coherence_metric(rho, a, 0.0, 0.0) == Approx(coherence_metric(rho, -a, 0.0, 0.0)).epsilon(1e-12));
      const auto mix = branch_mixture(a, 40);
      REQUIRE(std::abs(coherence_metric(mix, a, 0.3, 0.1) - coherence_metric(mix, -a, 0.3, 0.1)) < 1e-12);
    }
  }
  SECTION("short-time decay under pure damping") {
    const auto recs = decoherence_run(2.0, 0.01, 40);
    for (const auto& r : recs) {
      REQUIRE(r.coherence.has_value());
      REQUIRE(std::abs(std::log(*r.coherence) + 8.0 * (1.0 - std::exp(-0.01 * r.time))) < 1e-6);
    }
  }
  SECTION("vanishing branches are reported") {
    REQUIRE_THROWS_AS(coherence_metric(density_from_pure(number_state(5, 12)), 0.0, 0.0, 0.0), DegenerateBranches);
  }
}

TEST_CASE("fit_decoherence_time", "[analysis]") {
  SECTION("exact exponential") {
    std::vector<double> t, c;
    for (int i = 0; i < 50; ++i) {
      t.push_back(0.1 * i);
      c.push_back(std::exp(-t.back() / 1.7));
    }
    const auto fit = fit_decoherence_time(t, c);
    REQUIRE(std::abs(fit.time / 1.7 - 1.0) < 1e-6);
    REQUIRE(fit.rms_residual < 1e-12);
    REQUIRE(fit.crossed_one_over_e);
    REQUIRE(fit.points == 34);  // C reaches e^-2 at t = 3.4
  }
  SECTION("alpha0 = 2 gives about 1/(2 gamma |alpha0|^2)") {
    const auto fit = fit_decoherence_time(decoherence_run(2.0, 0.01, 40));
    REQUIRE(fit.time == Approx(12.5).epsilon(0.05));
  }
  SECTION("quartering |alpha0|^2 quadruples the time") {
    const double t1 = fit_decoherence_time(decoherence_run(1.0, 0.01, 30)).time;
    const double t2 = fit_decoherence_time(decoherence_run(2.0, 0.01, 40)).time;
    REQUIRE(t1 / t2 == Approx(4.0).epsilon(0.10));
  }
  SECTION("decay rate is linear in |alpha0|^2") {
    std::vector<double> x, y;
    for (double a : {1.0, 1.5, 2.0, 3.0}) {
      x.push_back(a * a);
      y.push_back(1.0 / fit_decoherence_time(decoherence_run(a, 0.01, auto_cutoff(a) + 10)).time);
    }
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    REQUIRE(sxy * sxy / (sxx * syy) >= 0.99);
  }
  SECTION("too few points or no decay") {
    const std::vector<double> t{0, 1, 2}, c{1, 0.9, 0.8};
    REQUIRE_THROWS_AS(fit_decoherence_time(t, c), InsufficientDecay);
    std::vector<double> tf{0, 1, 2, 3, 4, 5}, flat(6, 1.0);
    try {
      fit_decoherence_time(tf, flat);
      FAIL("expected InsufficientDecay");
    } catch (const InsufficientDecay& e) {
      REQUIRE(e.lower_bound() == 5.0);
    }
    REQUIRE_THROWS_AS(fit_decoherence_time(tf, t), DimensionMismatch);
  }
  SECTION("series and integrator agree on the fitted time") {
    // Sample at Kerr revivals where the branches are coherent states again.
    const KerrSystem sys{1.5, 1.0, 0.01};
    std::vector<double> times;
    for (int k = 0; k <= 6; ++k) times.push_back(2.0 * pi * k);
    lindblad::EvolutionSpec spec;
    spec.sys = sys;
    spec.cutoff = 30;
    spec.t_final = times.back();
    spec.sample_times = times;
    const auto recs = lindblad::evolve(spec, density_from_pure(cat_state(sys.alpha0, spec.cutoff)));
    std::vector<double> analytic;
    for (double t : times) analytic.push_back(analytic_coherence(sys, t));
    const double numeric_fit = fit_decoherence_time(recs).time;
    const double analytic_fit = fit_decoherence_time(times, analytic).time;
    REQUIRE(std::abs(numeric_fit / analytic_fit - 1.0) <= 0.02);
    REQUIRE(analytic_fit > 0.0);
  }
}

TEST_CASE("wigner_slice", "[analysis]") {
  SECTION("vacuum peaks at 2/pi") {
    const auto s = wigner_slice(density_from_pure(number_state(0, 6)), Axis::kReal, 3.0, 31);
    REQUIRE(s.size() == 31);
    REQUIRE(s[15].first == 0.0);
    REQUIRE(s[15].second == Approx(2.0 / pi).epsilon(1e-14));
  }
  SECTION("cat fringes against the dense oracle") {
    const auto rho = density_from_pure(cat_state(2.0, 30));
    const auto s = wigner_slice(rho, Axis::kImaginary, 1.5, 61);
    double biggest = 0.0;
    for (const auto& [y, w] : s) {
      REQUIRE(std::abs(w - oracle::wigner_dense(rho.matrix(), cplx{0.0, y})) < 1e-8);
      biggest = std::max(biggest, std::abs(w));
    }
    // Fringe maxima near y = pi/16 reach (2/pi) e^{-2 y^2}.
    REQUIRE(biggest > 0.92 * 2.0 / pi);
    REQUIRE(biggest <= 2.0 / pi);
    // The slice changes sign, so it carries fringes.
    bool negative = false;
    for (const auto& p : s) negative = negative || p.second < -0.1;
    REQUIRE(negative);
  }
  SECTION("branch mixture has no fringes") {
    const auto s = wigner_slice(branch_mixture(2.0, 40), Axis::kImaginary, 2.0, 21);
    for (const auto& [y, w] : s) {
      const double two_gauss = (1.0 / pi) * 2.0 * std::exp(-2.0 * (4.0 + y * y));
      REQUIRE(std::abs(w - two_gauss) < 1e-8);
    }
  }
  SECTION("single point and bad input") {
    REQUIRE(wigner_slice(density_from_pure(number_state(0, 3)), Axis::kReal, 1.0, 1).size() == 1);
    REQUIRE_THROWS_AS(wigner_slice(density_from_pure(number_state(0, 3)), Axis::kReal, 1.0, 0), InvalidArgument);
  }
}

TEST_CASE("cat_report", "[analysis]") {
  const KerrSystem sys{2.0, 1.0, 0.01};
  const auto rep = cat_report(sys, 40);
  REQUIRE(rep.t_cat == Approx(pi / 2));
  REQUIRE(rep.t_revival == Approx(2 * pi));
  REQUIRE(rep.fidelity_at_tcat > 0.8);
  REQUIRE(rep.fidelity_at_tcat <= 1.0 + 1e-9);
  REQUIRE(rep.coherence > 0.0);
  REQUIRE(rep.coherence <= 1.0 + 1e-9);
  REQUIRE(std::isfinite(rep.wigner_origin));
  REQUIRE(rep.t_dec_formula == Approx(25.0));
  REQUIRE(rep.t_dec_fitted == Approx(12.5).epsilon(0.05));

  const auto undamped = cat_report(KerrSystem{2.0, 1.0, 0.0}, 40);
  REQUIRE(std::isinf(undamped.t_dec_fitted));
  REQUIRE(undamped.fidelity_at_tcat >= 1.0 - 1e-10);
  REQUIRE_THROWS_AS(cat_report(KerrSystem{2.0, 0.0, 0.1}, 40), InvalidArgument);
}
