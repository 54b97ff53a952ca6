#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "kerrcat/trap_params.hpp"

using namespace kerrcat;
using namespace kerrcat::trap;
using Catch::Approx;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 values typed out again so the tests do not share the table.
constexpr double e = 1.602176634e-19;
constexpr double m = 9.1093837015e-31;
constexpr double hbar = 1.054571817e-34;
constexpr double c = 299792458.0;
constexpr double kB = 1.380649e-23;

TrapConfig nominal() {
  TrapConfig cfg;
  cfg.magnetic_field = two_pi * 160e9 * m / e;
  cfg.electrode_potential = 10.0;
  cfg.trap_dimension = 3.3e-3;
  cfg.temperature = 4.0;
  cfg.gamma = 1.0;
  cfg.alpha0_override = cplx{2.0, 0.0};
  return cfg;
}

}  // namespace

TEST_CASE("cyclotron frequency near 160 GHz", "[trap]") {
  const double omega_c = cyclotron_angular_frequency(5.71);
  REQUIRE(omega_c / two_pi == Approx(1.598e11).epsilon(1e-3));
  REQUIRE(omega_c == Approx(e * 5.71 / m).epsilon(1e-15));
}

TEST_CASE("axial frequency near 64 MHz", "[trap]") {
  const double omega_z = axial_angular_frequency(10.0, 3.3e-3);
  REQUIRE(omega_z == Approx(4.0e8).epsilon(0.01));
  REQUIRE(omega_z / two_pi == Approx(64e6).epsilon(0.01));
  REQUIRE(omega_z * omega_z == Approx(e * 10.0 / (m * 3.3e-3 * 3.3e-3)).epsilon(1e-14));
}

TEST_CASE("anharmonicity and decoherence-time scales", "[trap]") {
  const auto p = derive(nominal());
  REQUIRE(p.mu == Approx(hbar * p.omega_c * p.omega_c / (2.0 * m * c * c)).epsilon(1e-14));
  REQUIRE(p.mu == Approx(650.9).margin(0.5));
  REQUIRE(p.ratio == Approx(650.9).margin(0.5));
  REQUIRE(p.ratio == p.mu / p.gamma);
  REQUIRE(p.t_cat * p.mu == Approx(std::numbers::pi / 2).epsilon(1e-15));
  REQUIRE(p.t_cat == Approx(2.41e-3).epsilon(2e-3));
  REQUIRE(p.t_revival == Approx(4.0 * p.t_cat).epsilon(1e-15));
  REQUIRE(p.t_dec == Approx(0.25).epsilon(1e-15));
}

TEST_CASE("thermal cyclotron shift", "[trap]") {
  const double omega_c = two_pi * 160e9;
  const double thermal = kB * 4.0 / (2.0 * m * c * c);
  const double quantum = hbar * omega_c / (2.0 * m * c * c);
  REQUIRE(thermal == Approx(3.37e-10).epsilon(2e-3));
  REQUIRE(quantum == Approx(6.47e-10).epsilon(2e-3));
  const double omega_M = thermal_cyclotron_frequency(omega_c, 4.0);
  const double shift = (omega_c - omega_M) / omega_c;
  REQUIRE(shift == Approx(9.8e-10).epsilon(0.01));
  REQUIRE(shift == Approx(thermal + quantum).epsilon(1e-5));
  SECTION("omega_M < omega_c for any T > 0") {
    for (double t : {1e-3, 0.1, 4.0, 300.0}) REQUIRE(thermal_cyclotron_frequency(omega_c, t) < omega_c);
  }
}

TEST_CASE("scale consistency", "[trap]") {
  auto base = nominal();
  const auto p = derive(base);
  auto twice_b = base;
  twice_b.magnetic_field *= 2.0;
  const auto pb = derive(twice_b);
  REQUIRE(pb.omega_c == Approx(2.0 * p.omega_c).epsilon(1e-15));
  REQUIRE(pb.mu == Approx(4.0 * p.mu).epsilon(1e-14));

  auto four_v = base;
  four_v.electrode_potential *= 4.0;
  REQUIRE(derive(four_v).omega_z == Approx(2.0 * p.omega_z).epsilon(1e-15));

  auto twice_d = base;
  twice_d.trap_dimension *= 2.0;
  REQUIRE(derive(twice_d).omega_z == Approx(0.5 * p.omega_z).epsilon(1e-15));
}

TEST_CASE("field round trip", "[trap]") {
  for (double f : {1e9, 160e9, 3e11}) {
    const double target = two_pi * f;
    const double back = cyclotron_angular_frequency(field_for_cyclotron(target));
    REQUIRE(std::abs(back - target) / target < 1e-12);
  }
}

TEST_CASE("outputs are finite and reproducible", "[trap]") {
  const auto a = derive(nominal());
  const auto b = derive(nominal());
  for (double v : {a.omega_c, a.omega_z, a.omega_M, a.omega_p, a.mu, a.k, a.t_cat, a.t_revival, a.t_dec, a.ratio})
    REQUIRE(std::isfinite(v));
  REQUIRE(a.omega_c > 0.0);
  REQUIRE(a.omega_z > 0.0);
  REQUIRE(a.omega_M > 0.0);
  REQUIRE(a.mu == b.mu);
  REQUIRE(a.omega_M == b.omega_M);
  REQUIRE(a.k == b.k);
}

TEST_CASE("pump frequency and detuning", "[trap]") {
  auto cfg = nominal();
  const auto p = derive(cfg);
  REQUIRE(p.omega_p == p.omega_M);
  REQUIRE(p.detuning == 0.0);

  cfg.detuning = 1e3;
  const auto pd = derive(cfg);
  REQUIRE(pd.omega_p == Approx(p.omega_M - 1e3).epsilon(1e-15));
  REQUIRE(pd.detuning == Approx(1e3).margin(1e-2));

  cfg.pump_frequency = 1e12;
  REQUIRE_THROWS_AS(derive(cfg), InvalidArgument);
}

TEST_CASE("no damping", "[trap]") {
  auto cfg = nominal();
  cfg.gamma = 0.0;
  const auto p = derive(cfg);
  REQUIRE(std::isinf(p.t_dec));
  REQUIRE(std::isinf(p.ratio));
}

TEST_CASE("invalid inputs", "[trap]") {
  auto bad = [](auto mutate) {
    auto cfg = nominal();
    mutate(cfg);
    return cfg;
  };
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.magnetic_field = 0.0; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.electrode_potential = -1.0; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.trap_dimension = 0.0; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.temperature = -1.0; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.gamma = -1.0; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.drive_duration = -1e-9; })), NonPositiveInput);
  REQUIRE_THROWS_AS(derive(bad([](TrapConfig& c) { c.magnetic_field = std::nan(""); })), NonPositiveInput);
  REQUIRE_NOTHROW(derive(bad([](TrapConfig& c) { c.temperature = 0.0; })));
}

TEST_CASE("kick amplitude", "[trap]") {
  auto cfg = nominal();
  cfg.alpha0_override.reset();
  cfg.drive_duration = 1e-10;

  SECTION("no field, no kick") {
    cfg.drive_amplitude = 0.0;
    REQUIRE(kick_amplitude(cfg) == cplx{0.0, 0.0});
  }
  SECTION("override wins") {
    cfg.drive_amplitude = 123.0;
    cfg.alpha0_override = cplx{3.0, 0.0};
    REQUIRE(kick_amplitude(cfg) == cplx{3.0, 0.0});
  }
  SECTION("linear in the field") {
    cfg.drive_amplitude = 0.05;
    const cplx a = kick_amplitude(cfg);
    cfg.drive_amplitude = 0.1;
    REQUIRE(std::abs(kick_amplitude(cfg)) == Approx(2.0 * std::abs(a)).epsilon(1e-15));
  }
  SECTION("SI coupling by hand") {
    cfg.drive_amplitude = 0.07;
    const double omega_c = e * cfg.magnetic_field / m;
    const double omega_M = omega_c * (1.0 - kB * 4.0 / (2 * m * c * c) - hbar * omega_c / (2 * m * c * c));
    const double k = e / omega_M * std::sqrt(omega_c / (2.0 * hbar * m));
    REQUIRE(kick_amplitude(cfg).real() == Approx(k * 0.07 * 1e-10).epsilon(1e-13));
    REQUIRE(kick_amplitude(cfg).imag() == 0.0);
  }
  SECTION("a long kick warns but does not fail") {
    cfg.drive_amplitude = 0.01;
    std::vector<std::string> warnings;
    cfg.drive_duration = 1e-12;
    kick_amplitude(cfg, &warnings);
    REQUIRE(warnings.empty());
    cfg.drive_duration = 1e-8;  // axial period is about 16 ns
    REQUIRE_NOTHROW(kick_amplitude(cfg, &warnings));
    REQUIRE(warnings.size() == 1);
    cfg.alpha0_override = cplx{1.0, 0.0};
    REQUIRE(derive(cfg).warnings.empty());
  }
}
