#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"
#include "fanotrap/trap.hpp"

using namespace fanotrap;
namespace k = fanotrap::constants;

namespace {

// High-power reference trap used for the frozen golden numbers below.
TrapConfig golden_trap() {
  TrapConfig t;
  t.laser_power = 0.5;
  t.wavelength = 1550e-9;
  t.waist_radius = 1.0e-6;
  t.rayleigh_length = 2.0e-6;
  t.particle_radius = 75e-9;
  t.particle_density = 1800.0;
  t.susceptibility = 0.9;
  t.nonlinearity = 0.0;
  return t;
}

NeedleConfig golden_needle() {
  NeedleConfig n;
  n.voltage = 1000.0;
  n.tip_radius = 100e-6;  // tip_distance stays at the 14 mm default
  return n;
}

constexpr double kQ48 = 48.0 * k::kElementaryCharge;

}  // namespace

TEST_CASE("geometry and scalar derived quantities match frozen references") {
  const TrapConfig t = golden_trap();
  CHECK(t.particle_volume() == doctest::Approx(1.767145867644e-21).epsilon(1e-11));
  CHECK(t.particle_mass() == doctest::Approx(3.180862561760e-18).epsilon(1e-11));
  CHECK(t.beam_cross_section() == doctest::Approx(k::kPi * 1e-12).epsilon(1e-12));
  CHECK(t.trap_frequency() == doctest::Approx(3.643088476443e5).epsilon(1e-11));
  CHECK(scattering_rate(t) == doctest::Approx(6.631211035637e12).epsilon(1e-11));
}

TEST_CASE("potential terms at 50 nm match frozen references") {
  const TrapConfig t = golden_trap();
  const NeedleConfig n = golden_needle();
  CHECK(u_opt(50e-9, t) == doctest::Approx(5.277088224815e-22).epsilon(1e-11));
  CHECK(u_scatt(50e-9, t) == doctest::Approx(-2.374366249937e-21).epsilon(1e-11));
  CHECK(n.charge() == doctest::Approx(1.112650055448e-11).epsilon(1e-11));
  CHECK(u_el(50e-9, n, kQ48) == doctest::Approx(1.387236688849e-22).epsilon(1e-11));
  // u_el is strictly linear in z.
  CHECK(u_el(-50e-9, n, kQ48) == doctest::Approx(-1.387236688849e-22).epsilon(1e-11));
  CHECK(u_el(100e-9, n, kQ48) == doctest::Approx(2.0 * 1.387236688849e-22).epsilon(1e-11));
}

TEST_CASE("recoil force at the origin pushes along +z with frozen magnitude") {
  const TrapConfig t = golden_trap();
  NeedleConfig n;  // grounded
  CHECK(total_force(0.0, t, n, 0.0) == doctest::Approx(4.749695640383e-14).epsilon(1e-11));
}

TEST_CASE("analytic force equals the numerical gradient of the potential") {
  TrapConfig t = golden_trap();
  t.nonlinearity = 5e3;  // exercise the quartic branch too
  const NeedleConfig n = golden_needle();
  const double h = 1e-12;
  for (double z : {-2e-7, -5e-8, 0.0, 3e-8, 1.2e-7, 4e-7}) {
    const double u_plus = u_opt(z + h, t) + u_scatt(z + h, t) + u_el(z + h, n, kQ48);
    const double u_minus = u_opt(z - h, t) + u_scatt(z - h, t) + u_el(z - h, n, kQ48);
    const double fd = -(u_plus - u_minus) / (2.0 * h);
    const double f = total_force(z, t, n, kQ48);
    CHECK(f == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("analytic stiffness equals minus the numerical force derivative") {
  TrapConfig t = golden_trap();
  t.nonlinearity = 5e3;
  const NeedleConfig n = golden_needle();
  const double h = 1e-11;
  for (double z : {-1.5e-7, 0.0, 6e-8, 2.5e-7}) {
    const double fd = -(total_force(z + h, t, n, kQ48) - total_force(z - h, t, n, kQ48)) / (2.0 * h);
    CHECK(total_stiffness(z, t) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("equilibrium: Newton root agrees with the linearized estimate") {
  const TrapConfig t = golden_trap();
  const NeedleConfig n = golden_needle();
  const double z_lin = linearized_equilibrium(t, n, kQ48);
  CHECK(z_lin == doctest::Approx(1.059355110263e-7).epsilon(1e-11));
  const double z0 = find_equilibrium(t, n, kQ48);
  CHECK(std::abs(total_force(z0, t, n, kQ48)) < 1e-24);
  CHECK(z0 == doctest::Approx(z_lin).epsilon(0.02));
}

TEST_CASE("harmonic frequency reduces to the bare trap frequency at z = 0") {
  const TrapConfig t = golden_trap();
  CHECK(harmonic_frequency(0.0, t) == doctest::Approx(t.trap_frequency()).epsilon(1e-12));
}

TEST_CASE("harmonic frequency throws when the quartic term dominates") {
  TrapConfig t = golden_trap();
  t.nonlinearity = 1e5;
  CHECK_THROWS_AS(harmonic_frequency(1e-6, t), ImaginaryFrequencyError);
}

TEST_CASE("frequency response coefficients match frozen references") {
  const TrapConfig t;      // stock low-power trap
  const NeedleConfig n;    // stock needle
  CHECK(t.trap_frequency() == doctest::Approx(7.680304868715e4).epsilon(1e-11));
  CHECK(mass_shift_coefficient(t) == doctest::Approx(1.184077737360e38).epsilon(1e-10));
  // Pushing the particle away from the tip lowers the recoil-tilt curvature.
  const double c = coulomb_shift_coefficient(t, n);
  CHECK(c < 0.0);
  CHECK(std::abs(c) == doctest::Approx(8.178517377393e30).epsilon(1e-10));
  // d omega / dV = C * q * dQ/dV for the stock sphere model at 48 e0.
  const double dq_dv = 4.0 * k::kPi * k::kVacuumPermittivity * n.tip_radius;
  CHECK(std::abs(c * kQ48 * dq_dv) == doctest::Approx(0.4815444298788).epsilon(1e-10));
}

TEST_CASE("linearized frequency model tracks the full static model to 1%") {
  // Strict contract domain: working point within 2% of the waist, no quartic.
  // The recoil tilt scales as r^3, so a light particle stays near the origin.
  TrapConfig t;
  t.particle_radius = 25e-9;
  const double m = t.particle_mass();
  const double q4 = 4.0 * k::kElementaryCharge;
  for (double v : {0.0, 10.0, 20.0}) {
    NeedleConfig n;
    n.voltage = v;
    const double z0 = find_equilibrium(t, n, q4);
    REQUIRE(std::abs(z0) <= 0.02 * t.waist_radius);
    const double w_lin = frequency_shift_model(t, n, q4, m);
    const double w_full = harmonic_frequency(z0, t);
    CHECK(w_lin == doctest::Approx(w_full).epsilon(0.01));
  }
  // The stock trap sits outside that domain (recoil tilt ~0.3 um) yet still
  // tracks to 1% over the instrument's everyday bias range.
  const TrapConfig stock;
  const double m_stock = stock.particle_mass();
  for (double v : {0.0, 250.0, 1000.0}) {
    NeedleConfig n;
    n.voltage = v;
    const double w_lin = frequency_shift_model(stock, n, kQ48, m_stock);
    const double w_full = harmonic_frequency(find_equilibrium(stock, n, kQ48), stock);
    CHECK(w_lin == doctest::Approx(w_full).epsilon(0.01));
  }
}

TEST_CASE("linearized frequency model decomposes into its three terms") {
  const TrapConfig t;
  NeedleConfig n;
  n.voltage = 1000.0;
  const double m = t.particle_mass();
  const double w = t.trap_frequency() + mass_shift_coefficient(t) * m * m +
                   coulomb_shift_coefficient(t, n) * kQ48 * n.charge();
  CHECK(frequency_shift_model(t, n, kQ48, m) == doctest::Approx(w).epsilon(1e-13));
}

TEST_CASE("needle charge model: scaling, calibration, override") {
  NeedleConfig n = golden_needle();
  const double q1 = n.charge();
  n.voltage = 2000.0;
  CHECK(n.charge() == doctest::Approx(2.0 * q1).epsilon(1e-12));
  n.charge_calibration = 0.5;
  CHECK(n.charge() == doctest::Approx(q1).epsilon(1e-12));
  n.needle_charge_override = 3.3e-12;
  CHECK(n.charge() == 3.3e-12);
}

TEST_CASE("config validation rejects unphysical inputs") {
  TrapConfig t = golden_trap();
  t.laser_power = -1.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = golden_trap();
  t.wavelength = 0.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = golden_trap();
  t.particle_radius = -5e-9;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t = golden_trap();
  t.particle_density = 0.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);

  NeedleConfig n;
  n.tip_distance = 0.0;
  CHECK_THROWS_AS(n.validate(), ValidationError);
  n = NeedleConfig{};
  n.tip_radius = -1e-6;
  CHECK_THROWS_AS(n.validate(), ValidationError);

  ParticleState s;
  s.charge = 0.5 * k::kElementaryCharge;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.charge = -3.0 * k::kElementaryCharge;
  CHECK_NOTHROW(s.validate());
}
