#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/cumulant.hpp"
#include "test_helpers.hpp"

using namespace cqed;
using testutil::pi;

namespace {

double max_abs(const StateDerivative& d) {
  double m = 0;
  for (const auto& z : d.v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("vacuum is stationary without drive or thermal excitation") {
  SystemParams p = testutil::fig3_params(1e4);
  p.temperature = 0.0;
  const CumulantState vac{};
  const auto d = derivative(vac, p, 0.0);
  CHECK(max_abs(d) == 0.0);
}

TEST_CASE("drive acts on the field amplitude first") {
  SystemParams p = testutil::fig3_params();
  p.temperature = 0.0;
  const double omega_drive = 2 * pi * 1e6;
  const auto d = derivative(CumulantState{}, p, omega_drive);
  const double w = omega_drive * std::sqrt(p.kappa_1);
  // d<a>/dt = -i W, i.e. conj of d<a^dag>/dt = +i W
  CHECK(d.v[slot::a].real() == 0.0);
  CHECK(d.v[slot::a].imag() == doctest::Approx(-w).epsilon(1e-14));
  // on the vacuum nothing else moves yet
  for (int k = 1; k < slot::count; ++k) CHECK(std::abs(d.v[k]) == 0.0);
}

TEST_CASE("derivative rejects junk input") {
  SystemParams p = testutil::fig3_params();
  CumulantState s;
  s.v[slot::aa] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(derivative(s, p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(derivative(CumulantState{}, p, std::nan("")), std::invalid_argument);
}

TEST_CASE("steady population: limits and frozen value") {
  SystemParams p = testutil::fig3_params();
  const auto occ = ThermalOccupancies::from_params(p);

  p.eta_s = 1e14;  // overwhelming cooling empties the upper state
  CHECK(single_spin_steady_population(p, occ) < 1e-9);

  p.eta_s = 0.0;  // infinite-temperature limit approaches 1/2 from below
  SystemParams hot = p;
  hot.temperature = 1e7;
  const auto occ_hot = ThermalOccupancies::from_params(hot);
  const double p_hot = single_spin_steady_population(hot, occ_hot);
  CHECK(p_hot < 0.5);
  CHECK(p_hot > 0.4999);

  p.eta_s = 1e4;
  CHECK(single_spin_steady_population(p, occ) ==
        doctest::Approx(0.154606500219704).epsilon(1e-12));

  SystemParams undamped = p;
  undamped.eta_s = 0.0;
  undamped.gamma_s = 0.0;
  CHECK_THROWS_AS(single_spin_steady_population(undamped, occ), std::invalid_argument);
}

TEST_CASE("steady population never inverts") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    SystemParams p = testutil::fig3_params();
    p.eta_s = std::pow(10.0, 6.0 * u(rng));
    p.gamma_s = std::pow(10.0, 3.0 * u(rng) - 1.0);
    p.temperature = 400.0 * u(rng) + 1e-3;
    const auto occ = ThermalOccupancies::from_params(p);
    const double pop = single_spin_steady_population(p, occ);
    CHECK(pop >= 0.0);
    CHECK(pop < 0.5);
  }
}

TEST_CASE("dicke from population: polarized corner") {
  const auto dc = dicke_from_population(0.0, 2.5e12);
  CHECK(dc.j == doctest::Approx(1.25e12).epsilon(1e-12));
  CHECK(dc.m == doctest::Approx(-1.25e12).epsilon(1e-14));
}

TEST_CASE("dicke from population: maximally mixed ensemble") {
  const double n = 1e6;
  const auto dc = dicke_from_population(0.5, n);
  CHECK(dc.m == 0.0);
  CHECK(std::abs(dc.j - std::sqrt(0.75 * n)) < 0.51);
}

TEST_CASE("dicke from population: strong-cooling fig3 point") {
  // p from the rate equation at eta_s = 1e6, then the corrected J(J+1) root
  const double p = 0.002228364064094;
  const auto dc = dicke_from_population(p, 2.5e12);
  CHECK(dc.j / 1.25e12 == doctest::Approx(0.995543271872).epsilon(1e-9));
}

TEST_CASE("dicke from cumulants: product states") {
  const double n = 2.5e12;
  CumulantState ground{};  // p = 0
  auto dc = dicke_from_cumulants(ground, n);
  CHECK(dc.j / (0.5 * n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dc.m == doctest::Approx(-0.5 * n));

  // uncorrelated state at population p
  for (double p : {0.05, 0.154606500219704, 0.3}) {
    CumulantState s;
    s.v[slot::pe] = p;
    s.v[slot::pe_pe] = p * p;
    dc = dicke_from_cumulants(s, n);
    const double expected =
        std::sqrt(0.75 * n + n * (n - 1.0) * (p - 0.5) * (p - 0.5));
    CHECK(dc.j == doctest::Approx(expected).epsilon(1e-12));
    CHECK(dc.m == doctest::Approx(n * (p - 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("population and cumulant routes agree to 2/N on product states") {
  for (double n : {10.0, 1e3, 1e6}) {
    for (double p : {0.0, 0.05, 0.155, 0.2}) {
      const auto from_pop = dicke_from_population(p, n);
      CumulantState s;
      s.v[slot::pe] = p;
      s.v[slot::pe_pe] = p * p;
      const auto from_cum = dicke_from_cumulants(s, n);
      CHECK(std::abs(from_pop.j - from_cum.j) <= 2.0 / n * from_cum.j);
      CHECK(from_pop.m == doctest::Approx(from_cum.m).epsilon(1e-12));
    }
  }
}

TEST_CASE("dicke from cumulants: radicand guard") {
  CumulantState s;
  s.v[slot::pe] = 0.5;
  s.v[slot::pe_pe] = 0.25;
  s.v[slot::sp_sm] = -1.0;  // wildly unphysical correlation
  CHECK_THROWS_AS(dicke_from_cumulants(s, 1e6), std::runtime_error);

  // a tiny negative radicand is round-off and clips to zero
  CumulantState tiny;
  const double n = 1e6;
  tiny.v[slot::pe] = 0.5;
  tiny.v[slot::pe_pe] = 0.25;
  tiny.v[slot::sp_sm] = -(0.75 / (n - 1.0)) - 1e-13;
  const auto dc = dicke_from_cumulants(tiny, n);
  CHECK(dc.j == 0.0);
}

TEST_CASE("thermal equilibrium state") {
  SystemParams cold = testutil::fig3_params();
  cold.temperature = 0.0;
  auto s = thermal_equilibrium_state(cold, ThermalOccupancies::from_params(cold));
  for (const auto& z : s.v) CHECK(std::abs(z) == 0.0);

  const SystemParams p = testutil::fig3_params();
  const auto occ = ThermalOccupancies::from_params(p);
  s = thermal_equilibrium_state(p, occ);
  CHECK(s.v[slot::n].real() == doctest::Approx(2269.064870596932627).epsilon(1e-12));
  CHECK(s.v[slot::pe].real() == doctest::Approx(0.499889846726463).epsilon(1e-10));
  CHECK(s.v[slot::pe_pe].real() ==
        doctest::Approx(0.499889846726463 * 0.499889846726463).epsilon(1e-10));

  // fixed point of the uncoupled dissipative dynamics
  SystemParams uncoupled = p;
  uncoupled.g_s = 0.0;
  const auto d = derivative(s, uncoupled, 0.0);
  const double scale = s.norm_inf();
  CHECK(max_abs(d) <= 1e-12 * scale * (uncoupled.kappa_c + uncoupled.eta_s +
                                       uncoupled.gamma_s + uncoupled.chi_s));
}

TEST_CASE("hermiticity of the real slots is structural") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testutil::random_state(rng);
    for (double eta : {0.0, 1e4}) {
      const SystemParams p = testutil::fig3_params(eta);
      const auto d = derivative(s, p, 2 * pi * 1e6);
      double scale = 1.0;
      for (const auto& z : d.v) scale = std::max(scale, std::abs(z));
      for (int k : {slot::pe, slot::n, slot::sp_sm, slot::pe_pe})
        CHECK(std::abs(d.v[k].imag()) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("drive-frame invariance is exact for representable shifts") {
  // Only frequency differences enter the rotating-frame equations. The
  // thermal occupancies do feel the absolute frequencies, so pin them and
  // check the rest is bitwise shift-invariant; at T = 0 the plain entry
  // point is itself invariant.
  std::mt19937_64 rng(3);
  const auto s = testutil::random_state(rng);
  SystemParams p = testutil::fig3_params(1e4);
  p.omega_c = 16901760000.0;
  p.omega_s = 16901762048.0;
  p.omega_d = 16901757952.0;

  const auto occ = ThermalOccupancies::from_params(p);
  StateDerivative base, moved;
  CumulantRhs(p, occ).eval(s.v, 2 * pi * 1e6, base.v);
  for (double shift : {2048.0, -8192.0, 16777216.0}) {
    SystemParams q = p;
    q.omega_c += shift;
    q.omega_s += shift;
    q.omega_d += shift;
    CumulantRhs(q, occ).eval(s.v, 2 * pi * 1e6, moved.v);
    for (int k = 0; k < slot::count; ++k) {
      CHECK(moved.v[k].real() == base.v[k].real());
      CHECK(moved.v[k].imag() == base.v[k].imag());
    }
  }

  SystemParams cold = p;
  cold.temperature = 0.0;
  const auto base_cold = derivative(s, cold, 2 * pi * 1e6);
  SystemParams cold_shift = cold;
  cold_shift.omega_c += 4096.0;
  cold_shift.omega_s += 4096.0;
  cold_shift.omega_d += 4096.0;
  const auto moved_cold = derivative(s, cold_shift, 2 * pi * 1e6);
  for (int k = 0; k < slot::count; ++k) {
    CHECK(moved_cold.v[k].real() == base_cold.v[k].real());
    CHECK(moved_cold.v[k].imag() == base_cold.v[k].imag());
  }
}
