#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/model.hpp"
#include "test_helpers.hpp"

using namespace cqed;
using testutil::pi;

TEST_CASE("thermal occupation: zero temperature limit") {
  CHECK(thermal_occupation(2 * pi * 2.69e9, 0.0) == 0.0);
  CHECK(thermal_occupation(1.0, 0.0) == 0.0);
}

TEST_CASE("thermal occupation: frozen extended-precision values") {
  // 1/expm1(hbar*omega/kB*T) evaluated in long double
  const double w = 2 * pi * 2.69e9;
  CHECK(thermal_occupation(w, 293.0) ==
        doctest::Approx(2269.064870596932627).epsilon(1e-12));
  CHECK(thermal_occupation(w, 0.025) ==
        doctest::Approx(0.005751754902939408).epsilon(1e-12));
  // headline tolerance band
  CHECK(std::abs(thermal_occupation(w, 293.0) - 2269.1) < 0.5);
}

TEST_CASE("thermal occupation: argument validation") {
  CHECK_THROWS_AS(thermal_occupation(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal_occupation(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("thermal occupation: monotone in T and omega") {
  const double w0 = 2 * pi * 1e9;
  double prev = 0;
  for (double t : {0.01, 0.1, 1.0, 10.0, 100.0, 400.0}) {
    const double n = thermal_occupation(w0, t);
    CHECK(n > prev);
    prev = n;
  }
  prev = 1e300;
  for (double w : {w0, 2 * w0, 5 * w0, 20 * w0}) {
    const double n = thermal_occupation(w, 77.0);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("thermal occupation: Rayleigh-Jeans expansion for small x") {
  // for x = hbar w / kB T < 1e-3:  |n - (1/x - 1/2)| < 1e-3 n
  for (double t : {100.0, 293.0, 1000.0}) {
    const double w = 2 * pi * 1e8;  // x ~ 1e-6..1e-5 here
    const double x = constants::hbar * w / (constants::k_boltzmann * t);
    REQUIRE(x < 1e-3);
    const double n = thermal_occupation(w, t);
    CHECK(std::abs(n - (1.0 / x - 0.5)) < 1e-3 * n);
  }
}

TEST_CASE("complex detunings: resonant lossless case") {
  SystemParams p = testutil::fig3_params();
  p.kappa_c = 0;
  p.kappa_1 = 0;
  const auto det = complex_detunings(p, ThermalOccupancies::from_params(p));
  CHECK(det.delta_c_tilde == cplx(0.0, 0.0));
}

TEST_CASE("complex detunings: fig3 cavity half-width") {
  const SystemParams p = testutil::fig3_params();
  const auto det = complex_detunings(p, ThermalOccupancies::from_params(p));
  CHECK(det.delta_c_tilde.real() == 0.0);
  CHECK(det.delta_c_tilde.imag() == doctest::Approx(-2 * pi * 0.4e6).epsilon(1e-14));
}

TEST_CASE("complex detunings: frozen spin linewidth at eta=1e4") {
  const SystemParams p = testutil::fig3_params(1e4);
  const auto det = complex_detunings(p, ThermalOccupancies::from_params(p));
  CHECK(det.delta_s_tilde.imag() ==
        doctest::Approx(-1.634352063384076e7).epsilon(1e-12));
}

TEST_CASE("complex detunings: frame-shift invariance is exact") {
  // With exactly representable frequencies the detunings depend only on
  // differences, so a common shift must reproduce them bit for bit.
  SystemParams p = testutil::fig3_params(1e4);
  p.omega_c = 16901760000.0;
  p.omega_s = 16901761024.0;
  p.omega_d = 16901758976.0;
  const auto occ = ThermalOccupancies::from_params(p);
  const auto base = complex_detunings(p, occ);
  for (double shift : {1024.0, -4096.0, 1048576.0, 268435456.0}) {
    SystemParams q = p;
    q.omega_c += shift;
    q.omega_s += shift;
    q.omega_d += shift;
    const auto moved = complex_detunings(q, occ);
    CHECK(moved.delta_c_tilde.real() == base.delta_c_tilde.real());
    CHECK(moved.delta_c_tilde.imag() == base.delta_c_tilde.imag());
    CHECK(moved.delta_s_tilde.real() == base.delta_s_tilde.real());
    CHECK(moved.delta_s_tilde.imag() == base.delta_s_tilde.imag());
  }
}

TEST_CASE("system params validation") {
  SystemParams p = testutil::fig3_params();
  CHECK_NOTHROW(p.validate());

  SystemParams bad = p;
  bad.kappa_1 = 2 * bad.kappa_c;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.gamma_s = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.n_spins = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.temperature = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.omega_c = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("drive protocol") {
  DriveProtocol empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

  DriveProtocol zero{{{0.0, 1.0}}};
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);

  const auto p = DriveProtocol::pulse(3.0, 1e-6, 2e-6);
  CHECK_NOTHROW(p.validate());
  CHECK(p.total_duration() == doctest::Approx(3e-6));
  CHECK(p.amplitude_at(0.0) == 3.0);
  CHECK(p.amplitude_at(0.99e-6) == 3.0);
  CHECK(p.amplitude_at(1.5e-6) == 0.0);
  CHECK(p.amplitude_at(2.9e-6) == 0.0);
}

TEST_CASE("cumulant state construction invariants") {
  CumulantState s;
  CHECK_NOTHROW(s.validate_construction());

  s.v[slot::n] = cplx(2.0, 1e-3);
  CHECK_THROWS_AS(s.validate_construction(), std::invalid_argument);

  s = CumulantState{};
  s.v[slot::pe] = 1.2;
  CHECK_THROWS_AS(s.validate_construction(), std::invalid_argument);

  s = CumulantState{};
  s.v[slot::a] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(s.validate_construction(), std::invalid_argument);

  s = CumulantState{};
  s.v[slot::aa] = cplx(0.3, -0.7);  // complex slots may be complex
  CHECK_NOTHROW(s.validate_construction());
}

TEST_CASE("dicke coordinate bounds") {
  CHECK_NOTHROW(make_dicke(5.0, -5.0, 10.0));
  // absolute slack of 1 covers sqrt(J(J+1)) vs J on small ensembles
  CHECK_NOTHROW(make_dicke(1.41, 0.0, 2.0));
  CHECK_THROWS_AS(make_dicke(7.0, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_dicke(2.0, 3.5, 10.0), std::invalid_argument);
  // large-N tolerance scales with N
  CHECK_NOTHROW(make_dicke(5e11 + 1e5, 0.0, 1e12));
}

TEST_CASE("slot names cover the state") {
  const auto& names = slot_names();
  CHECK(names.size() == slot::count);
  for (const char* n : names) CHECK(n != nullptr);
}
