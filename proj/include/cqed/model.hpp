#pragma once

#include <array>
#include <complex>
#include <vector>

// Core data types of the spin-ensemble / microwave-resonator model.
//
// Unit convention: every frequency and rate held by these types is angular
// (rad/s).  Config files may carry plain-Hz values; the loader multiplies
// those by 2*pi before they reach this layer (see config.hpp).

namespace cqed {

using cplx = std::complex<double>;

/// All physical rates and frequencies of the model in one validated record.
/// The drive couples to the resonator with strength amplitude*sqrt(kappa_1);
/// kappa_1 is the part of kappa_c attributed to the input port.
struct SystemParams {
  double omega_c = 0;      // resonator frequency, rad/s
  double kappa_c = 0;      // total photon loss rate, rad/s
  double kappa_1 = 0;      // input-port loss rate, rad/s (<= kappa_c)
  double omega_s = 0;      // spin transition frequency, rad/s
  double gamma_s = 0;      // spin-lattice relaxation rate, rad/s
  double eta_s = 0;        // optical spin-cooling rate, rad/s
  double chi_s = 0;        // pure dephasing rate, rad/s
  double g_s = 0;          // single-spin coupling, rad/s
  double n_spins = 1;      // N, real-valued (ensembles of 2.5e12 spins etc.)
  double temperature = 0;  // K
  double omega_d = 0;      // drive frequency, rad/s

  double delta_c() const { return omega_c - omega_d; }
  double delta_s() const { return omega_s - omega_d; }

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;
};

/// Bose occupation 1/(exp(hbar*omega/kB*T) - 1); exactly 0 at T = 0.
/// Throws std::invalid_argument for omega <= 0 or T < 0.
double thermal_occupation(double omega, double temperature);

struct ThermalOccupancies {
  double n_c_th = 0;  // at omega_c
  double n_s_th = 0;  // at omega_s
  static ThermalOccupancies from_params(const SystemParams& p);
};

/// Complex detunings of the rotating frame:
///   delta_c_tilde = (omega_c - omega_d) - i*kappa_c/2
///   delta_s_tilde = (omega_s - omega_d) - i*[eta_s + (1+2 n_s)gamma_s + 2 chi_s]/2
struct ComplexDetunings {
  cplx delta_c_tilde;
  cplx delta_s_tilde;
};
ComplexDetunings complex_detunings(const SystemParams& p, const ThermalOccupancies& occ);

/// One piecewise-constant drive segment. Amplitude is in sqrt(rad/s), so
/// amplitude*sqrt(kappa_1) is the rad/s drive strength entering the
/// Hamiltonian. The drive frequency is fixed for a whole protocol and lives
/// in SystemParams::omega_d.
struct DriveSegment {
  double duration = 0;   // s, > 0
  double amplitude = 0;  // sqrt(rad/s)
};

struct DriveProtocol {
  std::vector<DriveSegment> segments;

  void validate() const;
  double total_duration() const;
  double amplitude_at(double t) const;

  static DriveProtocol constant(double amplitude, double duration);
  static DriveProtocol pulse(double amplitude, double t_pulse, double t_tail);
};

// Slot layout of the closed second-order cumulant state. Spin indices 1,2
// denote the two representative spins of the exchange-symmetric ensemble.
namespace slot {
inline constexpr int a = 0;       // <a>
inline constexpr int sm = 1;      // <sigma_1^12>
inline constexpr int pe = 2;      // <sigma_1^22>           (real)
inline constexpr int n = 3;       // <a^dag a>              (real)
inline constexpr int aa = 4;      // <a a>
inline constexpr int ad_sm = 5;   // <a^dag sigma_1^12>
inline constexpr int ad_pe = 6;   // <a^dag sigma_1^22>
inline constexpr int a_sm = 7;    // <a sigma_1^12>
inline constexpr int sp_sm = 8;   // <sigma_1^21 sigma_2^12> (real)
inline constexpr int pe_sp = 9;   // <sigma_1^22 sigma_2^21>
inline constexpr int sm_sm = 10;  // <sigma_1^12 sigma_2^12>
inline constexpr int pe_pe = 11;  // <sigma_1^22 sigma_2^22> (real)
inline constexpr int count = 12;
}  // namespace slot

/// Names matching the slot layout, for CSV headers and reports.
const std::array<const char*, slot::count>& slot_names();

/// The twelve complex first/second-order expectation values closed under
/// the second-order cumulant expansion. Slots pe, n, sp_sm, pe_pe are real
/// by hermiticity and spin-exchange symmetry.
struct CumulantState {
  std::array<cplx, slot::count> v{};

  /// max |Im| over the four real slots, divided by max(1, |v|_inf).
  double hermiticity_residue() const;
  double norm_inf() const;
  bool finite() const;

  /// Construction-time invariants: real slots real (residue <= tol),
  /// 0 <= Re pe <= 1, all entries finite. Throws on violation.
  void validate_construction(double tol = 1e-9) const;
};

/// Location of the ensemble in the Dicke (J, M) triangle.
struct DickeCoordinates {
  double j = 0;
  double m = 0;
};

/// Validates j <= N/2 + tol and |m| <= j + tol with tol = max(1, 1e-6*N);
/// the 1e-6*N term covers cumulant closure error on large ensembles, the
/// absolute 1 covers the sqrt(J(J+1)) vs J offset on small ones.
DickeCoordinates make_dicke(double j, double m, double n_spins);

}  // namespace cqed
