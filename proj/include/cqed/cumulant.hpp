#pragma once

#include "cqed/model.hpp"

// Closed second-order mean-field equations of the driven spin-ensemble /
// resonator system, written in the frame rotating at the drive frequency,
// plus the analytic steady-population and Dicke-coordinate formulas.
//
// Everything here is a pure function of its arguments and safe to call
// concurrently.

namespace cqed {

/// Time derivative of a CumulantState; same slot layout, units 1/s times
/// the slot's units.
struct StateDerivative {
  std::array<cplx, slot::count> v{};
};

/// Cached right-hand-side context. Precomputes detunings and thermal
/// occupancies once; eval() is the hot path used by the integrator.
class CumulantRhs {
 public:
  CumulantRhs(const SystemParams& params, const ThermalOccupancies& occ);
  explicit CumulantRhs(const SystemParams& params);

  /// dy/dt for the rotating-frame cumulant equations at drive amplitude
  /// omega_drive (sqrt(rad/s)); the rad/s drive strength is
  /// omega_drive*sqrt(kappa_1). y and dy point at slot::count entries.
  void eval(const cplx* y, double omega_drive, cplx* dy) const;

  void eval(const std::array<cplx, slot::count>& y, double omega_drive,
            std::array<cplx, slot::count>& dy) const {
    eval(y.data(), omega_drive, dy.data());
  }

  /// Per-slot sum of the magnitudes of every term entering eval(). Bounds
  /// the cancellation floor of the RHS: |eval()[k]| <= scale[k] always, and
  /// a residual below ~tol*scale[k] is indistinguishable from the noise a
  /// tol-accurate state carries.
  void eval_scale(const cplx* y, double omega_drive, double* scale) const;

  double pump_rate() const { return n_s_ * gamma_; }          // n_s gamma_s
  double population_decay() const { return gamma_pop_; }      // eta + gamma(1+2n_s)
  double n_c_th() const { return n_c_; }
  double n_s_th() const { return n_s_; }

 private:
  cplx dtc_;          // complex cavity detuning
  cplx dts_;          // complex spin detuning
  double kappa_;      // kappa_c
  double sqrt_k1_;    // sqrt(kappa_1)
  double g_;          // g_s
  double np_;         // N
  double n_c_, n_s_;  // thermal occupancies
  double gamma_;      // gamma_s
  double gamma_pop_;  // eta_s + gamma_s (1 + 2 n_s)
  double chi2_;       // 2 chi_s
};

/// Reference entry point matching the module contract; validates inputs.
/// Rejects non-finite states.
StateDerivative derivative(const CumulantState& state, const SystemParams& params,
                           double drive_amplitude);

/// Steady upper-state population of a single spin under thermal pumping and
/// optical cooling: p = n_s gamma_s / [eta_s + gamma_s (1 + 2 n_s)].
/// Throws when the denominator vanishes (undamped spin).
double single_spin_steady_population(const SystemParams& params,
                                     const ThermalOccupancies& occ);

/// (J, M) of an uncorrelated ensemble at upper population p:
///   M = (N/2)(2p - 1),   J(J+1) = (2p-1)^2 J0(J0+1) + 6 p (1-p) J0.
DickeCoordinates dicke_from_population(double p, double n_spins);

/// (J, M) from the cumulant state:
///   M = N(<pe> - 1/2),
///   J = sqrt(3N/4 + N(N-1)(<sp_sm> + <pe_pe> - <pe> + 1/4)).
/// A radicand negative by less than 1e-9*N^2 is clipped to zero; a more
/// negative one signals closure breakdown and throws.
DickeCoordinates dicke_from_cumulants(const CumulantState& state, double n_spins);

/// Equilibrium of the uncoupled dissipative dynamics: mean photon number at
/// n_c_th, upper population at p, spin-spin population correlation at p^2,
/// every other slot zero.
CumulantState thermal_equilibrium_state(const SystemParams& params,
                                        const ThermalOccupancies& occ);

}  // namespace cqed
