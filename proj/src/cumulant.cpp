#include "cqed/cumulant.hpp"

#include <cmath>
#include <stdexcept>

namespace cqed {

CumulantRhs::CumulantRhs(const SystemParams& p, const ThermalOccupancies& occ) {
  const auto det = complex_detunings(p, occ);
  dtc_ = det.delta_c_tilde;
  dts_ = det.delta_s_tilde;
  kappa_ = p.kappa_c;
  sqrt_k1_ = std::sqrt(p.kappa_1);
  g_ = p.g_s;
  np_ = p.n_spins;
  n_c_ = occ.n_c_th;
  n_s_ = occ.n_s_th;
  gamma_ = p.gamma_s;
  gamma_pop_ = p.eta_s + p.gamma_s * (1.0 + 2.0 * occ.n_s_th);
  chi2_ = 2.0 * p.chi_s;
}

CumulantRhs::CumulantRhs(const SystemParams& p)
    : CumulantRhs(p, ThermalOccupancies::from_params(p)) {}

void CumulantRhs::eval(const cplx* y, double omega_drive, cplx* dy) const {
  constexpr cplx I(0.0, 1.0);

  const cplx a = y[slot::a];        // <a>
  const cplx sm = y[slot::sm];      // <sigma^12>
  const cplx pe = y[slot::pe];      // <sigma^22>
  const cplx n = y[slot::n];        // <a^dag a>
  const cplx aa = y[slot::aa];      // <a a>
  const cplx adsm = y[slot::ad_sm];  // <a^dag sigma^12>
  const cplx adpe = y[slot::ad_pe];  // <a^dag sigma^22>
  const cplx a_sm = y[slot::a_sm];    // <a sigma^12>
  const cplx spsm = y[slot::sp_sm];  // <sigma_1^21 sigma_2^12>
  const cplx pesp = y[slot::pe_sp];  // <sigma_1^22 sigma_2^21>
  const cplx smsm = y[slot::sm_sm];  // <sigma_1^12 sigma_2^12>
  const cplx pepe = y[slot::pe_pe];  // <sigma_1^22 sigma_2^22>

  // Conjugate closures: every remaining expectation value is the conjugate
  // of a stored one.
  const cplx ad = std::conj(a);        // <a^dag>
  const cplx sp = std::conj(sm);       // <sigma^21>
  const cplx adad = std::conj(aa);     // <a^dag a^dag>
  const cplx a_sp = std::conj(adsm);   // <a sigma^21>
  const cplx a_pe = std::conj(adpe);   // <a sigma^22>
  const cplx ad_sp = std::conj(a_sm);   // <a^dag sigma^21>
  const cplx pesm = std::conj(pesp);   // <sigma_1^22 sigma_2^12>
  const cplx spsp = std::conj(smsm);   // <sigma_1^21 sigma_2^21>

  const double w = omega_drive * sqrt_k1_;  // drive strength, rad/s
  const double g = g_;
  const double np = np_;
  const cplx dtc = dtc_;
  const cplx dts = dts_;
  const cplx dtc_c = std::conj(dtc);
  const cplx dts_c = std::conj(dts);

  dy[slot::a] = -I * dtc * a - I * w - I * np * g * sm;

  dy[slot::sm] = -I * dts * sm - I * g * a + 2.0 * I * g * a_pe;

  dy[slot::pe] = n_s_ * gamma_ - gamma_pop_ * pe + I * g * (adsm - a_sp);

  dy[slot::n] = kappa_ * (n_c_ - n) + I * w * (a - ad) + I * np * g * (a_sp - adsm);

  dy[slot::aa] = -2.0 * I * dtc * aa - 2.0 * I * w * a - 2.0 * I * np * g * a_sm;

  dy[slot::ad_sm] = I * (dtc_c - dts) * adsm + I * w * sm +
                    I * g * (pe + (np - 1.0) * spsm) - I * g * n +
                    2.0 * I * g * (ad * a_pe + a * adpe + pe * n - 2.0 * ad * a * pe);

  dy[slot::ad_pe] = (I * dtc_c - gamma_pop_) * adpe + n_s_ * gamma_ * ad + I * w * pe +
                    I * g * (np - 1.0) * pesp +
                    I * g * (2.0 * ad * adsm + sm * adad - 2.0 * sm * ad * ad) -
                    I * g * (ad * a_sp + a * ad_sp + sp * n - 2.0 * ad * a * sp);

  dy[slot::a_sm] = -I * (dtc + dts) * a_sm - I * w * sm -
                   I * g * (aa + (np - 1.0) * smsm) +
                   2.0 * I * g * (pe * aa + 2.0 * a * a_pe - 2.0 * pe * a * a);

  dy[slot::sp_sm] = -(gamma_pop_ + chi2_) * spsm + I * g * (adsm - a_sp) -
                    2.0 * I * g * (ad * pesm + sm * adpe + pe * adsm - 2.0 * ad * sm * pe) +
                    2.0 * I * g * (a * pesp + sp * a_pe + pe * a_sp - 2.0 * a * sp * pe);

  dy[slot::pe_sp] = (I * dts_c - gamma_pop_) * pesp + n_s_ * gamma_ * sp +
                    I * g * (ad * spsm + sp * adsm + sm * ad_sp - 2.0 * ad * sp * sm) -
                    2.0 * I * g * (ad * pepe + 2.0 * pe * adpe - 2.0 * ad * pe * pe) -
                    I * g * (a * spsp + 2.0 * sp * a_sp - 2.0 * a * sp * sp) +
                    I * g * adpe;

  dy[slot::sm_sm] = -2.0 * I * dts * smsm - 2.0 * I * g * a_sm +
                    4.0 * I * g * (a * pesm + sm * a_pe + pe * a_sm - 2.0 * a * sm * pe);

  dy[slot::pe_pe] = -2.0 * gamma_pop_ * pepe + 2.0 * n_s_ * gamma_ * pe +
                    2.0 * I * g * (ad * pesm + sm * adpe + pe * adsm - 2.0 * ad * sm * pe -
                                   a * pesp - sp * a_pe - pe * a_sp + 2.0 * a * sp * pe);
}

void CumulantRhs::eval_scale(const cplx* y, double omega_drive, double* scale) const {
  const double a = std::abs(y[slot::a]);
  const double sm = std::abs(y[slot::sm]);
  const double pe = std::abs(y[slot::pe]);
  const double n = std::abs(y[slot::n]);
  const double aa = std::abs(y[slot::aa]);
  const double adsm = std::abs(y[slot::ad_sm]);
  const double adpe = std::abs(y[slot::ad_pe]);
  const double asm_ = std::abs(y[slot::a_sm]);
  const double spsm = std::abs(y[slot::sp_sm]);
  const double pesp = std::abs(y[slot::pe_sp]);
  const double smsm = std::abs(y[slot::sm_sm]);
  const double pepe = std::abs(y[slot::pe_pe]);

  const double w = std::abs(omega_drive) * sqrt_k1_;
  const double g = std::abs(g_);
  const double np = np_;
  const double dc = std::abs(dtc_);
  const double ds = std::abs(dts_);
  const double pump = n_s_ * gamma_;

  scale[slot::a] = dc * a + w + np * g * sm;
  scale[slot::sm] = ds * sm + g * a + 2 * g * adpe;
  scale[slot::pe] = pump + gamma_pop_ * pe + 2 * g * adsm;
  scale[slot::n] = kappa_ * (n_c_ + n) + 2 * w * a + 2 * np * g * adsm;
  scale[slot::aa] = 2 * dc * aa + 2 * w * a + 2 * np * g * asm_;
  scale[slot::ad_sm] = (dc + ds) * adsm + w * sm + g * (pe + (np - 1) * spsm) + g * n +
                       2 * g * (2 * a * adpe + pe * n + 2 * a * a * pe);
  scale[slot::ad_pe] = (dc + gamma_pop_) * adpe + pump * a + w * pe +
                       g * (np - 1) * pesp +
                       g * (2 * a * adsm + sm * aa + 2 * sm * a * a) +
                       g * (a * adsm + a * asm_ + sm * n + 2 * a * a * sm);
  scale[slot::a_sm] = (dc + ds) * asm_ + w * sm + g * (aa + (np - 1) * smsm) +
                      2 * g * (pe * aa + 2 * a * adpe + 2 * pe * a * a);
  scale[slot::sp_sm] = (gamma_pop_ + chi2_) * spsm + 2 * g * adsm +
                       4 * g * (a * pesp + sm * adpe + pe * adsm + 2 * a * sm * pe);
  scale[slot::pe_sp] = (ds + gamma_pop_) * pesp + pump * sm +
                       g * (a * spsm + sm * adsm + sm * asm_ + 2 * a * sm * sm) +
                       2 * g * (a * pepe + 2 * pe * adpe + 2 * a * pe * pe) +
                       g * (a * smsm + 2 * sm * asm_ + 2 * a * sm * sm) + g * adpe;
  scale[slot::sm_sm] = 2 * ds * smsm + 2 * g * asm_ +
                       4 * g * (a * pesp + sm * adpe + pe * asm_ + 2 * a * sm * pe);
  scale[slot::pe_pe] = 2 * gamma_pop_ * pepe + 2 * pump * pe +
                       4 * g * (a * pesp + sm * adpe + pe * adsm + 2 * a * sm * pe);
}

StateDerivative derivative(const CumulantState& state, const SystemParams& params,
                           double drive_amplitude) {
  params.validate();
  if (!state.finite())
    throw std::invalid_argument("derivative: non-finite cumulant state");
  if (!std::isfinite(drive_amplitude))
    throw std::invalid_argument("derivative: non-finite drive amplitude");
  CumulantRhs rhs(params);
  StateDerivative d;
  rhs.eval(state.v, drive_amplitude, d.v);
  return d;
}

double single_spin_steady_population(const SystemParams& params,
                                     const ThermalOccupancies& occ) {
  const double denom = params.eta_s + params.gamma_s * (1.0 + 2.0 * occ.n_s_th);
  if (!(denom > 0))
    throw std::invalid_argument(
        "single_spin_steady_population: undamped spin (eta_s and gamma_s both zero)");
  return occ.n_s_th * params.gamma_s / denom;
}

DickeCoordinates dicke_from_population(double p, double n_spins) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("dicke_from_population: p outside [0, 1]");
  const double j0 = 0.5 * n_spins;
  const double m = j0 * (2.0 * p - 1.0);
  const double rhs = (2.0 * p - 1.0) * (2.0 * p - 1.0) * j0 * (j0 + 1.0) +
                     6.0 * p * (1.0 - p) * j0;
  // non-negative root of J(J+1) = rhs
  const double j = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * rhs));
  return make_dicke(j, m, n_spins);
}

DickeCoordinates dicke_from_cumulants(const CumulantState& state, double n_spins) {
  const double pe = state.v[slot::pe].real();
  const double spsm = state.v[slot::sp_sm].real();
  const double pepe = state.v[slot::pe_pe].real();
  const double m = n_spins * (pe - 0.5);
  double radicand = 0.75 * n_spins +
                    n_spins * (n_spins - 1.0) * (spsm + pepe - pe + 0.25);
  if (radicand < 0) {
    if (radicand < -1e-9 * n_spins * n_spins)
      throw std::runtime_error("dicke_from_cumulants: strongly negative J^2 "
                               "(cumulant closure breakdown)");
    radicand = 0;
  }
  return make_dicke(std::sqrt(radicand), m, n_spins);
}

CumulantState thermal_equilibrium_state(const SystemParams& params,
                                        const ThermalOccupancies& occ) {
  const double p = single_spin_steady_population(params, occ);
  CumulantState s;
  s.v[slot::n] = occ.n_c_th;
  s.v[slot::pe] = p;
  s.v[slot::pe_pe] = p * p;
  s.validate_construction();
  return s;
}

}  // namespace cqed
