#include "cqed/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cqed/constants.hpp"

namespace cqed {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SystemParams: ") + what);
}

}  // namespace

void SystemParams::validate() const {
  for (double x : {omega_c, kappa_c, kappa_1, omega_s, gamma_s, eta_s, chi_s,
                   g_s, n_spins, temperature, omega_d}) {
    require(std::isfinite(x), "non-finite field");
  }
  require(omega_c > 0, "omega_c must be > 0");
  require(omega_s > 0, "omega_s must be > 0");
  require(kappa_c >= 0 && kappa_1 >= 0 && gamma_s >= 0 && eta_s >= 0 && chi_s >= 0,
          "rates must be >= 0");
  require(kappa_1 <= kappa_c, "kappa_1 must not exceed kappa_c");
  require(n_spins >= 1, "n_spins must be >= 1");
  require(temperature >= 0, "temperature must be >= 0");
  require(std::isfinite(delta_c()) && std::isfinite(delta_s()),
          "detunings must be finite");
}

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0)) throw std::invalid_argument("thermal_occupation: omega must be > 0");
  if (temperature < 0) throw std::invalid_argument("thermal_occupation: T must be >= 0");
  if (temperature == 0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
  // expm1 keeps full precision for x << 1 and overflows cleanly to +inf.
  const double d = std::expm1(x);
  return std::isinf(d) ? 0.0 : 1.0 / d;
}

ThermalOccupancies ThermalOccupancies::from_params(const SystemParams& p) {
  return {thermal_occupation(p.omega_c, p.temperature),
          thermal_occupation(p.omega_s, p.temperature)};
}

ComplexDetunings complex_detunings(const SystemParams& p, const ThermalOccupancies& occ) {
  const double spin_width = p.eta_s + (1.0 + 2.0 * occ.n_s_th) * p.gamma_s + 2.0 * p.chi_s;
  return {cplx(p.delta_c(), -0.5 * p.kappa_c), cplx(p.delta_s(), -0.5 * spin_width)};
}

void DriveProtocol::validate() const {
  if (segments.empty()) throw std::invalid_argument("DriveProtocol: no segments");
  double total = 0;
  for (const auto& s : segments) {
    if (!(s.duration > 0) || !std::isfinite(s.duration))
      throw std::invalid_argument("DriveProtocol: segment durations must be > 0 and finite");
    if (!std::isfinite(s.amplitude))
      throw std::invalid_argument("DriveProtocol: non-finite amplitude");
    total += s.duration;
  }
  if (!std::isfinite(total)) throw std::invalid_argument("DriveProtocol: infinite total duration");
}

double DriveProtocol::total_duration() const {
  double total = 0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double DriveProtocol::amplitude_at(double t) const {
  double edge = 0;
  for (const auto& s : segments) {
    edge += s.duration;
    if (t < edge) return s.amplitude;
  }
  return segments.back().amplitude;
}

DriveProtocol DriveProtocol::constant(double amplitude, double duration) {
  return {{{duration, amplitude}}};
}

DriveProtocol DriveProtocol::pulse(double amplitude, double t_pulse, double t_tail) {
  return {{{t_pulse, amplitude}, {t_tail, 0.0}}};
}

const std::array<const char*, slot::count>& slot_names() {
  static const std::array<const char*, slot::count> names = {
      "a", "sm", "pe", "n", "aa", "ad_sm", "ad_pe", "a_sm",
      "sp_sm", "pe_sp", "sm_sm", "pe_pe"};
  return names;
}

double CumulantState::norm_inf() const {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

bool CumulantState::finite() const {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double CumulantState::hermiticity_residue() const {
  const double scale = std::max(1.0, norm_inf());
  double r = 0;
  for (int k : {slot::pe, slot::n, slot::sp_sm, slot::pe_pe})
    r = std::max(r, std::abs(v[k].imag()));
  return r / scale;
}

void CumulantState::validate_construction(double tol) const {
  if (!finite()) throw std::invalid_argument("CumulantState: non-finite entry");
  if (hermiticity_residue() > tol)
    throw std::invalid_argument("CumulantState: real slots carry imaginary parts");
  const double pe = v[slot::pe].real();
  if (pe < -tol || pe > 1.0 + tol)
    throw std::invalid_argument("CumulantState: upper population outside [0, 1]");
}

DickeCoordinates make_dicke(double j, double m, double n_spins) {
  const double tol = std::max(1.0, 1e-6 * n_spins);
  if (!(j >= -tol) || j > 0.5 * n_spins + tol)
    throw std::invalid_argument("DickeCoordinates: j outside [0, N/2]");
  if (std::abs(m) > j + tol)
    throw std::invalid_argument("DickeCoordinates: |m| exceeds j");
  return {j, m};
}

}  // namespace cqed
