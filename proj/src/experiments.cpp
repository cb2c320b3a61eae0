#include "cqed/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cqed/cumulant.hpp"

namespace cqed {

namespace {

using std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  auto v = linspace(std::log10(a), std::log10(b), n);
  for (auto& x : v) x = std::pow(10.0, x);
  return v;
}

double population_decay_rate(const SystemParams& p) {
  const auto occ = ThermalOccupancies::from_params(p);
  return p.eta_s + p.gamma_s * (1.0 + 2.0 * occ.n_s_th);
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::dicke_map: return "dicke-map";
    case ExperimentKind::rabi_transient: return "rabi-transient";
    case ExperimentKind::rabi_spectrum: return "rabi-spectrum";
    case ExperimentKind::superradiance: return "superradiance";
    case ExperimentKind::sense: return "sense";
    case ExperimentKind::oracle_check: return "oracle-check";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::dicke_map, ExperimentKind::rabi_transient,
        ExperimentKind::rabi_spectrum, ExperimentKind::superradiance,
        ExperimentKind::sense, ExperimentKind::oracle_check}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

SystemParams preset_fig3() {
  SystemParams p;
  p.omega_c = 2 * pi * 2.69e9;
  p.kappa_c = 2 * pi * 0.8e6;
  p.kappa_1 = 0.5 * p.kappa_c;
  p.omega_s = p.omega_c;
  p.gamma_s = 2 * pi * 0.157;
  p.eta_s = 0.0;
  p.chi_s = 2 * pi * 2.6e6;
  p.g_s = 2 * pi * 12.0;
  p.n_spins = 2.5e12;
  p.temperature = 293.0;
  p.omega_d = p.omega_c;
  return p;
}

SystemParams preset_fig4() {
  SystemParams p;
  p.omega_c = 2 * pi * 3.18e9;
  p.kappa_c = 2 * pi * 13.8e6;
  p.kappa_1 = 0.5 * p.kappa_c;
  p.omega_s = p.omega_c;
  p.gamma_s = 2 * pi * 0.157;
  p.eta_s = 1e4;
  p.chi_s = 2 * pi * 4.7e6;
  p.g_s = 2 * pi * 83.1e-3;
  p.n_spins = 1.5e16;
  p.temperature = 293.0;
  p.omega_d = p.omega_c;
  return p;
}

SystemParams preset_oracle_check() {
  SystemParams p;
  p.omega_c = 2 * pi * 2.69e9;
  p.kappa_c = 2 * pi * 0.8e6;
  p.kappa_1 = 0.5 * p.kappa_c;
  p.omega_s = p.omega_c;
  p.gamma_s = 2 * pi * 0.02e6;
  p.eta_s = 3e5;
  p.chi_s = 2 * pi * 0.05e6;
  p.g_s = 2 * pi * 0.08e6;
  p.n_spins = 2;
  p.temperature = 0.04;
  p.omega_d = p.omega_c;
  return p;
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.params = preset_fig3();
  s.preset = "fig3";
  s.integ.rel_tol = 1e-8;
  s.integ.abs_tol = 1e-10;
  s.steady.rel_tol = 1e-6;
  s.steady.integ.rel_tol = 1e-8;
  s.steady.integ.abs_tol = 1e-12;

  switch (kind) {
    case ExperimentKind::dicke_map:
      s.map_temperatures = logspace(1e-3, 293.0, 25);
      s.map_etas = logspace(1e2, 1e6, 25);
      s.map_etas.insert(s.map_etas.begin(), 0.0);
      break;
    case ExperimentKind::rabi_transient:
      s.pulse_amplitude = 2 * pi * 1e8;
      s.pulse_duration = 1e-6;
      s.tail_duration = 2e-6;
      s.eta_values = {0.0, 5e2, 1e3, 1e4};
      break;
    case ExperimentKind::rabi_spectrum:
      s.drive_amplitude = 2 * pi * 1e6;
      s.sweep_span = 2 * pi * 40e6;
      s.sweep_points = 201;
      s.eta_values = {0.0, 1e2, 1e3, 1e4};
      break;
    case ExperimentKind::superradiance:
      s.params = preset_fig4();
      s.preset = "fig4";
      s.pulse_amplitude = 2 * pi * 17e10;
      s.pulse_duration = 28e-9;
      s.eta_values = {1e4, 2.5e4, 1e6};
      break;
    case ExperimentKind::sense:
      // total drive strength amplitude*sqrt(kappa_1) = 2pi*5e7 rad/s; the
      // stronger literal reading saturates the ensemble and erases the
      // Rabi splitting this experiment measures
      s.drive_amplitude = 2 * pi * 5e7 / std::sqrt(0.5 * 2 * pi * 0.8e6);
      s.eta_values = {1e4};
      s.sweep_span = 2 * pi * 40e6;
      s.sweep_points = 201;
      s.spin_detunings = {-2 * pi * 2e6, 0.0, 2 * pi * 2e6};
      s.drive_offsets = {-2 * pi * 1.59e6, 0.0, 2 * pi * 1.59e6};
      s.sense_span_b = 2 * pi * 200e6;
      s.sense_points_b = 201;
      break;
    case ExperimentKind::oracle_check:
      s.params = preset_oracle_check();
      s.preset = "oracle-check";
      s.drive_amplitude = 2 * pi * 45.0;
      s.oracle_spin_counts = {1, 2, 3};
      s.integ.rel_tol = 1e-9;
      s.integ.abs_tol = 1e-12;
      break;
  }
  return s;
}

// ------------------------------------------------------------------ helpers

namespace {

// One warm-started steady-state chain over a frequency grid. mutate(params,
// omega) places the swept coordinate.
template <class Mutate>
std::vector<SweepPointResult> sweep_chain(const SystemParams& base,
                                          std::span<const double> omegas,
                                          double drive_amplitude,
                                          const SteadyStateConfig& ss, bool use_newton,
                                          Mutate&& mutate,
                                          std::vector<CumulantState>* states = nullptr) {
  std::vector<SweepPointResult> out(omegas.size());
  if (states) states->resize(omegas.size());
  SystemParams p = base;
  mutate(p, omegas.empty() ? 0.0 : omegas[0]);
  CumulantState state = thermal_equilibrium_state(p, ThermalOccupancies::from_params(p));
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    mutate(p, omegas[i]);
    SteadyStateResult res;
    bool solved = false;
    if (use_newton && i > 0) {
      res = steady_state_newton(state, p, drive_amplitude, ss);
      solved = res.converged;
    }
    if (!solved) res = steady_state(state, p, drive_amplitude, ss);
    out[i].omega = omegas[i];
    out[i].photon_number = res.state.v[slot::n].real();
    out[i].converged = res.converged;
    out[i].elapsed_model_time = res.elapsed_model_time;
    out[i].residual_norm = res.residual_norm;
    state = res.state;  // warm start for the neighbour
    if (states) (*states)[i] = res.state;
  }
  return out;
}

std::vector<SweepPoint> to_sweep(const std::vector<SweepPointResult>& pts) {
  std::vector<SweepPoint> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = {pts[i].omega, pts[i].photon_number};
  return v;
}

struct OscillationMetrics {
  double freq = 0;
  double modulation = 0;
  bool oscillating = false;
  double mean_j = 0;
};

// Modulation = deepest excursion below the running maximum (zero for a
// monotone envelope, the Rabi amplitude otherwise). Frequency from upward
// zero crossings of the moving-average residual, which survive the strong
// damping of the slow beats.
OscillationMetrics extract_oscillation(const Trajectory& traj, double t_lo,
                                       double t_hi) {
  OscillationMetrics m;
  std::vector<double> t, n, j;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < t_lo || traj.times[i] > t_hi) continue;
    t.push_back(traj.times[i]);
    n.push_back(traj.states[i].v[slot::n].real());
    j.push_back(traj.dicke[i].j);
  }
  const int sz = static_cast<int>(n.size());
  if (sz < 16) return m;
  m.mean_j = 0;
  for (double x : j) m.mean_j += x;
  m.mean_j /= static_cast<double>(j.size());

  double n_peak = 0;
  for (double x : n) n_peak = std::max(n_peak, x);
  if (n_peak <= 0) return m;

  double run_max = n[0], depth = 0;
  for (int i = 1; i < sz; ++i) {
    run_max = std::max(run_max, n[i]);
    depth = std::max(depth, run_max - n[i]);
  }
  m.modulation = depth / n_peak;

  const double dt = (t.back() - t.front()) / static_cast<double>(sz - 1);
  const int half = std::max(2, static_cast<int>((t_hi - t_lo) / 8.0 / dt));
  std::vector<double> resid(sz);
  for (int i = 0; i < sz; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(sz - 1, i + half);
    double avg = 0;
    for (int k = lo; k <= hi; ++k) avg += n[k];
    avg /= (hi - lo + 1);
    resid[i] = n[i] - avg;
  }
  double r_max = 0;
  for (double r : resid) r_max = std::max(r_max, std::abs(r));
  const double floor = 0.02 * r_max;

  // upward crossings with hysteresis
  std::vector<double> crossings;
  bool armed = false;
  for (int i = 0; i < sz; ++i) {
    if (resid[i] < -floor) armed = true;
    if (armed && resid[i] > floor) {
      crossings.push_back(t[i]);
      armed = false;
    }
  }
  if (crossings.size() >= 2 && m.modulation > 0.05) {
    const double period = (crossings.back() - crossings.front()) /
                          static_cast<double>(crossings.size() - 1);
    if (period > 0) {
      m.freq = 2 * pi / period;
      m.oscillating = true;
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------- dicke map

DickeMapReport run_dicke_map(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  DickeMapReport rep;

  auto eval = [&](double temperature, double eta) {
    SystemParams p = spec.params;
    p.temperature = temperature;
    p.eta_s = eta;
    const auto occ = ThermalOccupancies::from_params(p);
    const double pop = single_spin_steady_population(p, occ);
    const auto dc = dicke_from_population(pop, p.n_spins);
    return DickeMapPoint{temperature, eta, pop, dc.j, dc.m, dc.j / (0.5 * p.n_spins)};
  };

  rep.temperature_scan.resize(spec.map_temperatures.size());
  for (std::size_t i = 0; i < spec.map_temperatures.size(); ++i)
    rep.temperature_scan[i] = eval(spec.map_temperatures[i], 0.0);
  rep.eta_scan.resize(spec.map_etas.size());
  for (std::size_t i = 0; i < spec.map_etas.size(); ++i)
    rep.eta_scan[i] = eval(spec.params.temperature, spec.map_etas[i]);

  rep.diag.total_points =
      static_cast<int>(rep.temperature_scan.size() + rep.eta_scan.size());
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

// ----------------------------------------------------------- rabi transient

RabiTransientReport run_rabi_transient(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  RabiTransientReport rep;
  rep.curves.resize(spec.eta_values.size());
  const int n_curves = static_cast<int>(spec.eta_values.size());
  std::vector<std::string> errors(n_curves);

#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
  for (int c = 0; c < n_curves; ++c) {
    try {
      SystemParams p = spec.params;
      p.eta_s = spec.eta_values[c];
      const auto occ = ThermalOccupancies::from_params(p);
      const auto init = thermal_equilibrium_state(p, occ);
      const auto protocol = DriveProtocol::pulse(spec.pulse_amplitude,
                                                 spec.pulse_duration, spec.tail_duration);
      const auto grid =
          linspace(0.0, protocol.total_duration(), spec.transient_samples);
      TransientCurve curve;
      curve.eta_s = spec.eta_values[c];
      curve.traj = integrate(init, p, protocol, spec.integ, grid);
      const auto osc = extract_oscillation(curve.traj, 0.3 * spec.pulse_duration,
                                           spec.pulse_duration);
      curve.oscillation_freq = osc.freq;
      curve.envelope_modulation = osc.modulation;
      curve.oscillating = osc.oscillating;
      curve.predicted_freq = std::sqrt(2.0 * std::max(osc.mean_j, 0.0)) * p.g_s;
      rep.curves[c] = std::move(curve);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }

  for (int c = 0; c < n_curves; ++c) {
    if (!errors[c].empty())
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) + ": " +
                                errors[c]);
    else if (!rep.curves[c].traj.ok())
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) + ": " +
                                rep.curves[c].traj.error);
  }
  rep.diag.total_points = n_curves;
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

// ------------------------------------------------------------ rabi spectrum

namespace {

SpectrumCurve spectrum_chain(const ExperimentSpec& spec, double eta) {
  SystemParams base = spec.params;
  base.eta_s = eta;
  const auto omegas = linspace(base.omega_c - spec.sweep_span,
                               base.omega_c + spec.sweep_span, spec.sweep_points);
  std::vector<CumulantState> states;
  SpectrumCurve curve;
  curve.eta_s = eta;
  curve.points = sweep_chain(
      base, omegas, spec.drive_amplitude, spec.steady, spec.use_newton,
      [](SystemParams& p, double w) { p.omega_d = w; }, &states);

  for (const auto& pt : curve.points)
    if (!pt.converged) ++curve.nonconverged;

  // J of the converged resonant point, for the hybrid-mode prediction
  const std::size_t center = omegas.size() / 2;
  try {
    curve.j_center = dicke_from_cumulants(states[center], base.n_spins).j;
  } catch (const std::exception&) {
    curve.j_center = 0;
  }
  curve.prediction =
      hybrid_mode_frequencies(base.omega_s, base.omega_c, base.g_s, curve.j_center);
  curve.peaks = find_peaks(to_sweep(curve.points));
  if (curve.peaks.peaks.size() == 2)
    curve.measured_splitting = curve.peaks.peaks[1].omega - curve.peaks.peaks[0].omega;
  return curve;
}

}  // namespace

std::vector<SweepPointResult> sweep_drive_frequencies(const SystemParams& base,
                                                      std::span<const double> omega_d,
                                                      double drive_amplitude,
                                                      const SteadyStateConfig& steady,
                                                      bool use_newton) {
  return sweep_chain(base, omega_d, drive_amplitude, steady, use_newton,
                     [](SystemParams& p, double w) { p.omega_d = w; });
}

RabiSpectrumReport run_rabi_spectrum(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  RabiSpectrumReport rep;
  const int n_curves = static_cast<int>(spec.eta_values.size());
  rep.curves.resize(n_curves);
  std::vector<std::string> errors(n_curves);

#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
  for (int c = 0; c < n_curves; ++c) {
    try {
      rep.curves[c] = spectrum_chain(spec, spec.eta_values[c]);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }

  for (int c = 0; c < n_curves; ++c) {
    if (!errors[c].empty())
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) + ": " +
                                errors[c]);
    rep.diag.nonconverged_points += rep.curves[c].nonconverged;
    rep.diag.total_points += static_cast<int>(rep.curves[c].points.size());
  }
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

// ------------------------------------------------------------ superradiance

namespace {

SuperradianceCurve superradiance_curve(const ExperimentSpec& spec, double eta) {
  SystemParams p = spec.params;
  p.eta_s = eta;
  const auto occ = ThermalOccupancies::from_params(p);
  const double gamma_pop = population_decay_rate(p);
  const double t_off = spec.pulse_duration;
  const double t_end = std::max(t_off + 14.0 / gamma_pop, 6e-6);
  const double t_dense = std::min(3e-6, t_end);

  auto grid = linspace(0.0, t_dense, 3001);
  if (t_end > t_dense) {
    const auto tail = linspace(t_dense, t_end, 2001);
    grid.insert(grid.end(), tail.begin() + 1, tail.end());
  }

  const auto init = thermal_equilibrium_state(p, occ);
  const auto protocol = DriveProtocol::pulse(spec.pulse_amplitude, t_off, t_end - t_off);

  SuperradianceCurve curve;
  curve.eta_s = eta;
  curve.traj = integrate(init, p, protocol, spec.integ, grid);
  const auto& traj = curve.traj;

  const double p_eq = single_spin_steady_population(p, occ);
  curve.j_equilibrium = dicke_from_population(p_eq, p.n_spins).j;

  // Burst metrics on the excess over the bare pump decay, past the coherent
  // switch-off transient (the raw trace is pump residue + emission, and the
  // split-mode beating right after switch-off swings the excess negative).
  std::size_t i_off = 0;
  while (i_off + 1 < traj.times.size() && traj.times[i_off] < t_off) ++i_off;
  const double n_off = traj.states[i_off].v[slot::n].real();
  const double t_transient = t_off + 5.0 / p.kappa_c;

  auto excess = [&](std::size_t i) {
    const double decay = n_off * std::exp(-p.kappa_c * (traj.times[i] - t_off));
    return traj.states[i].v[slot::n].real() - decay;
  };

  double peak = 0;
  for (std::size_t i = i_off; i < traj.times.size(); ++i) {
    if (traj.times[i] < t_transient) continue;
    peak = std::max(peak, excess(i));
  }
  curve.peak_photon_number = peak;

  std::size_t i_end = traj.times.size() - 1;
  for (std::size_t i = traj.times.size(); i-- > 0;) {
    if (traj.times[i] < t_transient) break;
    if (excess(i) >= 0.01 * peak) {
      i_end = i;
      break;
    }
  }
  curve.pulse_end_time = traj.times[i_end];

  // end of the superradiant phase = minimum of J(t) after switch-off
  std::size_t i_jmin = i_off;
  double j_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = i_off; i < traj.times.size(); ++i) {
    if (std::isnan(traj.dicke[i].j)) continue;
    if (traj.dicke[i].j < j_min) {
      j_min = traj.dicke[i].j;
      i_jmin = i;
    }
  }
  curve.phase_end_time = traj.times[i_jmin];
  curve.plateau_population = traj.states[i_jmin].v[slot::pe].real();

  curve.recool_time = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = i_jmin; i < traj.times.size(); ++i) {
    if (traj.dicke[i].j >= 0.9 * curve.j_equilibrium) {
      curve.recool_time = traj.times[i] - curve.phase_end_time;
      break;
    }
  }
  return curve;
}

}  // namespace

SuperradianceReport run_superradiance(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  SuperradianceReport rep;
  const int n_curves = static_cast<int>(spec.eta_values.size());
  rep.curves.resize(n_curves);
  std::vector<std::string> errors(n_curves);

#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
  for (int c = 0; c < n_curves; ++c) {
    try {
      rep.curves[c] = superradiance_curve(spec, spec.eta_values[c]);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }

  for (int c = 0; c < n_curves; ++c) {
    if (!errors[c].empty())
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) + ": " +
                                errors[c]);
    else if (!rep.curves[c].traj.ok())
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) + ": " +
                                rep.curves[c].traj.error);
    else if (std::isnan(rep.curves[c].recool_time))
      rep.diag.errors.push_back("eta=" + std::to_string(spec.eta_values[c]) +
                                ": J did not recover within the simulated horizon");
  }
  rep.diag.total_points = n_curves;
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

// -------------------------------------------------------------------- sense

SensingReport run_sensing(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  if (spec.eta_values.empty())
    throw std::invalid_argument("run_sensing: need one eta value");
  SensingReport rep;

  const double eta = spec.eta_values.front();
  const int na = static_cast<int>(spec.spin_detunings.size());
  const int nb = static_cast<int>(spec.drive_offsets.size());
  rep.mode_a.resize(na);
  rep.mode_b.resize(nb);
  rep.grid_step_a = 2.0 * spec.sweep_span / std::max(1, spec.sweep_points - 1);
  rep.grid_step_b = 2.0 * spec.sense_span_b / std::max(1, spec.sense_points_b - 1);
  std::vector<std::string> errors(na + nb);

#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
  for (int u = 0; u < na + nb; ++u) {
    try {
      if (u < na) {
        // mode A: sweep the drive at fixed spin detuning, then invert the
        // frequency-sum identity on the two Rabi peaks
        SenseEntryA entry;
        entry.spin_detuning = spec.spin_detunings[u];
        ExperimentSpec sub = spec;
        sub.params.eta_s = eta;
        sub.params.omega_s = spec.params.omega_c + entry.spin_detuning;
        entry.omega_s_true = sub.params.omega_s;
        entry.curve = spectrum_chain(sub, eta);
        if (entry.curve.peaks.peaks.size() == 2) {
          entry.omega_s_inferred =
              infer_spin_frequency(entry.curve.peaks, spec.params.omega_c);
          entry.inferred_ok = true;
        }
        rep.mode_a[u] = std::move(entry);
      } else {
        // mode B: sweep the spin frequency at fixed drive
        SenseCurveB curve;
        curve.drive_offset = spec.drive_offsets[u - na];
        SystemParams base = spec.params;
        base.eta_s = eta;
        base.omega_d = spec.params.omega_c + curve.drive_offset;
        const auto omegas =
            linspace(spec.params.omega_c - spec.sense_span_b,
                     spec.params.omega_c + spec.sense_span_b, spec.sense_points_b);
        curve.points = sweep_chain(
            base, omegas, spec.drive_amplitude, spec.steady, spec.use_newton,
            [](SystemParams& p, double w) { p.omega_s = w; });
        for (const auto& pt : curve.points)
          if (!pt.converged) ++curve.nonconverged;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pt : curve.points) {
          if (pt.photon_number < best) {
            best = pt.photon_number;
            curve.min_detuning = pt.omega - spec.params.omega_c;
          }
        }
        rep.mode_b[u - na] = std::move(curve);
      }
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
  }

  for (int u = 0; u < na + nb; ++u)
    if (!errors[u].empty())
      rep.diag.errors.push_back("unit " + std::to_string(u) + ": " + errors[u]);
  for (const auto& e : rep.mode_a) {
    rep.diag.nonconverged_points += e.curve.nonconverged;
    rep.diag.total_points += static_cast<int>(e.curve.points.size());
  }
  for (const auto& c : rep.mode_b) {
    rep.diag.nonconverged_points += c.nonconverged;
    rep.diag.total_points += static_cast<int>(c.points.size());
  }
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

// ------------------------------------------------------------- oracle check

namespace {

OracleComparisonEntry oracle_entry(const ExperimentSpec& spec, int n_spins,
                                   double drive, bool strong) {
  SystemParams p = spec.params;
  p.n_spins = n_spins;
  const auto occ = ThermalOccupancies::from_params(p);
  const double p_eq = single_spin_steady_population(p, occ);
  const auto grid = linspace(0.0, 5.0 / p.kappa_c, 101);

  auto initial = [&](const HilbertLayout& l) {
    return product_state(l, p_eq, occ.n_c_th);
  };
  const auto oracle =
      run_oracle(p, drive, grid, spec.integ, initial, n_spins, 8, 1e-8);

  const auto init = thermal_equilibrium_state(p, occ);
  const auto traj =
      integrate(init, p, DriveProtocol::constant(drive, grid.back()), spec.integ, grid);
  if (!traj.ok())
    throw std::runtime_error(std::string("cumulant integration failed: ") + traj.error);

  OracleComparisonEntry e;
  e.n_spins = n_spins;
  e.fock_cutoff = oracle.layout.fock_cutoff;
  e.drive_amplitude = drive;
  e.strong_drive = strong;
  e.times.assign(grid.begin(), grid.end());
  e.cumulant = traj.states;
  e.exact.reserve(oracle.moments.size());
  for (const auto& m : oracle.moments) e.exact.push_back(m.cumulants);
  e.steady_photon_number = e.exact.back().v[slot::n].real();

  for (int k = 0; k < slot::count; ++k) {
    if (n_spins < 2 && k >= slot::sp_sm) continue;  // no pair moments at N=1
    double scale = 0, err = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      scale = std::max(scale, std::abs(e.exact[i].v[k]));
    for (std::size_t i = 0; i < grid.size(); ++i)
      err = std::max(err, std::abs(e.cumulant[i].v[k] - e.exact[i].v[k]));
    e.max_rel_deviation[k] = err / std::max(scale, 1e-12);
  }
  return e;
}

}  // namespace

OracleComparisonReport run_oracle_comparison(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  spec.params.validate();
  OracleComparisonReport rep;

  struct Job {
    int n_spins;
    double drive;
    bool strong;
  };
  std::vector<Job> jobs;
  for (int n : spec.oracle_spin_counts) jobs.push_back({n, spec.drive_amplitude, false});
  jobs.push_back(
      {2, spec.drive_amplitude * spec.oracle_strong_drive_factor, true});

  rep.entries.resize(jobs.size());
  std::vector<std::string> errors(jobs.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
  for (int i = 0; i < static_cast<int>(jobs.size()); ++i) {
    try {
      rep.entries[i] = oracle_entry(spec, jobs[i].n_spins, jobs[i].drive, jobs[i].strong);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (!errors[i].empty())
      rep.diag.errors.push_back("N=" + std::to_string(jobs[i].n_spins) + ": " +
                                errors[i]);
  rep.diag.total_points = static_cast<int>(jobs.size());
  rep.diag.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace cqed
