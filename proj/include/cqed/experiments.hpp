#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/analytics.hpp"
#include "cqed/integrator.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/model.hpp"

// Named scenario runners. Each one assembles parameters, drive protocols,
// integration and analytics for one of the bundled experiments and returns a
// structured report; cli-io turns reports into CSV files.

namespace cqed {

enum class ExperimentKind {
  dicke_map,
  rabi_transient,
  rabi_spectrum,
  superradiance,
  sense,
  oracle_check,
};

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_string(const std::string& name);

/// Room-temperature ensemble in a 2.69 GHz resonator (Rabi experiments).
SystemParams preset_fig3();
/// Large ensemble in a lossy 3.18 GHz resonator (superradiance pulse).
SystemParams preset_fig4();
/// Scaled-down rates for few-spin oracle comparisons.
SystemParams preset_oracle_check();

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::rabi_spectrum;
  std::string preset = "fig3";
  SystemParams params;

  // drive
  double drive_amplitude = 0;  // sqrt(rad/s), CW experiments
  double pulse_amplitude = 0;  // sqrt(rad/s), pulsed experiments
  double pulse_duration = 0;   // s
  double tail_duration = 0;    // s

  // grids
  std::vector<double> eta_values;        // s^-1, per-curve spin-cooling rates
  std::vector<double> map_temperatures;  // K (dicke map, eta = 0 branch)
  std::vector<double> map_etas;          // s^-1 (dicke map, T fixed branch)
  double sweep_span = 0;                 // rad/s half-width around omega_c
  int sweep_points = 201;
  std::vector<double> spin_detunings;  // rad/s (sense, mode A)
  std::vector<double> drive_offsets;   // rad/s (sense, mode B)
  double sense_span_b = 0;             // rad/s half-width for the omega_s sweep
  int sense_points_b = 201;
  std::vector<int> oracle_spin_counts;
  double oracle_strong_drive_factor = 10.0;

  // numerics
  int transient_samples = 3001;
  IntegrationConfig integ;
  SteadyStateConfig steady;
  bool use_newton = false;  // newton fallback for sweep points (seeded by warm starts)
  int workers = 2;

  // output
  std::string out_dir = "out";
  bool force = false;
  bool emit_plot_script = true;
};

ExperimentSpec default_spec(ExperimentKind kind);

struct RunDiagnostics {
  double wall_time_s = 0;
  int total_points = 0;
  int nonconverged_points = 0;
  std::vector<std::string> errors;
  bool clean() const { return nonconverged_points == 0 && errors.empty(); }
};

// ---------------------------------------------------------------- dicke map

struct DickeMapPoint {
  double temperature = 0;  // K
  double eta_s = 0;        // s^-1
  double population = 0;   // p
  double j = 0, m = 0;
  double j_over_j0 = 0;
};

struct DickeMapReport {
  std::vector<DickeMapPoint> temperature_scan;  // eta_s = 0
  std::vector<DickeMapPoint> eta_scan;          // T fixed
  RunDiagnostics diag;
};

DickeMapReport run_dicke_map(const ExperimentSpec& spec);

// ----------------------------------------------------------- rabi transient

struct TransientCurve {
  double eta_s = 0;
  Trajectory traj;
  // metrics over the drive window
  double oscillation_freq = 0;   // rad/s, 0 when none detected
  double predicted_freq = 0;     // sqrt(2 J) g from the windowed mean J
  double envelope_modulation = 0;  // detrended amplitude / peak
  bool oscillating = false;
};

struct RabiTransientReport {
  std::vector<TransientCurve> curves;
  RunDiagnostics diag;
};

RabiTransientReport run_rabi_transient(const ExperimentSpec& spec);

// ------------------------------------------------------------ rabi spectrum

struct SweepPointResult {
  double omega = 0;          // rad/s (swept coordinate)
  double photon_number = 0;  // steady <a^dag a>
  bool converged = false;
  double elapsed_model_time = 0;
  double residual_norm = 0;
};

struct SpectrumCurve {
  double eta_s = 0;
  std::vector<SweepPointResult> points;
  SpectrumPeaks peaks;
  double j_center = 0;          // J of the converged resonant point
  HybridModes prediction{};     // from j_center
  double measured_splitting = 0;  // rad/s, 0 unless two peaks
  int nonconverged = 0;
  double max_hermiticity_residue = 0;
};

struct RabiSpectrumReport {
  std::vector<SpectrumCurve> curves;  // one per eta value
  RunDiagnostics diag;
};

RabiSpectrumReport run_rabi_spectrum(const ExperimentSpec& spec);

/// Warm-started steady states along a drive-frequency grid, visited in the
/// order given (so a reversed grid sweeps the other way).
std::vector<SweepPointResult> sweep_drive_frequencies(const SystemParams& base,
                                                      std::span<const double> omega_d,
                                                      double drive_amplitude,
                                                      const SteadyStateConfig& steady,
                                                      bool use_newton = false);

// ------------------------------------------------------------ superradiance

struct SuperradianceCurve {
  double eta_s = 0;
  Trajectory traj;
  // The photon trace after switch-off is pump residue (bare kappa_c decay)
  // plus stimulated emission; pulse metrics are taken on the excess over
  // the pump decay, past the coherent switch-off transient (5/kappa_c).
  double peak_photon_number = 0;  // burst peak of the excess
  double pulse_end_time = 0;      // last 1%-of-peak crossing of the excess, s
  // The superradiant phase ends where J(t) bottoms out and re-cooling takes
  // over; that minimum is the star-marker analog.
  double phase_end_time = 0;      // argmin of J(t) after switch-off, s
  double plateau_population = 0;  // upper population at the J minimum
  double recool_time = 0;         // J minimum -> 90% of the asymptotic J, s
  double j_equilibrium = 0;
};

struct SuperradianceReport {
  std::vector<SuperradianceCurve> curves;
  RunDiagnostics diag;
};

SuperradianceReport run_superradiance(const ExperimentSpec& spec);

// -------------------------------------------------------------------- sense

struct SenseEntryA {
  double spin_detuning = 0;  // rad/s
  SpectrumCurve curve;       // omega_d sweep
  double omega_s_true = 0;
  double omega_s_inferred = 0;  // 0 when the peak pair was not found
  bool inferred_ok = false;
};

struct SenseCurveB {
  double drive_offset = 0;  // rad/s
  std::vector<SweepPointResult> points;  // vs spin detuning
  double min_detuning = 0;  // location of the photon-number minimum
  int nonconverged = 0;
};

struct SensingReport {
  std::vector<SenseEntryA> mode_a;
  std::vector<SenseCurveB> mode_b;
  double grid_step_a = 0;  // rad/s
  double grid_step_b = 0;  // rad/s
  RunDiagnostics diag;
};

SensingReport run_sensing(const ExperimentSpec& spec);

// ------------------------------------------------------------- oracle check

struct OracleComparisonEntry {
  int n_spins = 0;
  int fock_cutoff = 0;
  double drive_amplitude = 0;
  bool strong_drive = false;  // reported without pass/fail expectations
  std::vector<double> times;
  std::vector<CumulantState> cumulant;
  std::vector<CumulantState> exact;
  std::array<double, slot::count> max_rel_deviation{};
  double steady_photon_number = 0;  // exact route, last sample
};

struct OracleComparisonReport {
  std::vector<OracleComparisonEntry> entries;
  RunDiagnostics diag;
};

OracleComparisonReport run_oracle_comparison(const ExperimentSpec& spec);

}  // namespace cqed
