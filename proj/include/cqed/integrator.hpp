#pragma once

#include <span>
#include <string>
#include <vector>

#include "cqed/cumulant.hpp"
#include "cqed/model.hpp"

namespace cqed {

struct IntegrationConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;      // s, 0 = unlimited
  double initial_step = 0.0;  // s, 0 = automatic
  long max_steps = 50'000'000;

  void validate() const;  // tolerances in (0,1), max_steps > 0
};

enum class IntegrationStatus { ok, step_underflow, max_steps_exceeded, non_finite_state };

const char* to_string(IntegrationStatus s);

/// Sampled solution of one drive protocol. On failure the samples collected
/// so far are kept and last_state/last_time carry the final good state.
struct Trajectory {
  std::vector<double> times;
  std::vector<CumulantState> states;
  std::vector<DickeCoordinates> dicke;

  IntegrationStatus status = IntegrationStatus::ok;
  std::string error;
  CumulantState last_state;
  double last_time = 0;

  double max_hermiticity_residue = 0;
  int dicke_warnings = 0;  // samples where the J radicand signalled breakdown
  long n_steps = 0;
  long n_rhs_evals = 0;

  bool ok() const { return status == IntegrationStatus::ok; }
};

/// Adaptive RK 5(4) integration of the cumulant equations across the
/// piecewise-constant drive protocol. Steps never straddle a segment
/// boundary; the integrator restarts cleanly at each one. Sample times must
/// be sorted and lie within [0, total protocol duration]; values at sample
/// points come from the 4th-order dense interpolant of the accepted steps.
Trajectory integrate(const CumulantState& initial, const SystemParams& params,
                     const DriveProtocol& protocol, const IntegrationConfig& config,
                     std::span<const double> sample_times);

struct SteadyStateConfig {
  IntegrationConfig integ{};
  double rel_tol = 1e-8;         // target relative accuracy of the fixed point
  double window_factor = 10.0;   // observation window, units 1/kappa_c
  double time_cap_factor = 50.0; // cap, units 1/(slowest relaxation rate)
  double divergence_bound = 1e30;
};

struct SteadyStateResult {
  enum class Failure { none, time_cap_exceeded, divergence, integration_error };

  CumulantState state;
  double residual_norm = 0;        // max_k |dx_k/dt| / scale_k, 1/s
  double residual_threshold = 0;   // certificate bound in force, 1/s
  double elapsed_model_time = 0;   // s
  bool converged = false;
  Failure failure = Failure::none;
  std::string message;
  double max_hermiticity_residue = 0;
};

/// Integrates at constant drive until, over one observation window, every
/// slot's relative change falls below rel_tol AND the RHS residual certifies
/// |x - x*| <~ rel_tol (residual_k <= rel_tol * Gamma_slow * scale_k, with
/// Gamma_slow the slowest relaxation rate of the model). Divergence
/// (norm beyond divergence_bound) is reported distinctly from running into
/// the model-time cap, since driven nonlinear closures can orbit limit
/// cycles instead of settling.
SteadyStateResult steady_state(const CumulantState& initial, const SystemParams& params,
                               double drive_amplitude, const SteadyStateConfig& config);

/// Direct Newton root-finder on the RHS with a finite-difference Jacobian in
/// the 24 real coordinates. Fast fallback for sweep throughput; converges
/// only locally, so seed it from an integrated state or a neighbouring sweep
/// point.
SteadyStateResult steady_state_newton(const CumulantState& initial,
                                      const SystemParams& params, double drive_amplitude,
                                      const SteadyStateConfig& config);

}  // namespace cqed
