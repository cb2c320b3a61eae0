#include "cqed/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cqed/detail/dopri5.hpp"

namespace cqed {

namespace {

using detail::Dopri5Options;
using detail::StepStatus;

Dopri5Options to_options(const IntegrationConfig& c) {
  return {c.rel_tol, c.abs_tol, c.max_step, c.initial_step, c.max_steps};
}

IntegrationStatus to_status(StepStatus s) {
  switch (s) {
    case StepStatus::ok: return IntegrationStatus::ok;
    case StepStatus::step_underflow: return IntegrationStatus::step_underflow;
    case StepStatus::max_steps_exceeded: return IntegrationStatus::max_steps_exceeded;
    case StepStatus::non_finite_state: return IntegrationStatus::non_finite_state;
  }
  return IntegrationStatus::non_finite_state;
}

double hermiticity_residue_raw(const std::vector<cplx>& y) {
  double scale = 1.0;
  for (const auto& z : y) scale = std::max(scale, std::abs(z));
  double r = 0;
  for (int k : {slot::pe, slot::n, slot::sp_sm, slot::pe_pe})
    r = std::max(r, std::abs(y[k].imag()));
  return r / scale;
}

CumulantState to_state(const std::vector<cplx>& y) {
  CumulantState s;
  std::copy(y.begin(), y.end(), s.v.begin());
  return s;
}

}  // namespace

void IntegrationConfig::validate() const {
  if (!(rel_tol > 0 && rel_tol < 1) || !(abs_tol > 0 && abs_tol < 1))
    throw std::invalid_argument("IntegrationConfig: tolerances must lie in (0, 1)");
  if (max_steps <= 0)
    throw std::invalid_argument("IntegrationConfig: max_steps must be > 0");
  if (max_step < 0 || initial_step < 0)
    throw std::invalid_argument("IntegrationConfig: negative step bound");
}

const char* to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::ok: return "ok";
    case IntegrationStatus::step_underflow: return "step underflow";
    case IntegrationStatus::max_steps_exceeded: return "max steps exceeded";
    case IntegrationStatus::non_finite_state: return "non-finite state";
  }
  return "unknown";
}

Trajectory integrate(const CumulantState& initial, const SystemParams& params,
                     const DriveProtocol& protocol, const IntegrationConfig& config,
                     std::span<const double> sample_times) {
  params.validate();
  protocol.validate();
  config.validate();
  if (!initial.finite())
    throw std::invalid_argument("integrate: non-finite initial state");

  const double total = protocol.total_duration();
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("integrate: sample times must be strictly increasing");
    if (sample_times[i] < 0 || sample_times[i] > total * (1.0 + 1e-12))
      throw std::invalid_argument("integrate: sample time outside protocol duration");
  }

  Trajectory traj;
  traj.last_state = initial;
  if (sample_times.empty()) return traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());
  traj.dicke.reserve(sample_times.size());

  const CumulantRhs rhs(params);
  std::vector<cplx> y(initial.v.begin(), initial.v.end());

  const double t_last = sample_times.back();

  auto record = [&](double t, const std::vector<cplx>& yy) {
    traj.times.push_back(t);
    CumulantState s = to_state(yy);
    traj.states.push_back(s);
    traj.max_hermiticity_residue =
        std::max(traj.max_hermiticity_residue, hermiticity_residue_raw(yy));
    DickeCoordinates dc{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
    try {
      dc = dicke_from_cumulants(s, params.n_spins);
    } catch (const std::exception&) {
      ++traj.dicke_warnings;
    }
    traj.dicke.push_back(dc);
    return true;
  };

  std::size_t idx = 0;
  double t_lo = 0;
  for (const auto& seg : protocol.segments) {
    if (t_lo > t_last) break;
    const double t_hi = std::min(t_lo + seg.duration, t_last);
    // samples falling in this segment, boundary included
    std::size_t first = idx;
    while (idx < sample_times.size() && sample_times[idx] <= t_hi * (1.0 + 1e-15))
      ++idx;
    const auto sub = sample_times.subspan(first, idx - first);

    const double amp = seg.amplitude;
    auto f = [&](double, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
      rhs.eval(yy.data(), amp, dy.data());
    };

    auto res = detail::dopri5_integrate(f, t_lo, t_hi, y, to_options(config), sub,
                                        record);
    traj.n_steps += res.stats.n_steps;
    traj.n_rhs_evals += res.stats.n_rhs;
    traj.last_state = to_state(y);
    traj.last_time = res.t_reached;
    if (res.status != StepStatus::ok) {
      traj.status = to_status(res.status);
      traj.error = res.message;
      return traj;
    }
    t_lo += seg.duration;
  }
  return traj;
}

namespace {

// Slowest positive relaxation rate of the model; certifies distance to the
// fixed point from the RHS residual.
double slowest_rate(const SystemParams& p, const ThermalOccupancies& occ) {
  const double gamma_pop = p.eta_s + p.gamma_s * (1.0 + 2.0 * occ.n_s_th);
  double slow = 0;
  for (double r : {p.kappa_c, gamma_pop})
    if (r > 0) slow = (slow == 0) ? r : std::min(slow, r);
  if (slow == 0)
    throw std::invalid_argument("steady_state: undamped system has no steady state");
  return slow;
}

struct ResidualCheck {
  double residual_norm = 0;       // max_k |f_k| / scale_k
  double residual_threshold = 0;  // certificate in force for that max
  bool state_ok = false;          // residual certifies rel_tol distance
};

// The RHS cancels large terms, so a state integrated to (rel_tol, abs_tol)
// carries a derivative noise floor: each slot wanders by ~rel_tol*|x_k| +
// abs_tol, and those wanders propagate through the term magnitudes. Compute
// the floor from the absolute-value companion RHS evaluated at |x| and at
// |x| + abs_tol; anything below it counts as zero for the certificate.
void residual_floor(const CumulantRhs& rhs, const std::vector<cplx>& y, double drive,
                    double rel_tol_integ, double abs_tol,
                    std::array<double, slot::count>& floor) {
  const double noise_coef =
      128.0 * std::max(4.0 * std::numeric_limits<double>::epsilon(), rel_tol_integ);
  std::array<cplx, slot::count> bumped;
  std::array<double, slot::count> mag, mag_bumped;
  for (int k = 0; k < slot::count; ++k) bumped[k] = std::abs(y[k]) + abs_tol;
  rhs.eval_scale(y.data(), drive, mag.data());
  rhs.eval_scale(bumped.data(), drive, mag_bumped.data());
  for (int k = 0; k < slot::count; ++k)
    floor[k] = noise_coef * mag[k] + (mag_bumped[k] - mag[k]);
}

ResidualCheck check_residual(const CumulantRhs& rhs, const std::vector<cplx>& y,
                             double drive, double rel_tol, double gamma_slow,
                             const std::array<double, slot::count>& floor) {
  std::array<cplx, slot::count> f;
  rhs.eval(y.data(), drive, f.data());
  double scale = 1.0;
  for (const auto& z : y) scale = std::max(scale, std::abs(z));
  ResidualCheck rc;
  rc.state_ok = true;
  for (int k = 0; k < slot::count; ++k) {
    const double denom = std::max(std::abs(y[k]), 1e-9 * scale);
    const double r = std::abs(f[k]) / denom;
    const double bound = rel_tol * gamma_slow + floor[k] / denom;
    rc.residual_norm = std::max(rc.residual_norm, r);
    rc.residual_threshold = std::max(rc.residual_threshold, bound);
    if (r > bound) rc.state_ok = false;
  }
  return rc;
}

}  // namespace

SteadyStateResult steady_state(const CumulantState& initial, const SystemParams& params,
                               double drive_amplitude, const SteadyStateConfig& config) {
  params.validate();
  config.integ.validate();
  if (!initial.finite())
    throw std::invalid_argument("steady_state: non-finite initial state");

  const auto occ = ThermalOccupancies::from_params(params);
  const CumulantRhs rhs(params);
  const double gamma_pop = rhs.population_decay();
  const double gamma_slow = slowest_rate(params, occ);

  const double window = config.window_factor /
                        (params.kappa_c > 0 ? params.kappa_c : gamma_slow);
  double t_cap = config.time_cap_factor / gamma_slow;
  if (gamma_pop > 0) t_cap = std::max(t_cap, 10.0 / gamma_pop);

  std::vector<cplx> y(initial.v.begin(), initial.v.end());
  std::vector<cplx> prev = y;

  SteadyStateResult out;
  out.state = initial;

  auto fail = [&](SteadyStateResult::Failure kind, std::string msg, double t) {
    out.converged = false;
    out.failure = kind;
    out.message = std::move(msg);
    out.elapsed_model_time = t;
    out.state = to_state(y);
    return out;
  };

  auto f = [&](double, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
    rhs.eval(yy.data(), drive_amplitude, dy.data());
  };

  double t = 0;
  double h_carry = 0;
  while (t < t_cap) {
    const double t_next = std::min(t + window, t_cap);
    auto res = detail::dopri5_integrate(f, t, t_next, y, to_options(config.integ), {},
                                        [](double, const std::vector<cplx>&) {
                                          return true;
                                        },
                                        h_carry);
    if (res.status == StepStatus::non_finite_state)
      return fail(SteadyStateResult::Failure::divergence, "state overflowed", t);
    if (res.status != StepStatus::ok)
      return fail(SteadyStateResult::Failure::integration_error, res.message, t);
    h_carry = res.h_final;
    t = t_next;

    out.max_hermiticity_residue =
        std::max(out.max_hermiticity_residue, hermiticity_residue_raw(y));

    double norm = 0;
    for (const auto& z : y) norm = std::max(norm, std::abs(z));
    if (norm > config.divergence_bound)
      return fail(SteadyStateResult::Failure::divergence,
                  "state norm grew beyond divergence bound", t);

    const double scale = std::max(1.0, norm);
    std::array<double, slot::count> floor;
    residual_floor(rhs, y, drive_amplitude, config.integ.rel_tol, config.integ.abs_tol,
                   floor);
    bool settled = true;
    for (int k = 0; k < slot::count; ++k) {
      const double denom = std::max(std::abs(y[k]), 1e-9 * scale);
      const double allow = config.rel_tol * denom + floor[k] * window;
      if (std::abs(y[k] - prev[k]) > allow) {
        settled = false;
        break;
      }
    }
    const auto rc = check_residual(rhs, y, drive_amplitude, config.rel_tol, gamma_slow,
                                   floor);
    if (settled && rc.state_ok) {
      out.state = to_state(y);
      out.residual_norm = rc.residual_norm;
      out.residual_threshold = rc.residual_threshold;
      out.elapsed_model_time = t;
      out.converged = true;
      return out;
    }
    prev = y;
  }

  std::array<double, slot::count> floor;
  residual_floor(rhs, y, drive_amplitude, config.integ.rel_tol, config.integ.abs_tol,
                 floor);
  const auto rc = check_residual(rhs, y, drive_amplitude, config.rel_tol, gamma_slow,
                                 floor);
  out = fail(SteadyStateResult::Failure::time_cap_exceeded,
             "windowed change or residual still above tolerance at the model-time cap",
             t_cap);
  out.residual_norm = rc.residual_norm;
  out.residual_threshold = rc.residual_threshold;
  return out;
}

namespace {

// Partial-pivot LU solve of A x = b, A row-major n x n; A and b are
// overwritten. Returns false on (numerical) singularity.
bool lu_solve(std::vector<double>& a, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double bestv = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > bestv) {
        best = r;
        bestv = v;
      }
    }
    if (bestv == 0 || !std::isfinite(bestv)) return false;
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[best * n + c]);
      std::swap(b[col], b[best]);
    }
    const double d = a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r * n + col] / d;
      if (m == 0) continue;
      a[r * n + col] = 0;
      for (int c = col + 1; c < n; ++c) a[r * n + c] -= m * a[col * n + c];
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
  return true;
}

}  // namespace

SteadyStateResult steady_state_newton(const CumulantState& initial,
                                      const SystemParams& params, double drive_amplitude,
                                      const SteadyStateConfig& config) {
  params.validate();
  if (!initial.finite())
    throw std::invalid_argument("steady_state_newton: non-finite initial state");

  const auto occ = ThermalOccupancies::from_params(params);
  const CumulantRhs rhs(params);
  const double gamma_slow = slowest_rate(params, occ);

  constexpr int nreal = 2 * slot::count;
  auto eval_f = [&](const std::array<double, nreal>& x, std::array<double, nreal>& fx) {
    std::array<cplx, slot::count> y, dy;
    for (int k = 0; k < slot::count; ++k) y[k] = cplx(x[2 * k], x[2 * k + 1]);
    rhs.eval(y, drive_amplitude, dy);
    for (int k = 0; k < slot::count; ++k) {
      fx[2 * k] = dy[k].real();
      fx[2 * k + 1] = dy[k].imag();
    }
  };

  std::array<double, nreal> x{}, fx{}, fx_trial{};
  for (int k = 0; k < slot::count; ++k) {
    x[2 * k] = initial.v[k].real();
    x[2 * k + 1] = initial.v[k].imag();
  }
  eval_f(x, fx);

  auto scale_of = [&](const std::array<double, nreal>& v) {
    double s = 1.0;
    for (int k = 0; k < slot::count; ++k)
      s = std::max(s, std::hypot(v[2 * k], v[2 * k + 1]));
    return s;
  };
  // weighted residual with the same cancellation floor used by the
  // integrating solver, at machine-epsilon level since newton is direct
  const double noise_coef = 256.0 * std::numeric_limits<double>::epsilon();
  auto weighted = [&](const std::array<double, nreal>& v,
                      const std::array<double, nreal>& fv) {
    const double scale = scale_of(v);
    std::array<cplx, slot::count> yz;
    std::array<double, slot::count> mag;
    for (int k = 0; k < slot::count; ++k) yz[k] = cplx(v[2 * k], v[2 * k + 1]);
    rhs.eval_scale(yz.data(), drive_amplitude, mag.data());
    double w = 0;
    for (int k = 0; k < slot::count; ++k) {
      const double denom = std::max(std::hypot(v[2 * k], v[2 * k + 1]), 1e-9 * scale);
      const double f = std::hypot(fv[2 * k], fv[2 * k + 1]);
      w = std::max(w, std::max(0.0, f - noise_coef * mag[k]) / denom);
    }
    return w;
  };

  SteadyStateResult out;
  const int max_iter = 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double resid = weighted(x, fx);
    if (resid <= config.rel_tol * gamma_slow) {
      CumulantState s;
      for (int k = 0; k < slot::count; ++k) s.v[k] = cplx(x[2 * k], x[2 * k + 1]);
      out.state = s;
      out.residual_norm = resid;
      out.converged = true;
      out.message = "newton, " + std::to_string(iter) + " iterations";
      return out;
    }

    // Forward-difference Jacobian in the 24 real coordinates (the closure
    // involves conjugations, so the map is not complex-differentiable).
    const double scale = scale_of(x);
    std::vector<double> jac(nreal * nreal);
    std::array<double, nreal> xp, fp;
    for (int j = 0; j < nreal; ++j) {
      const double eps = 1.5e-8 * std::max({std::abs(x[j]), 1e-6 * scale, 1e-30});
      xp = x;
      xp[j] += eps;
      eval_f(xp, fp);
      for (int i = 0; i < nreal; ++i) jac[i * nreal + j] = (fp[i] - fx[i]) / eps;
    }
    std::vector<double> step(fx.begin(), fx.end());
    for (auto& v : step) v = -v;
    if (!lu_solve(jac, step, nreal)) {
      out.failure = SteadyStateResult::Failure::integration_error;
      out.message = "newton: singular jacobian";
      break;
    }

    const double f0 = weighted(x, fx);
    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, alpha *= 0.5) {
      for (int j = 0; j < nreal; ++j) xp[j] = x[j] + alpha * step[j];
      eval_f(xp, fx_trial);
      bool finite = true;
      for (double v : fx_trial) finite = finite && std::isfinite(v);
      if (finite && weighted(xp, fx_trial) < (1.0 - 1e-4 * alpha) * f0) {
        x = xp;
        fx = fx_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.failure = SteadyStateResult::Failure::integration_error;
      out.message = "newton: line search stalled";
      break;
    }
  }
  if (out.message.empty()) {
    out.failure = SteadyStateResult::Failure::integration_error;
    out.message = "newton: iteration limit reached";
  }
  CumulantState s;
  for (int k = 0; k < slot::count; ++k) s.v[k] = cplx(x[2 * k], x[2 * k + 1]);
  out.state = s;
  out.residual_norm = weighted(x, fx);
  out.converged = false;
  return out;
}

}  // namespace cqed
