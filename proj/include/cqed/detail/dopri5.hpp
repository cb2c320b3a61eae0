#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Embedded Dormand-Prince 5(4) pair with PI ("Lund") step-size control and
// the standard quartic dense-output interpolant, on complex state vectors.
// Structure follows Hairer's DOPRI5.

namespace cqed::detail {

using cplx = std::complex<double>;

struct Dopri5Options {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;      // 0 = no cap
  double initial_step = 0.0;  // 0 = automatic
  long max_steps = 50'000'000;
};

enum class StepStatus { ok, step_underflow, max_steps_exceeded, non_finite_state };

struct Dopri5Stats {
  long n_steps = 0;
  long n_accepted = 0;
  long n_rejected = 0;
  long n_rhs = 0;
};

struct Dopri5Result {
  StepStatus status = StepStatus::ok;
  bool stopped_early = false;  // sample callback requested stop
  double t_reached = 0;
  double h_final = 0;
  Dopri5Stats stats;
  std::string message;
};

// Butcher tableau and dense-output coefficients.
namespace dp5 {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
inline constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
inline constexpr double uround = 2.3e-16;
}  // namespace dp5

inline bool finite_vec(const std::vector<cplx>& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// Integrates y' = rhs(t, y) from t0 to t1 (t1 >= t0). Sample times must be
// sorted and lie within [t0, t1]; on_sample(t, y_at_t) -> bool is invoked in
// order and may stop the run by returning false. h_init carries a step size
// from a previous stretch of the same smooth problem (0 = automatic).
template <class Rhs, class SampleFn>
Dopri5Result dopri5_integrate(Rhs&& rhs, double t0, double t1, std::vector<cplx>& y,
                              const Dopri5Options& opt, std::span<const double> samples,
                              SampleFn&& on_sample, double h_init = 0.0) {
  using namespace dp5;
  const std::size_t n = y.size();
  Dopri5Result res;
  res.t_reached = t0;

  std::size_t sample_idx = 0;
  // Samples at (or numerically before) the start are emitted directly.
  while (sample_idx < samples.size() && samples[sample_idx] <= t0) {
    if (!on_sample(t0, y)) {
      res.stopped_early = true;
      return res;
    }
    ++sample_idx;
  }
  if (t1 <= t0) return res;

  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n);
  std::vector<cplx> rc1, rc2, rc3, rc4, rc5, yint;

  auto eval = [&](double t, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
    rhs(t, yy, dy);
    ++res.stats.n_rhs;
  };

  double t = t0;
  eval(t, y, k1);

  const double hmax0 = opt.max_step > 0 ? std::min(opt.max_step, t1 - t0) : (t1 - t0);

  double h = h_init;
  if (h <= 0) {
    // Hairer's automatic initial step: Euler probe plus curvature estimate.
    double dnf = 0, dny = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      dnf += std::norm(k1[i] / sk);
      dny += std::norm(y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, hmax0);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k1[i];
    eval(t + h, ytmp, k2);
    double der2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      der2 += std::norm((k2[i] - k1[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                       : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, hmax0});
    if (!std::isfinite(h) || h <= 0) h = 1e-6 * (t1 - t0);
  }
  h = std::min(h, hmax0);

  const double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool reject = false;
  bool last = false;

  while (true) {
    if (res.stats.n_steps >= opt.max_steps) {
      res.status = StepStatus::max_steps_exceeded;
      res.message = "step limit reached before end of interval";
      res.t_reached = t;
      res.h_final = h;
      return res;
    }
    if (0.1 * h <= std::abs(t) * uround) {
      res.status = StepStatus::step_underflow;
      res.message = "step size underflow";
      res.t_reached = t;
      res.h_final = h;
      return res;
    }
    if (t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    ++res.stats.n_steps;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
    eval(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    const double tph = t + h;
    eval(tph, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                          a76 * k6[i]);
    eval(tph, y1, k7);

    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * k7[i]);
      const double sk =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += std::norm(ei / sk);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (!std::isfinite(err)) {
      // Overflow inside the stages; retry with a much smaller step.
      ++res.stats.n_rejected;
      reject = true;
      last = false;
      h *= 0.1;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++res.stats.n_accepted;

      // Dense output for samples inside (t, t+h].
      if (sample_idx < samples.size() && samples[sample_idx] <= tph) {
        if (rc1.empty()) {
          rc1.resize(n);
          rc2.resize(n);
          rc3.resize(n);
          rc4.resize(n);
          rc5.resize(n);
          yint.resize(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cplx ydiff = y1[i] - y[i];
          const cplx bspl = h * k1[i] - ydiff;
          rc1[i] = y[i];
          rc2[i] = ydiff;
          rc3[i] = bspl;
          rc4[i] = ydiff - h * k7[i] - bspl;
          rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
        }
        while (sample_idx < samples.size() && samples[sample_idx] <= tph) {
          const double ts = samples[sample_idx];
          const double theta = (ts - t) / h;
          const double theta1 = 1.0 - theta;
          for (std::size_t i = 0; i < n; ++i)
            yint[i] = rc1[i] +
                      theta * (rc2[i] + theta1 * (rc3[i] +
                                                  theta * (rc4[i] + theta1 * rc5[i])));
          if (!on_sample(ts, yint)) {
            y = yint;
            res.stopped_early = true;
            res.t_reached = ts;
            res.h_final = hnew;
            return res;
          }
          ++sample_idx;
        }
      }

      std::swap(k1, k7);
      std::swap(y, y1);
      t = tph;
      res.t_reached = t;

      if (!finite_vec(y)) {
        res.status = StepStatus::non_finite_state;
        res.message = "state became non-finite";
        res.h_final = hnew;
        return res;
      }
      if (last) {
        res.h_final = hnew;
        return res;
      }
      if (opt.max_step > 0 && hnew > opt.max_step) hnew = opt.max_step;
      if (reject) hnew = std::min(hnew, h);
      reject = false;
    } else {
      hnew = h / std::min(1.0 / fac_min, fac11 / safe);
      reject = true;
      last = false;
      if (res.stats.n_accepted >= 1) ++res.stats.n_rejected;
    }
    h = hnew;
  }
}

}  // namespace cqed::detail
