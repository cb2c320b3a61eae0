#include "cqed/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqed {

HybridModes hybrid_mode_frequencies(double omega_s, double omega_c, double g_s,
                                    double j) {
  if (j < 0) throw std::invalid_argument("hybrid_mode_frequencies: j must be >= 0");
  const double delta = omega_s - omega_c;
  const double chi = std::sqrt(8.0 * g_s * g_s * j + delta * delta);
  const double sum = omega_s + omega_c;
  return {0.5 * (sum + chi), 0.5 * (sum - chi), chi};
}

namespace {

void check_sweep(std::span<const SweepPoint> sweep) {
  if (sweep.size() < 5)
    throw std::invalid_argument("find_peaks: need at least 5 sweep points");
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i].omega > sweep[i - 1].omega))
      throw std::invalid_argument("find_peaks: frequencies must be strictly increasing");
}

// Topographic prominence: height above the higher of the two saddle minima
// toward the nearest strictly higher samples (or the data edge).
double prominence(std::span<const SweepPoint> sweep, std::size_t i) {
  const double h = sweep[i].value;
  double left_min = h;
  double left_saddle = h;
  bool found_higher_left = false;
  for (std::size_t k = i; k-- > 0;) {
    left_min = std::min(left_min, sweep[k].value);
    if (sweep[k].value > h) {
      found_higher_left = true;
      left_saddle = left_min;
      break;
    }
  }
  if (!found_higher_left) left_saddle = left_min;

  double right_min = h;
  double right_saddle = h;
  bool found_higher_right = false;
  for (std::size_t k = i + 1; k < sweep.size(); ++k) {
    right_min = std::min(right_min, sweep[k].value);
    if (sweep[k].value > h) {
      found_higher_right = true;
      right_saddle = right_min;
      break;
    }
  }
  if (!found_higher_right) right_saddle = right_min;

  return h - std::max(left_saddle, right_saddle);
}

Peak refine(const SweepPoint& a, const SweepPoint& b, const SweepPoint& c) {
  // Vertex of the parabola through three (not necessarily equispaced) points.
  const double x1 = a.omega, x2 = b.omega, x3 = c.omega;
  const double y1 = a.value, y2 = b.value, y3 = c.value;
  const double d1 = (y2 - y1) / (x2 - x1);
  const double d2 = (y3 - y2) / (x3 - x2);
  const double curv = (d2 - d1) / (x3 - x1);
  if (curv >= 0) return {x2, y2};  // flat or concave-up; keep the grid point
  const double xv = 0.5 * (x1 + x2 - d1 / curv);
  const double xc = std::clamp(xv, x1, x3);
  const double yv = y2 + curv * (xc - x2) * (xc - x2) +
                    (d1 + curv * (x2 - x1)) * (xc - x2);
  return {xc, std::max(yv, y2)};
}

}  // namespace

SpectrumPeaks find_peaks(std::span<const SweepPoint> sweep, double min_prominence_frac) {
  check_sweep(sweep);
  double global_max = sweep[0].value;
  for (const auto& p : sweep) global_max = std::max(global_max, p.value);
  const double threshold = min_prominence_frac * global_max;

  SpectrumPeaks out;
  for (std::size_t i = 1; i + 1 < sweep.size(); ++i) {
    const double v = sweep[i].value;
    if (!(v > sweep[i - 1].value && v >= sweep[i + 1].value)) continue;
    if (prominence(sweep, i) < threshold) continue;
    out.peaks.push_back(refine(sweep[i - 1], sweep[i], sweep[i + 1]));
  }
  return out;
}

bool has_central_dip(std::span<const SweepPoint> sweep, double omega_center,
                     double window, double min_depth_frac) {
  check_sweep(sweep);
  double global_max = sweep[0].value;
  for (const auto& p : sweep) global_max = std::max(global_max, p.value);

  for (std::size_t i = 1; i + 1 < sweep.size(); ++i) {
    if (std::abs(sweep[i].omega - omega_center) > window) continue;
    const double v = sweep[i].value;
    if (!(v < sweep[i - 1].value && v <= sweep[i + 1].value)) continue;
    // require a rise on both sides before the data turns lower again
    double left_high = v, right_high = v;
    for (std::size_t k = i; k-- > 0;) left_high = std::max(left_high, sweep[k].value);
    for (std::size_t k = i + 1; k < sweep.size(); ++k)
      right_high = std::max(right_high, sweep[k].value);
    if (left_high - v >= min_depth_frac * global_max &&
        right_high - v >= min_depth_frac * global_max)
      return true;
  }
  return false;
}

double infer_spin_frequency(const SpectrumPeaks& peaks, double omega_c) {
  if (peaks.peaks.size() != 2)
    throw std::invalid_argument(
        "infer_spin_frequency: frequency-sum inversion needs exactly two peaks");
  return peaks.peaks[0].omega + peaks.peaks[1].omega - omega_c;
}

}  // namespace cqed
