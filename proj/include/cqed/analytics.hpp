#pragma once

#include <span>
#include <vector>

// Holstein-Primakoff hybrid-mode predictions, spectral peak extraction and
// the frequency-sum inversion used for sensing.

namespace cqed {

/// The two spin-photon hybrid modes for collective spin quantum number j.
/// omega_plus + omega_minus == omega_s + omega_c holds exactly.
struct HybridModes {
  double omega_plus = 0;   // rad/s
  double omega_minus = 0;  // rad/s
  double chi = 0;          // rad/s, mode splitting
};

/// chi = sqrt(8 g^2 J + (omega_s - omega_c)^2), omega_pm = (omega_s + omega_c +- chi)/2.
HybridModes hybrid_mode_frequencies(double omega_s, double omega_c, double g_s, double j);

struct SweepPoint {
  double omega = 0;  // rad/s (drive or spin frequency, caller's choice)
  double value = 0;  // steady photon number
};

struct Peak {
  double omega = 0;   // rad/s, quadratic-interpolated
  double height = 0;  // photons
};

struct SpectrumPeaks {
  std::vector<Peak> peaks;  // ascending in frequency
};

/// Local maxima whose topographic prominence exceeds min_prominence_frac of
/// the global maximum, refined by 3-point quadratic interpolation. Needs at
/// least 5 strictly increasing sweep points; an empty result is legal
/// (monotone data has no interior peak).
SpectrumPeaks find_peaks(std::span<const SweepPoint> sweep,
                         double min_prominence_frac = 0.05);

/// True when the sweep has a local minimum between two higher local maxima
/// within |omega - omega_center| <= window (the Fano-dip signature).
bool has_central_dip(std::span<const SweepPoint> sweep, double omega_center,
                     double window, double min_depth_frac = 0.01);

/// Spin transition frequency from the two Rabi peaks:
/// omega_s = omega_plus + omega_minus - omega_c. Exact inversion of the
/// frequency-sum identity, independent of J and g. Throws unless exactly
/// two peaks are present.
double infer_spin_frequency(const SpectrumPeaks& peaks, double omega_c);

}  // namespace cqed
