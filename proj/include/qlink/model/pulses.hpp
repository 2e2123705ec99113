#pragma once

#include <utility>
#include <vector>

namespace qlink::model {

enum class PulseShape { Square, Gaussian };

/// Envelope of a parametric flux modulation eps(t) * cos(omega t).
///
/// Square pulses are on for t in [start, start + duration). Gaussian pulses
/// are exactly zero beyond five standard deviations from their centre.
struct FluxPulse {
  PulseShape shape = PulseShape::Square;
  double amplitude = 0;  ///< eps, Hz
  double frequency = 0;  ///< omega, Hz
  double start = 0;      ///< s
  double duration = 0;   ///< s
  double sigma = 0;      ///< Gaussian RMS width, s
  /// When set, the modulation frequency is chirped so the sideband stays on the
  /// DC-offset-calibrated resonance as the envelope changes; `frequency` is the
  /// value at peak amplitude.
  bool track_resonance = false;

  static FluxPulse square(double amplitude, double frequency, double start, double duration);
  static FluxPulse gaussian(double amplitude, double frequency, double center, double sigma);

  void validate() const;
  double end() const { return start + duration; }
  double center() const { return start + 0.5 * duration; }
  bool active(double t) const { return t >= start && t < end(); }
  double envelope(double t) const;
};

inline constexpr double kGaussianTruncation = 5.0;

/// Resonant modulation frequency as a function of modulation amplitude,
/// piecewise linear between calibration points. Refuses to extrapolate.
class DcOffsetMap {
 public:
  DcOffsetMap() = default;
  explicit DcOffsetMap(std::vector<std::pair<double, double>> points);

  /// Samples base + shift_at_ref * (eps / eps_ref)^2 at n evenly spaced eps in [0, eps_max].
  static DcOffsetMap quadratic(double base, double shift_at_ref, double eps_ref, double eps_max, int n);

  double resonance(double eps) const;
  double min_eps() const { return points_.front().first; }
  double max_eps() const { return points_.back().first; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Effective sideband coupling g * J1(eps / (2 omega)).
double sideband_rate(double g_tilde, double eps, double omega);

/// Smallest eps with sideband_rate(g_tilde, eps, omega) == rate, on the rising
/// branch of J1. Throws RangeError when the rate exceeds the J1 maximum.
double amplitude_for_rate(double g_tilde, double rate, double omega);

/// Argument at which J1 attains its first maximum.
inline constexpr double kBesselJ1FirstMax = 1.8411837813406593;

}  // namespace qlink::model
