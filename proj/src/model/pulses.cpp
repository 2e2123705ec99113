#include "qlink/model/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlink/core/error.hpp"

namespace qlink::model {

FluxPulse FluxPulse::square(double amplitude, double frequency, double start, double duration) {
  FluxPulse p;
  p.shape = PulseShape::Square;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.start = start;
  p.duration = duration;
  p.validate();
  return p;
}

FluxPulse FluxPulse::gaussian(double amplitude, double frequency, double center, double sigma) {
  FluxPulse p;
  p.shape = PulseShape::Gaussian;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.sigma = sigma;
  p.start = center - kGaussianTruncation * sigma;
  p.duration = 2.0 * kGaussianTruncation * sigma;
  p.validate();
  return p;
}

void FluxPulse::validate() const {
  if (!(duration > 0)) throw InvalidArgument("FluxPulse: duration must be positive");
  if (!(frequency > 0)) throw InvalidArgument("FluxPulse: modulation frequency must be positive");
  if (shape == PulseShape::Gaussian && !(sigma > 0))
    throw InvalidArgument("FluxPulse: gaussian sigma must be positive");
}

double FluxPulse::envelope(double t) const {
  if (shape == PulseShape::Square) return active(t) ? amplitude : 0.0;
  const double x = t - center();
  if (std::abs(x) > kGaussianTruncation * sigma) return 0.0;
  return amplitude * std::exp(-x * x / (2.0 * sigma * sigma));
}

DcOffsetMap::DcOffsetMap(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("DcOffsetMap: need at least two calibration points");
  for (std::size_t k = 1; k < points_.size(); ++k)
    if (!(points_[k].first > points_[k - 1].first))
      throw InvalidArgument("DcOffsetMap: amplitudes must be sorted and distinct");
}

DcOffsetMap DcOffsetMap::quadratic(double base, double shift_at_ref, double eps_ref, double eps_max,
                                   int n) {
  if (n < 2) throw InvalidArgument("DcOffsetMap::quadratic: need n >= 2");
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < n; ++k) {
    const double eps = eps_max * k / (n - 1);
    pts.emplace_back(eps, base + shift_at_ref * (eps / eps_ref) * (eps / eps_ref));
  }
  return DcOffsetMap(std::move(pts));
}

double DcOffsetMap::resonance(double eps) const {
  if (points_.empty()) throw RangeError("DcOffsetMap: no calibration points");
  if (eps < min_eps() || eps > max_eps()) {
    std::ostringstream msg;
    msg << "DcOffsetMap: amplitude " << eps << " Hz outside calibrated range [" << min_eps() << ", "
        << max_eps() << "]";
    throw RangeError(msg.str());
  }
  auto it = std::lower_bound(points_.begin(), points_.end(), eps,
                             [](const auto& p, double e) { return p.first < e; });
  if (it->first == eps) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (eps - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

double sideband_rate(double g_tilde, double eps, double omega) {
  if (!(omega > 0)) throw InvalidArgument("sideband_rate: modulation frequency must be positive");
  return g_tilde * std::cyl_bessel_j(1.0, eps / (2.0 * omega));
}

double amplitude_for_rate(double g_tilde, double rate, double omega) {
  if (!(omega > 0)) throw InvalidArgument("amplitude_for_rate: modulation frequency must be positive");
  if (rate == 0.0) return 0.0;
  const double target = rate / g_tilde;
  const double jmax = std::cyl_bessel_j(1.0, kBesselJ1FirstMax);
  if (!(target > 0) || target > jmax) throw RangeError("amplitude_for_rate: rate not reachable");
  double lo = 0.0, hi = kBesselJ1FirstMax;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(1.0, mid) < target ? lo : hi) = mid;
  }
  return 2.0 * omega * 0.5 * (lo + hi);
}

}  // namespace qlink::model
