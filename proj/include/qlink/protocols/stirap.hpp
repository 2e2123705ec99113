#pragma once

#include <vector>

#include "qlink/protocols/link.hpp"

namespace qlink::protocols {

struct StirapResult {
  double fidelity = 0;          ///< receiver excited population at the end
  double max_link_population = 0;  ///< largest total link-mode occupation on the sampled grid
  double end_time = 0;
};

/// Gaussian pulses of width sigma and peak amplitude A (0 = working
/// amplitude). The receiver pulse is centred at 5 sigma, the sender pulse
/// delta_t later; the protocol ends 5 sigma after the sender centre.
StirapResult stirap_transfer(const Link& link, int sender, double sigma, double delta_t, double amplitude = 0,
                             int samples = 2);

struct StirapScan {
  int sender = 1;
  std::vector<double> sigmas;
  std::vector<double> delta_ts;
  std::vector<std::vector<double>> fidelity;  ///< [sigma][delta_t]
  double best_fidelity = 0;
  double best_sigma = 0;
  double best_delta_t = 0;
};

StirapScan stirap_scan(const Link& link, int sender, const std::vector<double>& sigmas,
                       const std::vector<double>& delta_ts, double amplitude = 0, int workers = 1);

}  // namespace qlink::protocols
