#include "qlink/model/device.hpp"

#include "qlink/core/error.hpp"

namespace qlink::model {

void DeviceParams::validate() const {
  if (!(nu_q > 0 && alpha > 0 && nu_r > 0 && nu_c > 0))
    throw InvalidArgument("DeviceParams: frequencies must be positive");
  for (double f : nu_m)
    if (!(f > 0)) throw InvalidArgument("DeviceParams: memory frequencies must be positive");
  if (g_qc < 0 || g_qr < 0 || g_qm < 0) throw InvalidArgument("DeviceParams: negative coupling");
  if (!(T1 > 0 && T2 > 0)) throw InvalidArgument("DeviceParams: coherence times must be positive");
  if (T2 > 2.0 * T1 * (1.0 + 1e-12)) throw InvalidArgument("DeviceParams: T2 exceeds 2*T1");
}

void InterconnectParams::validate() const {
  if (!(nu_c > 0)) throw InvalidArgument("InterconnectParams: nu_c must be positive");
  if (!(g_l > 0)) throw InvalidArgument("InterconnectParams: g_l must be positive");
  if (kappa_bright < 0 || kappa_dark < 0) throw InvalidArgument("InterconnectParams: negative decay rate");
  if (dark_T2 < 0) throw InvalidArgument("InterconnectParams: negative dark_T2");
  if (dark_T2 > 0 && kappa_dark > 0 && dark_T2 > 2.0 / kappa_dark * (1.0 + 1e-12))
    throw InvalidArgument("InterconnectParams: dark_T2 exceeds 2*T1 of the dark mode");
}

DeviceParams default_chip(int index) {
  DeviceParams p;
  // Eight memory modes spread over 5.9 - 7.6 GHz.
  for (int m = 0; m < 8; ++m) p.nu_m.push_back(5.9e9 + m * (1.7e9 / 7.0));
  p.nu_c = 7.88e9;
  p.g_qc = 50e6;
  p.g_qr = 50e6;
  p.g_qm = 50e6;
  if (index == 0) {
    p.nu_q = 4.7685e9;
    p.alpha = 109.8e6;
    p.nu_r = 5.7463e9;
    p.T1 = 10.1e-6;
    p.T2 = 0.7e-6;
  } else if (index == 1) {
    p.nu_q = 4.7420e9;
    p.alpha = 109.9e6;
    p.nu_r = 5.7405e9;
    p.T1 = 7.9e-6;
    p.T2 = 1.4e-6;
  } else {
    throw InvalidArgument("default_chip: index must be 0 or 1");
  }
  return p;
}

InterconnectParams default_interconnect() {
  InterconnectParams p;
  p.nu_c = 7.88e9;
  p.delta = 4.25e6;
  p.g_l = 6.46e6;
  p.kappa_bright = 1.0 / 200e-9;
  p.kappa_dark = 1.0 / 550e-9;
  p.dark_T2 = 1.0e-6;
  return p;
}

}  // namespace qlink::model
