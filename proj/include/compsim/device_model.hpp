#pragma once

#include "compsim/netlist.hpp"

namespace compsim {

/// Analytic FinFET card. Currents follow a charge-based (EKV-style) form
/// that is C1-continuous from subthreshold through strong inversion.
struct FinFetParams {
  double vth0 = 0.25;        // V
  double n_slope = 1.15;     // subthreshold slope factor
  double k_tc = 450e-6;      // A/V^2 per fin
  double lambda_clm = 0.15;  // 1/V
  double cgs_fin = 0.05e-15;
  double cgd_fin = 0.05e-15;
  double cdb_fin = 0.03e-15;
  double phi_t = 0.02585;  // thermal voltage at 300 K

  bool operator==(const FinFetParams&) const = default;
};

FinFetParams default_n_card();
FinFetParams default_p_card();

struct ModelCards {
  FinFetParams n = default_n_card();
  FinFetParams p = default_p_card();

  const FinFetParams& card(Polarity pol) const { return pol == Polarity::N ? n : p; }
  bool operator==(const ModelCards&) const = default;
};

/// Throws std::invalid_argument when a card violates k_tc > 0, n_slope >= 1,
/// lambda_clm >= 0, capacitances >= 0 or phi_t > 0.
void check_card(const FinFetParams& p);

/// Drain current (drain -> source, conventional) and its exact partials.
struct DeviceEval {
  double id = 0.0;
  double gm = 0.0;   // d id / d vg
  double gds = 0.0;  // d id / d vd
  double gms = 0.0;  // d id / d vs
};

/// ln(1 + e^x) without overflow or loss of small values.
double softplus(double x);

DeviceEval drain_current(Polarity polarity, double vg, double vd, double vs, int nfin, double vth_delta,
                         const FinFetParams& p);

struct DeviceCaps {
  double cgs = 0.0;
  double cgd = 0.0;
  double cdb = 0.0;
};

DeviceCaps device_capacitances(Polarity polarity, int nfin, const FinFetParams& p);

}  // namespace compsim
