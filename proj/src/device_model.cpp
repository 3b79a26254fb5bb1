#include "compsim/device_model.hpp"

#include <cmath>
#include <stdexcept>

namespace compsim {

FinFetParams default_n_card() { return FinFetParams{}; }

FinFetParams default_p_card() {
  FinFetParams p;
  p.vth0 = 0.25;
  p.n_slope = 1.20;
  p.k_tc = 300e-6;
  p.lambda_clm = 0.20;
  return p;
}

void check_card(const FinFetParams& p) {
  if (!(p.k_tc > 0)) throw std::invalid_argument("model card: k_tc must be > 0");
  if (!(p.n_slope >= 1)) throw std::invalid_argument("model card: n_slope must be >= 1");
  if (!(p.lambda_clm >= 0)) throw std::invalid_argument("model card: lambda_clm must be >= 0");
  if (!(p.cgs_fin >= 0 && p.cgd_fin >= 0 && p.cdb_fin >= 0)) {
    throw std::invalid_argument("model card: capacitances must be >= 0");
  }
  if (!(p.phi_t > 0)) throw std::invalid_argument("model card: phi_t must be > 0");
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// N-type current for vds >= 0.
DeviceEval forward(double vg, double vd, double vs, int nfin, double vth_delta, const FinFetParams& p) {
  const double nphi = p.n_slope * p.phi_t;
  const double vt = p.vth0 + vth_delta;
  const double xs = (vg - vs - vt) / nphi;
  const double xd = (vg - vd - vt) / nphi;
  const double qs = softplus(xs);
  const double qd = softplus(xd);
  const double dqs = logistic(xs) / nphi;  // d qs / d vg
  const double dqd = logistic(xd) / nphi;  // d qd / d vg

  const double scale = nfin * p.k_tc * p.n_slope * p.phi_t * p.phi_t;
  const double charge = (qs - qd) * (qs + qd);
  const double clm = 1.0 + p.lambda_clm * (vd - vs);

  DeviceEval e;
  e.id = scale * charge * clm;
  e.gm = scale * clm * 2.0 * (qs * dqs - qd * dqd);
  e.gds = scale * (clm * 2.0 * qd * dqd + charge * p.lambda_clm);
  e.gms = scale * (-clm * 2.0 * qs * dqs - charge * p.lambda_clm);
  return e;
}

DeviceEval n_type(double vg, double vd, double vs, int nfin, double vth_delta, const FinFetParams& p) {
  if (vd >= vs) return forward(vg, vd, vs, nfin, vth_delta, p);
  // Swap roles of drain and source.
  const DeviceEval r = forward(vg, vs, vd, nfin, vth_delta, p);
  return {-r.id, -r.gm, -r.gms, -r.gds};
}

}  // namespace

DeviceEval drain_current(Polarity polarity, double vg, double vd, double vs, int nfin, double vth_delta,
                         const FinFetParams& p) {
  if (polarity == Polarity::N) return n_type(vg, vd, vs, nfin, vth_delta, p);
  // id_P(v) = -id_N(-v); each partial picks up two sign flips.
  const DeviceEval m = n_type(-vg, -vd, -vs, nfin, vth_delta, p);
  return {-m.id, m.gm, m.gds, m.gms};
}

DeviceCaps device_capacitances(Polarity /*polarity*/, int nfin, const FinFetParams& p) {
  return {nfin * p.cgs_fin, nfin * p.cgd_fin, nfin * p.cdb_fin};
}

}  // namespace compsim
