#include "compsim/offset.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "compsim/experiments.hpp"
#include "compsim/parallel.hpp"
#include "compsim/units.hpp"

namespace compsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void check_mc(const McOptions& mc) {
  if (mc.n_samples < 1) throw std::invalid_argument("mc: n_samples must be >= 1");
  if (!(mc.sigma_vth0 >= 0) || !std::isfinite(mc.sigma_vth0)) throw std::invalid_argument("mc: sigma_vth0 must be >= 0");
}

Outcome trip_decision(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg,
                      const std::map<std::string, double>& deltas, double dvin) {
  TestbenchConfig one = tb;
  one.n_periods = 1;
  one.dvin = dvin;
  const Netlist n = build_with_mismatch(kind, one, deltas);
  const ComparatorInfo& info = comparator_info(kind);
  const NodeId plus = n.node(info.plus_output);
  const NodeId minus = n.node(info.minus_output);
  const double t_eval = one.eval_start(0);
  const double half = 0.5 * one.vdd;

  SimConfig c = cfg;
  c.tstop = 0.0;
  double diff = 0.0;
  transient(n, c, [&](const SystemState& s) {
    diff = s.node_voltages[plus] - s.node_voltages[minus];
    return !(s.time > t_eval && std::fabs(diff) >= half);
  });
  return diff > 0 ? Outcome::Plus : Outcome::Minus;
}

double find_trip_point(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg,
                       const std::map<std::string, double>& deltas) {
  double lo = -kTripSearchLimit;
  double hi = kTripSearchLimit;
  if (trip_decision(kind, tb, cfg, deltas, lo) != Outcome::Minus ||
      trip_decision(kind, tb, cfg, deltas, hi) != Outcome::Plus) {
    throw TripNotBracketed(std::string(kind_id(kind)) + ": decision does not flip within +/-" +
                           format_double(kTripSearchLimit) + " V");
  }
  while (hi - lo > kTripResolution) {
    const double mid = 0.5 * (lo + hi);
    if (trip_decision(kind, tb, cfg, deltas, mid) == Outcome::Plus) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::map<std::string, double> draw_vth_deltas(ComparatorKind kind, const TestbenchConfig& tb, double sigma_vth0,
                                              std::uint64_t seed, std::uint64_t index) {
  const Netlist n = build_netlist(kind, tb);
  std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ index));
  std::normal_distribution<double> z(0.0, 1.0);
  std::map<std::string, double> out;
  for (const auto& d : n.devices) {
    out[d.name] = sigma_vth0 / std::sqrt(static_cast<double>(d.nfin)) * z(rng);
  }
  return out;
}

OffsetResult mc_offset(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg, const McOptions& mc) {
  check_mc(mc);
  check_testbench(tb);
  OffsetResult r;
  r.trip_points.resize(static_cast<std::size_t>(mc.n_samples));
  parallel_for(r.trip_points.size(), [&](std::size_t i) {
    try {
      const auto deltas = draw_vth_deltas(kind, tb, mc.sigma_vth0, mc.seed, i);
      r.trip_points[i] = find_trip_point(kind, tb, cfg, deltas);
    } catch (const TripNotBracketed&) {
    } catch (const ConvergenceError&) {
    }
  });

  std::vector<double> ok;
  for (const auto& t : r.trip_points) {
    if (t) ok.push_back(*t);
  }
  r.failed = mc.n_samples - static_cast<int>(ok.size());
  if (ok.size() >= 2) {
    double mean = 0.0;
    for (double v : ok) mean += v;
    mean /= static_cast<double>(ok.size());
    double ss = 0.0;
    for (double v : ok) ss += (v - mean) * (v - mean);
    r.offset_sigma = std::sqrt(ss / static_cast<double>(ok.size() - 1));
  }
  return r;
}

void write_offset_csv(std::ostream& out, const OffsetResult& r) {
  out << "sample,trip_v\n";
  for (std::size_t i = 0; i < r.trip_points.size(); ++i) {
    out << i << ',' << (r.trip_points[i] ? format_double(*r.trip_points[i]) : std::string("nan")) << '\n';
  }
  out << "sigma," << (r.offset_sigma ? format_double(*r.offset_sigma) : std::string("nan")) << '\n';
}

}  // namespace compsim
