#include "compsim/measure.hpp"

#include <algorithm>
#include <cmath>

#include "compsim/units.hpp"

namespace compsim {

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": trace and time lengths differ");
}

double lerp_at(std::span<const double> y, std::span<const double> t, double at) {
  auto it = std::lower_bound(t.begin(), t.end(), at);
  if (it == t.end()) return y.back();
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  if (j == 0 || *it == at) return y[j];
  const double f = (at - t[j - 1]) / (t[j] - t[j - 1]);
  return y[j - 1] + f * (y[j] - y[j - 1]);
}

}  // namespace

std::vector<double> crossing_times(std::span<const double> trace, std::span<const double> times, double level,
                                   Direction dir) {
  check_aligned(trace.size(), times.size(), "crossing_times");
  std::vector<double> out;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double a = trace[i - 1] - level;
    const double b = trace[i] - level;
    const bool hit = dir == Direction::Rising ? (a < 0 && b >= 0) : (a > 0 && b <= 0);
    if (!hit) continue;
    const double f = a / (a - b);
    out.push_back(times[i - 1] + f * (times[i] - times[i - 1]));
  }
  return out;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Plus: return "plus";
    case Outcome::Minus: return "minus";
    case Outcome::Undecided: return "undecided";
  }
  return "undecided";
}

DelayResult propagation_delay(std::span<const double> clk, std::span<const double> plus,
                              std::span<const double> minus, std::span<const double> times, double vdd,
                              int edge_index, Outcome expected, Direction eval_dir) {
  check_aligned(clk.size(), times.size(), "propagation_delay");
  check_aligned(plus.size(), times.size(), "propagation_delay");
  check_aligned(minus.size(), times.size(), "propagation_delay");
  const double mid = 0.5 * vdd;
  const auto edges = crossing_times(clk, times, mid, eval_dir);
  if (edge_index < 0 || static_cast<std::size_t>(edge_index) >= edges.size()) {
    throw NoDecision("evaluation edge " + std::to_string(edge_index) + " not found in the clock trace");
  }
  const double t_edge = edges[static_cast<std::size_t>(edge_index)];
  const Direction back = eval_dir == Direction::Rising ? Direction::Falling : Direction::Rising;
  double t_end = times.back();
  for (double t : crossing_times(clk, times, mid, back)) {
    if (t > t_edge) {
      t_end = t;
      break;
    }
  }

  auto meets = [&](double d) {
    if (expected == Outcome::Plus) return d >= mid;
    if (expected == Outcome::Minus) return d <= -mid;
    return std::fabs(d) >= mid;
  };
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= t_edge) continue;
    if (times[i - 1] > t_end) break;
    const double d1 = plus[i] - minus[i];
    if (!meets(d1)) continue;
    const double d0 = plus[i - 1] - minus[i - 1];
    double t = times[i];
    if (!meets(d0)) {
      // interpolate to the threshold the sample pair straddles
      const double target = d1 >= 0 ? mid : -mid;
      t = times[i - 1] + (target - d0) / (d1 - d0) * (times[i] - times[i - 1]);
    }
    t = std::max(t, t_edge);
    if (t > t_end) break;
    DelayResult r;
    r.decision.outcome = d1 > 0 ? Outcome::Plus : Outcome::Minus;
    r.decision.t_decide = t;
    r.t_edge = t_edge;
    r.delay = t - t_edge;
    return r;
  }
  throw NoDecision("outputs did not separate by " + format_double(mid) + " V between " + format_double(t_edge) +
                   " s and " + format_double(t_end) + " s");
}

double average_power(std::span<const double> i_supply, std::span<const double> times, double vdd, double t0,
                     double t1) {
  check_aligned(i_supply.size(), times.size(), "average_power");
  if (times.empty() || !(t1 > t0) || t0 < times.front() || t1 > times.back()) {
    throw WindowOutOfRange("power window [" + format_double(t0) + ", " + format_double(t1) +
                           "] s is outside the simulated range");
  }
  double area = 0.0;
  double tp = t0;
  double ip = lerp_at(i_supply, times, t0);
  auto it = std::upper_bound(times.begin(), times.end(), t0);
  for (std::size_t j = static_cast<std::size_t>(it - times.begin()); j < times.size() && times[j] < t1; ++j) {
    area += 0.5 * (ip + i_supply[j]) * (times[j] - tp);
    tp = times[j];
    ip = i_supply[j];
  }
  area += 0.5 * (ip + lerp_at(i_supply, times, t1)) * (t1 - tp);
  return vdd * area / (t1 - t0);
}

std::vector<double> supply_current(const WaveformSet& w, std::string_view source) {
  std::vector<double> out = w.source_current(source);
  for (double& v : out) v = -v;
  return out;
}

MetricsRow make_metrics_row(std::string comparator, double power_w, double delay_s, Outcome decision,
                            const TestbenchConfig& tb) {
  MetricsRow r;
  r.comparator = std::move(comparator);
  r.power_w = power_w;
  r.delay_s = delay_s;
  r.pdp_j = power_w * delay_s;
  r.decision = decision;
  r.config = tb;
  return r;
}

}  // namespace compsim
