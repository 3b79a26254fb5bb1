#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compsim/engine.hpp"
#include "compsim/testbench.hpp"

namespace compsim {

enum class Direction { Rising, Falling };

/// Times at which `trace` crosses `level` in the given direction, linearly
/// interpolated between the bracketing samples, in time order.
std::vector<double> crossing_times(std::span<const double> trace, std::span<const double> times, double level,
                                   Direction dir);

enum class Outcome { Plus, Minus, Undecided };

const char* outcome_name(Outcome o);

struct Decision {
  Outcome outcome = Outcome::Undecided;
  std::optional<double> t_decide;  // set only when decided
};

/// Outputs failed to separate by half a supply with the expected sign
/// before the next reset edge.
class NoDecision : public std::runtime_error {
 public:
  explicit NoDecision(const std::string& what) : std::runtime_error(what) {}
};

class WindowOutOfRange : public std::runtime_error {
 public:
  explicit WindowOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct DelayResult {
  Decision decision;
  double t_edge = 0.0;
  double delay = 0.0;  // t_decide - t_edge
};

/// Delay from the edge_index-th evaluation edge of `clk` (crossing 0.5 vdd
/// in `eval_dir`) to the first time |plus - minus| >= 0.5 vdd. When
/// `expected` is Plus or Minus only that sign counts. The search stops at
/// the next opposite clock crossing (the reset edge) or the end of the trace.
DelayResult propagation_delay(std::span<const double> clk, std::span<const double> plus,
                              std::span<const double> minus, std::span<const double> times, double vdd,
                              int edge_index, Outcome expected = Outcome::Undecided,
                              Direction eval_dir = Direction::Rising);

/// Mean of vdd * i_supply over [t0, t1] by trapezoidal quadrature, window
/// ends interpolated. i_supply is the current delivered by the supply.
double average_power(std::span<const double> i_supply, std::span<const double> times, double vdd, double t0,
                     double t1);

/// Current delivered into the circuit by the named source (the negated
/// MNA branch current).
std::vector<double> supply_current(const WaveformSet& w, std::string_view source);

struct MetricsRow {
  std::string comparator;
  double power_w = 0.0;
  double delay_s = 0.0;
  double pdp_j = 0.0;
  std::optional<double> offset_v;
  Outcome decision = Outcome::Undecided;
  TestbenchConfig config;
};

/// Builds a row with pdp_j = power_w * delay_s.
MetricsRow make_metrics_row(std::string comparator, double power_w, double delay_s, Outcome decision,
                            const TestbenchConfig& tb);

}  // namespace compsim
