#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compsim/circuits.hpp"
#include "compsim/engine.hpp"
#include "compsim/measure.hpp"
#include "compsim/offset.hpp"

namespace compsim {

/// Per-device threshold offsets keyed by device name (with or without 'M').
using VthDeltas = std::map<std::string, double>;

/// build_netlist plus the given threshold offsets applied.
Netlist build_with_mismatch(ComparatorKind kind, const TestbenchConfig& tb, const VthDeltas& deltas);

WaveformSet simulate(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg,
                     const VthDeltas& deltas = {});

/// Everything observed about one clock period k of a finished run.
struct PeriodReport {
  std::optional<DelayResult> delay;  // empty when the outputs never separated
  double power_w = 0.0;              // average over [reset_start(k), reset_start(k+1)]
  std::vector<std::pair<std::string, double>> reset_values;  // at the evaluation edge
  double plus_final = 0.0;   // plus output just before the next reset edge
  double minus_final = 0.0;
  bool latch_held = false;   // differential sign constant from t_decide to the reset edge
  double peak_power = 0.0;   // max |vdd * i_supply| over the period
  double late_power = 0.0;   // max |vdd * i_supply| over the last 20% of evaluation
};

PeriodReport analyze_period(ComparatorKind kind, const TestbenchConfig& tb, const WaveformSet& w, int k);

/// Simulates tb, measures delay from the evaluation edge of the measured
/// period and power over that whole period. dvin's sign fixes the expected
/// outcome. ConvergenceError and NoDecision are rethrown with the
/// comparator id prefixed to the message.
MetricsRow run_metrics(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg);
/// The measurement half of run_metrics, on an existing run of tb.
MetricsRow metrics_from_waveforms(ComparatorKind kind, const TestbenchConfig& tb, const WaveformSet& w);

enum class SweepAxis { Dvin, Vcm, Vdd };

const char* axis_name(SweepAxis a);
std::optional<SweepAxis> parse_axis(std::string_view s);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Dvin;
  std::vector<double> values;
};

/// Throws std::invalid_argument unless values are nonempty and strictly increasing.
void check_sweep(const SweepSpec& spec);

/// Testbench for one sweep point: dvin keeps vcm; vcm holds dvin at 10 mV;
/// vdd sets vcm = vdd / 2.
TestbenchConfig sweep_point(const TestbenchConfig& base, SweepAxis axis, double value);

struct SweepRow {
  ComparatorKind kind = ComparatorKind::Proposed;
  double axis_value = 0.0;
  std::optional<MetricsRow> metrics;
  std::string status;  // ok | no_decision | convergence_error | error
  std::string message;
};

std::vector<SweepRow> run_sweep(ComparatorKind kind, const SweepSpec& spec, const TestbenchConfig& tb,
                                const SimConfig& cfg);
/// All kinds over all points, kind-major in the order given.
std::vector<SweepRow> run_sweep(const std::vector<ComparatorKind>& kinds, const SweepSpec& spec,
                                const TestbenchConfig& tb, const SimConfig& cfg);

/// `kind,axis,axis_value,delay_s,power_w,pdp_j,status`; failed points carry nan.
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

/// Published figures for each design, kept as the literal strings.
struct PublishedFigures {
  const char* power_uw;
  const char* delay_ps;
  const char* offset_mv;
  const char* pdp_fj;
};
const PublishedFigures& published_figures(ComparatorKind kind);

struct ComparisonRow {
  ComparatorKind kind = ComparatorKind::Proposed;
  std::optional<MetricsRow> metrics;
  std::optional<OffsetResult> offset;
  std::string status;
  std::string message;
};

/// One row per kind in kAllKinds order. Offsets are computed only when mc is set.
std::vector<ComparisonRow> comparison_table(const TestbenchConfig& tb, const SimConfig& cfg,
                                            const std::optional<McOptions>& mc = std::nullopt);

/// comparator,power_w,delay_s,pdp_j,offset_v,status, then the published
/// figures as paper_reference_* columns.
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Short status tag for an exception thrown by run_metrics.
std::string status_for(const std::exception& e);

}  // namespace compsim
