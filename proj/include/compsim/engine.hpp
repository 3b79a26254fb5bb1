#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "compsim/device_model.hpp"
#include "compsim/linear.hpp"
#include "compsim/netlist.hpp"

namespace compsim {

struct SimConfig {
  double dt = 5e-14;
  double tstop = 0.0;  // 0: take step and stop from the netlist's .tran
  double newton_tol_v = 1e-9;
  double newton_tol_i = 1e-12;
  int max_newton_iters = 60;
  double gmin = 1e-12;
  int gmin_steps = 10;
  int max_halvings = 4;
  ModelCards models;
};

/// Throws std::invalid_argument on non-positive step or tolerances.
void check_config(const SimConfig& cfg);

struct SystemState {
  double time = 0.0;
  std::vector<double> node_voltages;    // indexed by NodeId, entry 0 is ground
  std::vector<double> branch_currents;  // one per source, plus -> minus through the source
};

struct TransientStats {
  std::size_t accepted_steps = 0;
  std::size_t newton_iterations = 0;
  std::size_t halved_steps = 0;
  double max_kcl_residual = 0.0;  // A, worst converged node residual
  bool stopped_early = false;
};

/// Time-aligned traces. node_traces[id] follows the netlist node table
/// (ground included); source_currents[k] follows netlist.sources.
struct WaveformSet {
  std::vector<double> times;
  std::vector<std::string> node_names;
  std::vector<std::vector<double>> node_traces;
  std::vector<std::string> source_names;
  std::vector<std::vector<double>> source_currents;
  TransientStats stats;

  const std::vector<double>& node(std::string_view name) const;
  const std::vector<double>& source_current(std::string_view name) const;
  /// Linear interpolation of a node voltage at time t (clamped to the range).
  double value_at(std::string_view node_name, double t) const;
  SystemState state(std::size_t step) const;
  std::size_t size() const { return times.size(); }
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

double evaluate_source(const SourceSpec& spec, double t);
inline double evaluate_source(const VoltageSource& s, double t) { return evaluate_source(s.spec, t); }

/// Corner times of every pulse source in [0, tstop], sorted and de-duplicated.
std::vector<double> source_breakpoints(const Netlist& n, double tstop);

SystemState dc_operating_point(const Netlist& n, const SimConfig& cfg);

/// Called after every accepted step; returning false ends the run early.
using StepObserver = std::function<bool(const SystemState&)>;

WaveformSet transient(const Netlist& n, const SimConfig& cfg, const StepObserver& observer = {});

/// `time_s,<node>...,i(<source>)...`, one row per accepted step.
void write_waveform_csv(std::ostream& out, const WaveformSet& w);

}  // namespace compsim
