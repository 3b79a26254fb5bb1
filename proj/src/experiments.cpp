#include "compsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "compsim/parallel.hpp"
#include "compsim/units.hpp"

namespace compsim {

Netlist build_with_mismatch(ComparatorKind kind, const TestbenchConfig& tb, const VthDeltas& deltas) {
  Netlist n = build_netlist(kind, tb);
  for (const auto& [name, dv] : deltas) {
    DeviceInstance* hit = nullptr;
    for (auto& d : n.devices) {
      if (iequals(d.name, name) || iequals(d.name.substr(1), name)) hit = &d;
    }
    if (hit == nullptr) {
      throw std::invalid_argument("threshold offset names unknown device '" + name + "' for " +
                                  std::string(kind_id(kind)));
    }
    hit->vth_delta = dv;
  }
  return n;
}

WaveformSet simulate(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg, const VthDeltas& deltas) {
  return transient(build_with_mismatch(kind, tb, deltas), cfg);
}

PeriodReport analyze_period(ComparatorKind kind, const TestbenchConfig& tb, const WaveformSet& w, int k) {
  const ComparatorInfo& info = comparator_info(kind);
  const double t_reset = tb.reset_start(k);
  const double t_next = tb.reset_start(k + 1);
  if (k < 0 || t_next > w.times.back() * (1 + 1e-12)) {
    throw WindowOutOfRange("period " + std::to_string(k) + " is not fully simulated");
  }
  PeriodReport r;
  const auto& plus = w.node(info.plus_output);
  const auto& minus = w.node(info.minus_output);
  const Outcome expected = tb.dvin > 0 ? Outcome::Plus : tb.dvin < 0 ? Outcome::Minus : Outcome::Undecided;
  try {
    r.delay = propagation_delay(w.node(info.eval_clock), plus, minus, w.times, tb.vdd, k, expected);
  } catch (const NoDecision&) {
  }

  const auto isup = supply_current(w, kSupplySource);
  r.power_w = average_power(isup, w.times, tb.vdd, t_reset, t_next);
  for (const auto& c : info.reset_checks) r.reset_values.emplace_back(c.node, w.value_at(c.node, tb.eval_start(k)));
  r.plus_final = w.value_at(info.plus_output, t_next);
  r.minus_final = w.value_at(info.minus_output, t_next);

  const double late_start = t_next - 0.2 * (t_next - tb.eval_start(k));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = w.times[i];
    if (t < t_reset || t > t_next) continue;
    const double p = std::fabs(tb.vdd * isup[i]);
    r.peak_power = std::max(r.peak_power, p);
    if (t >= late_start) r.late_power = std::max(r.late_power, p);
  }

  if (r.delay) {
    const double t_dec = *r.delay->decision.t_decide;
    const bool want_plus = r.delay->decision.outcome == Outcome::Plus;
    r.latch_held = true;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w.times[i] <= t_dec || w.times[i] > t_next) continue;
      const double d = plus[i] - minus[i];
      if ((want_plus && d <= 0) || (!want_plus && d >= 0)) r.latch_held = false;
    }
  }
  return r;
}

MetricsRow run_metrics(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg) {
  const std::string id(kind_id(kind));
  WaveformSet w;
  try {
    w = simulate(kind, tb, cfg);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.time(), id + ": " + e.what());
  }
  return metrics_from_waveforms(kind, tb, w);
}

MetricsRow metrics_from_waveforms(ComparatorKind kind, const TestbenchConfig& tb, const WaveformSet& w) {
  const std::string id(kind_id(kind));
  const int k = tb.measured_period();
  const PeriodReport r = analyze_period(kind, tb, w, k);
  if (!r.delay) {
    throw NoDecision(id + ": outputs did not resolve in evaluation phase " + std::to_string(k));
  }
  return make_metrics_row(id, r.power_w, r.delay->delay, r.delay->decision.outcome, tb);
}

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Dvin: return "dvin";
    case SweepAxis::Vcm: return "vcm";
    case SweepAxis::Vdd: return "vdd";
  }
  return "dvin";
}

std::optional<SweepAxis> parse_axis(std::string_view s) {
  for (SweepAxis a : {SweepAxis::Dvin, SweepAxis::Vcm, SweepAxis::Vdd}) {
    if (iequals(axis_name(a), s)) return a;
  }
  return std::nullopt;
}

void check_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: no values given");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) throw std::invalid_argument("sweep: values must be strictly increasing");
  }
}

TestbenchConfig sweep_point(const TestbenchConfig& base, SweepAxis axis, double value) {
  TestbenchConfig tb = base;
  switch (axis) {
    case SweepAxis::Dvin:
      tb.dvin = value;
      break;
    case SweepAxis::Vcm:
      tb.vcm = value;
      tb.dvin = 10e-3;
      break;
    case SweepAxis::Vdd:
      tb.vdd = value;
      tb.vcm = 0.5 * value;
      break;
  }
  return tb;
}

std::string status_for(const std::exception& e) {
  if (dynamic_cast<const NoDecision*>(&e) != nullptr) return "no_decision";
  if (dynamic_cast<const ConvergenceError*>(&e) != nullptr) return "convergence_error";
  return "error";
}

std::vector<SweepRow> run_sweep(ComparatorKind kind, const SweepSpec& spec, const TestbenchConfig& tb,
                                const SimConfig& cfg) {
  return run_sweep(std::vector<ComparatorKind>{kind}, spec, tb, cfg);
}

std::vector<SweepRow> run_sweep(const std::vector<ComparatorKind>& kinds, const SweepSpec& spec,
                                const TestbenchConfig& tb, const SimConfig& cfg) {
  check_sweep(spec);
  const std::size_t npts = spec.values.size();
  std::vector<SweepRow> rows(kinds.size() * npts);
  parallel_for(rows.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.kind = kinds[i / npts];
    row.axis_value = spec.values[i % npts];
    try {
      row.metrics = run_metrics(row.kind, sweep_point(tb, spec.axis, row.axis_value), cfg);
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = status_for(e);
      row.message = e.what();
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << "kind,axis,axis_value,delay_s,power_w,pdp_j,status\n";
  for (const auto& r : rows) {
    out << kind_id(r.kind) << ',' << axis_name(axis) << ',' << format_double(r.axis_value) << ',';
    if (r.metrics) {
      out << format_double(r.metrics->delay_s) << ',' << format_double(r.metrics->power_w) << ','
          << format_double(r.metrics->pdp_j);
    } else {
      out << "nan,nan,nan";
    }
    out << ',' << r.status << '\n';
  }
}

const PublishedFigures& published_figures(ComparatorKind kind) {
  static const PublishedFigures table[4] = {
      {"150.11", "12.15", "1.55", "1.82"},
      {"114.47", "16.81", "1.82", "1.92"},
      {"222.18", "16.93", "3.34", "3.76"},
      {"73.36", "12.63", "1.69", "0.926"},
  };
  return table[static_cast<std::size_t>(kind)];
}

std::vector<ComparisonRow> comparison_table(const TestbenchConfig& tb, const SimConfig& cfg,
                                            const std::optional<McOptions>& mc) {
  if (mc) check_mc(*mc);
  std::vector<ComparisonRow> rows(kAllKinds.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    ComparisonRow& row = rows[i];
    row.kind = kAllKinds[i];
    try {
      row.metrics = run_metrics(row.kind, tb, cfg);
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = status_for(e);
      row.message = e.what();
    }
  });
  // Monte-Carlo parallelises internally, so run the kinds one after another.
  if (mc) {
    for (auto& row : rows) {
      try {
        row.offset = mc_offset(row.kind, tb, cfg, *mc);
        if (row.metrics) row.metrics->offset_v = row.offset->offset_sigma;
      } catch (const std::exception& e) {
        if (row.status == "ok") {
          row.status = status_for(e);
          row.message = e.what();
        }
      }
    }
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "comparator,power_w,delay_s,pdp_j,offset_v,status,paper_reference_power_uw,paper_reference_delay_ps,"
         "paper_reference_offset_mv,paper_reference_pdp_fj\n";
  for (const auto& r : rows) {
    out << kind_id(r.kind) << ',';
    if (r.metrics) {
      out << format_double(r.metrics->power_w) << ',' << format_double(r.metrics->delay_s) << ','
          << format_double(r.metrics->pdp_j) << ',';
    } else {
      out << "nan,nan,nan,";
    }
    const std::optional<double> off = r.offset ? r.offset->offset_sigma : std::nullopt;
    out << (off ? format_double(*off) : std::string()) << ',' << r.status;
    const PublishedFigures& p = published_figures(r.kind);
    out << ',' << p.power_uw << ',' << p.delay_ps << ',' << p.offset_mv << ',' << p.pdp_fj << '\n';
  }
}

}  // namespace compsim
