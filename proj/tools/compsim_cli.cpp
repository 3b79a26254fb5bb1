// compsim: command-line front end for the comparator simulator.

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "compsim/config.hpp"
#include "compsim/experiments.hpp"
#include "compsim/units.hpp"

using namespace compsim;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitNoDecision = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double eng(const std::string& flag, const std::string& text) {
  const auto v = parse_eng(text);
  if (!v) throw UsageError("--" + flag + ": not a number: '" + text + "'");
  return *v;
}

/// Testbench and simulator flags shared by the measuring subcommands.
struct TbFlags {
  std::string config;
  std::string vdd, vcm, dvin, fclk, duty, edge, cload, nonoverlap, dt;
  int periods = 0;
  std::vector<std::string> sizes;
  CLI::Option* periods_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key=value settings file (default: $COMPSIM_CONFIG)");
    app->add_option("--vdd", vdd, "supply voltage");
    app->add_option("--vcm", vcm, "input common-mode voltage");
    app->add_option("--dvin", dvin, "Vin - Vref");
    app->add_option("--fclk", fclk, "clock frequency");
    app->add_option("--duty", duty, "evaluation fraction of the period");
    app->add_option("--edge", edge, "clock rise/fall time");
    app->add_option("--cload", cload, "load capacitance per output");
    app->add_option("--nonoverlap", nonoverlap, "second-clock non-overlap");
    app->add_option("--dt", dt, "time step");
    periods_opt = app->add_option("--periods", periods, "clock periods to simulate");
    app->add_option("--size", sizes, "device fin override, e.g. F1=4 (repeatable)");
  }

  RunConfig resolve() const {
    RunConfig rc;
    std::string path = config;
    if (path.empty()) {
      if (const char* env = std::getenv("COMPSIM_CONFIG"); env != nullptr) path = env;
    }
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw InputError("cannot read config file " + path);
      try {
        load_config(in, rc);
      } catch (const ConfigError& e) {
        throw InputError(path + ": " + e.what());
      }
    }
    auto set = [](double& slot, const char* name, const std::string& text) {
      if (!text.empty()) slot = eng(name, text);
    };
    set(rc.tb.vdd, "vdd", vdd);
    set(rc.tb.vcm, "vcm", vcm);
    set(rc.tb.dvin, "dvin", dvin);
    set(rc.tb.fclk, "fclk", fclk);
    set(rc.tb.duty, "duty", duty);
    set(rc.tb.edge_time, "edge", edge);
    set(rc.tb.cload, "cload", cload);
    set(rc.tb.nonoverlap, "nonoverlap", nonoverlap);
    set(rc.sim.dt, "dt", dt);
    if (periods_opt->count() > 0) rc.tb.n_periods = periods;
    for (const auto& s : sizes) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--size expects DEVICE=NFIN, got '" + s + "'");
      const double n = eng("size", s.substr(eq + 1));
      if (n != static_cast<int>(n)) throw UsageError("--size fin count must be an integer: '" + s + "'");
      rc.tb.sizing[s.substr(0, eq)] = static_cast<int>(n);
    }
    try {
      check_testbench(rc.tb);
      check_config(rc.sim);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    return rc;
  }
};

json config_json(const TestbenchConfig& tb, const SimConfig& sim) {
  json sizing = json::object();
  for (const auto& [k, v] : tb.sizing) sizing[k] = v;
  return json{{"vdd", tb.vdd},         {"vcm", tb.vcm},
              {"dvin", tb.dvin},       {"fclk", tb.fclk},
              {"duty", tb.duty},       {"edge_time", tb.edge_time},
              {"cload", tb.cload},     {"n_periods", tb.n_periods},
              {"nonoverlap", tb.nonoverlap}, {"sizing", sizing},
              {"dt", sim.dt}};
}

json metrics_json(const MetricsRow& r, const SimConfig& sim) {
  json j;
  j["comparator"] = r.comparator;
  j["power_w"] = r.power_w;
  j["delay_s"] = r.delay_s;
  j["pdp_j"] = r.pdp_j;
  j["offset_v"] = r.offset_v ? json(*r.offset_v) : json(nullptr);
  j["decision"] = outcome_name(r.decision);
  j["config"] = config_json(r.config, sim);
  return j;
}

ComparatorKind kind_arg(const std::string& s) {
  const auto k = parse_kind(s);
  if (!k) throw UsageError("unknown comparator '" + s + "' (jeon2010, mashhadi2014, deepika2015, proposed)");
  return *k;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

int exit_for_failures(const std::vector<std::string>& statuses) {
  for (const auto& s : statuses) {
    if (s != "no_decision") return kExitNumeric;
  }
  return kExitNoDecision;
}

// ---- subcommands ----

int cmd_parse(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << '\n';
    return kExitInput;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const Netlist n = parse_netlist(ss.str());
    std::cout << "ok: " << n.element_count() << " elements, " << n.node_count() << " nodes\n";
    return kExitOk;
  } catch (const NetlistError& e) {
    std::cerr << "line " << e.line() << ": " << e.reason() << '\n';
    return kExitInput;
  }
}

struct RunFlags {
  std::string circuit, netlist, waves;
  std::string clock = "clk", plus = "outn", minus = "outp", supply = kSupplySource;
};

int cmd_run(const RunFlags& f, const TbFlags& tf) {
  if (f.circuit.empty() == f.netlist.empty()) throw UsageError("run needs exactly one of --circuit or --netlist");
  const RunConfig rc = tf.resolve();
  const TestbenchConfig& tb = rc.tb;
  MetricsRow row;
  WaveformSet w;
  if (!f.circuit.empty()) {
    const ComparatorKind kind = kind_arg(f.circuit);
    w = simulate(kind, tb, rc.sim);
    if (!f.waves.empty()) {
      auto out = open_out(f.waves);
      write_waveform_csv(out, w);
    }
    row = metrics_from_waveforms(kind, tb, w);
  } else {
    std::ifstream in(f.netlist);
    if (!in) throw InputError("cannot open " + f.netlist);
    std::stringstream ss;
    ss << in.rdbuf();
    Netlist n;
    try {
      n = parse_netlist(ss.str());
    } catch (const NetlistError& e) {
      throw InputError(f.netlist + ": line " + std::to_string(e.line()) + ": " + e.reason());
    }
    for (const std::string& node : {f.clock, f.plus, f.minus}) {
      if (!n.find_node(node)) throw InputError(f.netlist + ": no node named '" + node + "'");
    }
    if (!n.find_source(f.supply)) throw InputError(f.netlist + ": no source named '" + f.supply + "'");
    SimConfig sim = rc.sim;
    if (!n.tran) sim.tstop = tb.n_periods * tb.period();
    w = transient(n, sim);
    if (!f.waves.empty()) {
      auto out = open_out(f.waves);
      write_waveform_csv(out, w);
    }
    const int k = tb.measured_period();
    const Outcome expected = tb.dvin > 0 ? Outcome::Plus : tb.dvin < 0 ? Outcome::Minus : Outcome::Undecided;
    const DelayResult d =
        propagation_delay(w.node(f.clock), w.node(f.plus), w.node(f.minus), w.times, tb.vdd, k, expected);
    const double p = average_power(supply_current(w, f.supply), w.times, tb.vdd, tb.reset_start(k),
                                   tb.reset_start(k + 1));
    row = make_metrics_row(n.title.empty() ? f.netlist : n.title, p, d.delay, d.decision.outcome, tb);
  }
  std::cout << metrics_json(row, rc.sim).dump(2) << '\n';
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(eng("values", item));
  }
  return out;
}

std::vector<ComparatorKind> parse_kinds(const std::string& text) {
  if (text.empty() || iequals(text, "all")) return {kAllKinds.begin(), kAllKinds.end()};
  std::vector<ComparatorKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(kind_arg(item));
  }
  if (out.empty()) throw UsageError("--kinds lists no comparator");
  return out;
}

int cmd_sweep(const std::string& axis_text, const std::string& values, const std::string& kinds,
              const std::string& out_path, const TbFlags& tf) {
  const auto axis = parse_axis(axis_text);
  if (!axis) throw UsageError("--axis must be dvin, vcm or vdd");
  SweepSpec spec{*axis, parse_values(values)};
  try {
    check_sweep(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--values: ") + e.what());
  }
  const auto ks = parse_kinds(kinds);
  const RunConfig rc = tf.resolve();
  const auto rows = run_sweep(ks, spec, rc.tb, rc.sim);

  std::ostringstream csv;
  write_sweep_csv(csv, spec.axis, rows);
  write_file(out_path, csv.str());

  std::vector<std::string> failures;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      failures.push_back(r.status);
      std::cerr << "warning: " << kind_id(r.kind) << " at " << axis_name(spec.axis) << "="
                << format_double(r.axis_value) << ": " << r.message << '\n';
    }
  }
  json j{{"axis", axis_name(spec.axis)},
         {"points", rows.size()},
         {"failed", failures.size()},
         {"out", out_path},
         {"config", config_json(rc.tb, rc.sim)}};
  std::cout << j.dump(2) << '\n';
  return failures.size() == rows.size() ? exit_for_failures(failures) : kExitOk;
}

McOptions mc_options(const std::string& sigma, int samples, long long seed) {
  McOptions mc;
  mc.sigma_vth0 = eng("sigma-vth", sigma);
  mc.n_samples = samples;
  mc.seed = static_cast<std::uint64_t>(seed);
  if (mc.n_samples < 1) throw UsageError("--samples must be >= 1");
  if (mc.sigma_vth0 < 0) throw UsageError("--sigma-vth must be >= 0");
  return mc;
}

int cmd_mc(const std::string& circuit, const std::string& sigma, int samples, long long seed,
           const std::string& out_path, const TbFlags& tf) {
  const ComparatorKind kind = kind_arg(circuit);
  const McOptions mc = mc_options(sigma, samples, seed);
  const RunConfig rc = tf.resolve();
  const OffsetResult r = mc_offset(kind, rc.tb, rc.sim, mc);
  if (!out_path.empty()) {
    std::ostringstream csv;
    write_offset_csv(csv, r);
    write_file(out_path, csv.str());
  }
  if (r.failed > 0) {
    std::cerr << "warning: " << r.failed << " of " << mc.n_samples
              << " samples did not flip within the search interval\n";
  }
  json j;
  j["comparator"] = kind_id(kind);
  j["offset_v"] = r.offset_sigma ? json(*r.offset_sigma) : json(nullptr);
  j["samples"] = mc.n_samples;
  j["failed"] = r.failed;
  j["sigma_vth0"] = mc.sigma_vth0;
  j["seed"] = mc.seed;
  j["config"] = config_json(rc.tb, rc.sim);
  std::cout << j.dump(2) << '\n';
  return r.failed == mc.n_samples ? kExitNumeric : kExitOk;
}

int cmd_compare(const std::string& out_path, const std::string& sigma, int samples, long long seed,
                const TbFlags& tf) {
  std::optional<McOptions> mc;
  if (samples != 0 || !sigma.empty()) mc = mc_options(sigma.empty() ? "0" : sigma, samples, seed);
  const RunConfig rc = tf.resolve();
  const auto rows = comparison_table(rc.tb, rc.sim, mc);
  if (!out_path.empty()) {
    std::ostringstream csv;
    write_comparison_csv(csv, rows);
    write_file(out_path, csv.str());
  }
  json arr = json::array();
  std::vector<std::string> failures;
  for (const auto& r : rows) {
    json j;
    if (r.metrics) {
      j = metrics_json(*r.metrics, rc.sim);
      j.erase("config");
    } else {
      j["comparator"] = kind_id(r.kind);
      failures.push_back(r.status);
      std::cerr << "warning: " << r.message << '\n';
    }
    j["status"] = r.status;
    arr.push_back(j);
  }
  json out{{"rows", arr}, {"config", config_json(rc.tb, rc.sim)}};
  std::cout << out.dump(2) << '\n';
  return failures.size() == rows.size() ? exit_for_failures(failures) : kExitOk;
}

/// Joins "--flag -5m" into "--flag=-5m" so negative values with suffixes
/// are not mistaken for options.
std::vector<std::string> join_negative_values(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.starts_with("--") && a.find('=') == std::string::npos && i + 1 < args.size()) {
      const std::string& v = args[i + 1];
      if (v.size() > 1 && v[0] == '-' && (std::isdigit(static_cast<unsigned char>(v[1])) || v[1] == '.')) {
        out.push_back(a + "=" + v);
        ++i;
        continue;
      }
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transient simulator and measurement harness for dynamic latch comparators"};
  app.require_subcommand(1);

  std::string parse_path;
  auto* parse = app.add_subcommand("parse", "check a netlist and print element/node counts");
  parse->add_option("netlist", parse_path, "netlist file")->required();

  RunFlags rf;
  TbFlags run_tb;
  auto* run = app.add_subcommand("run", "simulate one comparator and print its metrics");
  run->add_option("--circuit", rf.circuit, "built-in comparator");
  run->add_option("--netlist", rf.netlist, "netlist file to simulate instead");
  run->add_option("--waves", rf.waves, "write waveforms to this CSV");
  run->add_option("--clock", rf.clock, "evaluation clock node (netlist mode)");
  run->add_option("--plus", rf.plus, "output that rises when Vin > Vref (netlist mode)");
  run->add_option("--minus", rf.minus, "output that falls when Vin > Vref (netlist mode)");
  run->add_option("--supply", rf.supply, "supply source name (netlist mode)");
  run_tb.attach(run);

  std::string axis, values, kinds, sweep_out;
  TbFlags sweep_tb;
  auto* sweep = app.add_subcommand("sweep", "sweep dvin, vcm or vdd and write a CSV");
  sweep->add_option("--axis", axis, "dvin | vcm | vdd")->required();
  sweep->add_option("--values", values, "comma-separated, strictly increasing")->required();
  sweep->add_option("--kinds", kinds, "comma-separated comparators or 'all'")->default_val("all");
  sweep->add_option("--out", sweep_out, "CSV output path")->required();
  sweep_tb.attach(sweep);

  std::string mc_circuit, mc_sigma, mc_out;
  int mc_samples = 0;
  long long mc_seed = 1;
  TbFlags mc_tb;
  auto* mc = app.add_subcommand("mc-offset", "Monte-Carlo input-referred offset");
  mc->add_option("--circuit", mc_circuit, "built-in comparator")->required();
  mc->add_option("--sigma-vth", mc_sigma, "threshold sigma of a single-fin device")->required();
  mc->add_option("--samples", mc_samples, "number of samples")->required();
  mc->add_option("--seed", mc_seed, "random seed");
  mc->add_option("--out", mc_out, "per-sample CSV output path");
  mc_tb.attach(mc);

  std::string cmp_out, cmp_sigma;
  int cmp_samples = 0;
  long long cmp_seed = 1;
  TbFlags cmp_tb;
  auto* cmp = app.add_subcommand("compare", "metrics of all four comparators");
  cmp->add_option("--out", cmp_out, "CSV output path");
  cmp->add_option("--sigma-vth", cmp_sigma, "threshold sigma for offset columns");
  cmp->add_option("--samples", cmp_samples, "Monte-Carlo samples per comparator");
  cmp->add_option("--seed", cmp_seed, "random seed");
  cmp_tb.attach(cmp);

  auto args = join_negative_values(argc, argv);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (parse->parsed()) return cmd_parse(parse_path);
    if (run->parsed()) return cmd_run(rf, run_tb);
    if (sweep->parsed()) return cmd_sweep(axis, values, kinds, sweep_out, sweep_tb);
    if (mc->parsed()) return cmd_mc(mc_circuit, mc_sigma, mc_samples, mc_seed, mc_out, mc_tb);
    if (cmp->parsed()) return cmd_compare(cmp_out, cmp_sigma, cmp_samples, cmp_seed, cmp_tb);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NoDecision& e) {
    std::cerr << "no decision: " << e.what() << '\n';
    return kExitNoDecision;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure at t=" << format_double(e.time()) << " s: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SingularMatrix& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
