#include "compsim/circuits.hpp"

#include <stdexcept>

#include "compsim/units.hpp"

namespace compsim {

namespace {

struct DeviceRow {
  const char* name;
  Polarity pol;
  const char* drain;
  const char* gate;
  const char* source;
  int nfin = 0;  // 0: polarity default
};

constexpr Polarity N = Polarity::N;
constexpr Polarity P = Polarity::P;

// Jeon2010: single clock. Precharged preamp (da, db) feeds two inverters
// whose outputs (ia, ib) drive a StrongARM-style output latch. xa and xb are
// the drains of the F12/F13 pull-downs, held at Vdd by F14/F15 during reset.
const std::vector<DeviceRow> kJeon{
    {"MF1", N, "tail", "clk", "0", kInputNfin}, {"MF2", N, "da", "vin", "tail", kInputNfin},
    {"MF3", N, "db", "vref", "tail", kInputNfin},
    {"MF4", P, "da", "clk", "vdd"},   {"MF5", P, "db", "clk", "vdd"},  {"MF16", P, "ia", "da", "vdd"},
    {"MF18", N, "ia", "da", "0"},     {"MF17", P, "ib", "db", "vdd"},  {"MF19", N, "ib", "db", "0"},
    {"MF10", P, "outn", "ia", "vdd"}, {"MF11", P, "outp", "ib", "vdd"}, {"MF14", P, "xa", "ia", "vdd"},
    {"MF15", P, "xb", "ib", "vdd"},   {"MF12", N, "xa", "ia", "0"},    {"MF13", N, "xb", "ib", "0"},
    {"MF6", N, "outn", "outp", "xa"}, {"MF7", N, "outp", "outn", "xb"}, {"MF8", P, "outn", "outp", "vdd"},
    {"MF9", P, "outp", "outn", "vdd"},
};

// Mashhadi2014: double tail. INP = Vref drives F1, INN = Vin drives F2.
// Fsw2 (gate Fp) sits in the Fn discharge path and Fsw1 (gate Fn) in the Fp
// path. FR1/FR2 reset the outputs low through the Fp/Fn levels.
const std::vector<DeviceRow> kMashhadi{
    {"MFtail1", N, "tail", "clk1", "0", kInputNfin}, {"MF1", N, "n1", "vref", "tail", kInputNfin},
    {"MF2", N, "n2", "vin", "tail", kInputNfin}, {"MFsw2", N, "fn", "fp", "n1", kSwitchNfin},
    {"MFsw1", N, "fp", "fn", "n2", kSwitchNfin},    {"MF3", P, "fn", "clk1", "vdd"},
    {"MF4", P, "fp", "clk1", "vdd"},     {"MFC1", P, "fp", "fn", "vdd"},    {"MFC2", P, "fn", "fp", "vdd"},
    {"MFtail2", P, "ltop", "clk2", "vdd"}, {"MF7", P, "outn", "outp", "ltop"}, {"MF8", P, "outp", "outn", "ltop"},
    {"MF5", N, "outn", "outp", "0"},     {"MF6", N, "outp", "outn", "0"},   {"MFR1", N, "outn", "fp", "0"},
    {"MFR2", N, "outp", "fn", "0"},
};

// Deepika2015: single clock. First stage as in the double-tail design
// (including the Fsw switches); the second-stage tail is replaced by F1/F2
// gated from Fn/Fp. F3/F4 complete the output latch.
const std::vector<DeviceRow> kDeepika{
    {"MFtail", N, "tail", "clk", "0", kInputNfin}, {"MF10", N, "m1", "vin", "tail", kInputNfin},
    {"MF11", N, "m2", "vref", "tail", kInputNfin}, {"MFsw2", N, "fn", "fp", "m1", kSwitchNfin},
    {"MFsw1", N, "fp", "fn", "m2", kSwitchNfin},    {"MF9", P, "fn", "clk", "vdd"},
    {"MF12", P, "fp", "clk", "vdd"},    {"MFC1", P, "fn", "fp", "vdd"},    {"MFC2", P, "fp", "fn", "vdd"},
    {"MF1", P, "t1", "fn", "vdd"},      {"MF2", P, "t2", "fp", "vdd"},     {"MF7", P, "outn", "outp", "t1"},
    {"MF8", P, "outp", "outn", "t2"},   {"MF5", N, "outn", "fn", "0"},     {"MF6", N, "outp", "fp", "0"},
    {"MF3", N, "outn", "outp", "0"},    {"MF4", N, "outp", "outn", "0"},
};

// Proposed: 18 devices. x1/x2 are the input-pair drains (sources of F3/F4);
// ltop is the node under the top tail Ftail2.
const std::vector<DeviceRow> kProposed{
    {"MFtail1", N, "tail", "clk1", "0", kInputNfin}, {"MF1", N, "x1", "vin", "tail", kInputNfin},
    {"MF2", N, "x2", "vref", "tail", kInputNfin}, {"MF3", N, "fa", "fb", "x1", kSwitchNfin},
    {"MF4", N, "fb", "fa", "x2", kSwitchNfin},      {"MF5", P, "x1", "clk1", "vdd"},
    {"MF6", P, "x2", "clk1", "vdd"},     {"MF7", P, "fa", "clk1", "vdd"},   {"MF8", P, "fb", "clk1", "vdd"},
    {"MF9", P, "fa", "fb", "vdd"},       {"MF10", P, "fb", "fa", "vdd"},    {"MFtail2", P, "ltop", "clk2", "vdd"},
    {"MF11", P, "outn", "outp", "ltop"}, {"MF12", P, "outp", "outn", "ltop"}, {"MF13", N, "outn", "fa", "0"},
    {"MF14", N, "outp", "fb", "0"},      {"MF15", N, "outn", "outp", "0"},  {"MF16", N, "outp", "outn", "0"},
};

const std::vector<DeviceRow>& rows(ComparatorKind k) {
  switch (k) {
    case ComparatorKind::Jeon2010: return kJeon;
    case ComparatorKind::Mashhadi2014: return kMashhadi;
    case ComparatorKind::Deepika2015: return kDeepika;
    case ComparatorKind::Proposed: return kProposed;
  }
  throw std::invalid_argument("unknown comparator kind");
}

ComparatorInfo make_info(ComparatorKind k) {
  ComparatorInfo info{k, "clk", false, "", "", "", "", {}, rows(k).size()};
  switch (k) {
    case ComparatorKind::Jeon2010:
      info.plus_output = "outp";
      info.minus_output = "outn";
      info.vin_device = "MF2";
      info.vref_device = "MF3";
      info.reset_checks = {{"outp", true}, {"outn", true}};
      break;
    case ComparatorKind::Mashhadi2014:
      info.eval_clock = "clk1";
      info.two_clocks = true;
      info.plus_output = "outn";
      info.minus_output = "outp";
      info.vin_device = "MF2";
      info.vref_device = "MF1";
      info.reset_checks = {{"outp", false}, {"outn", false}, {"fn", true}, {"fp", true}};
      break;
    case ComparatorKind::Deepika2015:
      info.plus_output = "outn";
      info.minus_output = "outp";
      info.vin_device = "MF10";
      info.vref_device = "MF11";
      info.reset_checks = {{"fn", true}, {"fp", true}};
      break;
    case ComparatorKind::Proposed:
      info.eval_clock = "clk1";
      info.two_clocks = true;
      info.plus_output = "outn";
      info.minus_output = "outp";
      info.vin_device = "MF1";
      info.vref_device = "MF2";
      info.reset_checks = {{"outp", false}, {"outn", false}, {"fa", true}, {"fb", true}};
      break;
  }
  return info;
}

int nfin_for(const TestbenchConfig& tb, const DeviceRow& row) {
  const std::string full = row.name;
  for (const auto& [key, nfin] : tb.sizing) {
    if (iequals(key, full) || iequals(key, full.substr(1))) return nfin;
  }
  if (row.nfin > 0) return row.nfin;
  return row.pol == Polarity::N ? kDefaultNfinN : kDefaultNfinP;
}

}  // namespace

const ComparatorInfo& comparator_info(ComparatorKind kind) {
  static const std::array<ComparatorInfo, 4> table{make_info(ComparatorKind::Jeon2010),
                                                   make_info(ComparatorKind::Mashhadi2014),
                                                   make_info(ComparatorKind::Deepika2015),
                                                   make_info(ComparatorKind::Proposed)};
  return table.at(static_cast<std::size_t>(kind));
}

Netlist build_netlist(ComparatorKind kind, const TestbenchConfig& tb) {
  check_testbench(tb);
  const ComparatorInfo& info = comparator_info(kind);
  for (const auto& [key, nfin] : tb.sizing) {
    bool known = false;
    for (const auto& r : rows(kind)) {
      known = known || iequals(key, r.name) || iequals(key, std::string(r.name).substr(1));
    }
    if (!known) {
      throw std::invalid_argument("sizing override names unknown device '" + key + "' for " +
                                  std::string(kind_id(kind)));
    }
  }

  Netlist n;
  n.title = std::string(kind_id(kind)) + " comparator testbench";

  // Elements are added in the order emit_netlist writes them so that a
  // re-parse numbers the nodes identically.
  const double t = tb.period();
  PulseSpec clk;
  clk.v1 = 0.0;
  clk.v2 = tb.vdd;
  clk.tdelay = (1.0 - tb.duty) * t;
  clk.trise = tb.edge_time;
  clk.tfall = tb.edge_time;
  clk.twidth = tb.duty * t - tb.edge_time;
  clk.period = t;

  auto add_source = [&](const char* name, const char* node, SourceSpec spec) {
    n.sources.push_back({name, n.intern_node(node), kGround, spec});
  };
  add_source(kSupplySource, kSupplyNode, DcSpec{tb.vdd});
  add_source("Vin", "vin", DcSpec{tb.vin()});
  add_source("Vref", "vref", DcSpec{tb.vref()});
  if (info.two_clocks) {
    add_source("Vclk1", "clk1", clk);
    PulseSpec clk2 = clk;
    clk2.v1 = tb.vdd;
    clk2.v2 = 0.0;
    clk2.tdelay += tb.nonoverlap;
    clk2.twidth -= 2 * tb.nonoverlap;
    add_source("Vclk2", "clk2", clk2);
  } else {
    add_source("Vclk", "clk", clk);
  }

  for (const auto& r : rows(kind)) {
    DeviceInstance d;
    d.name = r.name;
    d.polarity = r.pol;
    d.drain = n.intern_node(r.drain);
    d.gate = n.intern_node(r.gate);
    d.source = n.intern_node(r.source);
    d.nfin = nfin_for(tb, r);
    n.devices.push_back(std::move(d));
  }
  n.capacitors.push_back({"Cloadp", n.intern_node("outp"), kGround, tb.cload});
  n.capacitors.push_back({"Cloadn", n.intern_node("outn"), kGround, tb.cload});
  n.tran = TranDirective{5e-14, tb.n_periods * t};
  validate_netlist(n);
  return n;
}

}  // namespace compsim
