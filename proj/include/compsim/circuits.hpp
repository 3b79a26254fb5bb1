#pragma once

#include <string>
#include <vector>

#include "compsim/netlist.hpp"
#include "compsim/testbench.hpp"

namespace compsim {

/// Node expected to sit at a rail at the end of every reset phase.
struct ResetCheck {
  std::string node;
  bool at_vdd = true;  // false: at ground
};

/// Static facts about a built-in topology that the measurement code needs.
struct ComparatorInfo {
  ComparatorKind kind;
  std::string eval_clock;      // node whose rising edge starts evaluation
  bool two_clocks = false;     // true: a complementary "clk2" drives the second stage
  std::string plus_output;     // goes high when Vin > Vref
  std::string minus_output;    // goes low when Vin > Vref
  std::string vin_device;      // input device gated by Vin
  std::string vref_device;     // input device gated by Vref
  std::vector<ResetCheck> reset_checks;
  std::size_t device_count = 0;
};

const ComparatorInfo& comparator_info(ComparatorKind kind);

/// Names of the fixed testbench elements.
inline constexpr const char* kSupplySource = "Vdd";
inline constexpr const char* kSupplyNode = "vdd";

/// Default fin counts: 2 for N devices, 3 for P devices. The stage-1 tail and
/// input pair use kInputNfin and the series devices between the input-pair
/// drains and the regenerating nodes use kSwitchNfin.
inline constexpr int kDefaultNfinN = 2;
inline constexpr int kDefaultNfinP = 3;
inline constexpr int kInputNfin = 6;
inline constexpr int kSwitchNfin = 4;

/// Comparator core plus testbench: supply, Vin/Vref at vcm +/- dvin/2, clock
/// pulse sources, cload on each output and a .tran covering n_periods.
Netlist build_netlist(ComparatorKind kind, const TestbenchConfig& tb);

}  // namespace compsim
