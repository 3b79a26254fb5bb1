#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace compsim {

enum class ComparatorKind { Jeon2010, Mashhadi2014, Deepika2015, Proposed };

inline constexpr std::array<ComparatorKind, 4> kAllKinds{ComparatorKind::Jeon2010, ComparatorKind::Mashhadi2014,
                                                         ComparatorKind::Deepika2015, ComparatorKind::Proposed};

/// Lower-case identifier used on the command line and in reports.
std::string_view kind_id(ComparatorKind k);
std::optional<ComparatorKind> parse_kind(std::string_view id);

/// Operating point of one comparator experiment. Clock phases: each period
/// starts with the reset half (evaluation clock low) followed by evaluation.
struct TestbenchConfig {
  double vdd = 0.8;
  double vcm = 0.4;
  double dvin = 5e-3;  // Vin - Vref
  double fclk = 5e9;
  double duty = 0.5;          // evaluation fraction of the period
  double edge_time = 4e-12;   // clock rise and fall
  double cload = 1e-15;       // per output
  int n_periods = 4;
  double nonoverlap = 0.0;    // shrinks the complementary clock's active window on both sides
  std::map<std::string, int> sizing;  // device name (with or without leading 'M') -> nfin

  double period() const { return 1.0 / fclk; }
  double vin() const { return vcm + 0.5 * dvin; }
  double vref() const { return vcm - 0.5 * dvin; }
  /// Start of the k-th reset phase and k-th evaluation phase (k from 0).
  double reset_start(int k) const { return k * period(); }
  double eval_start(int k) const { return (k + 1.0 - duty) * period(); }
  /// 50% points of the k-th evaluation-clock rising edge.
  double eval_edge_mid(int k) const { return eval_start(k) + 0.5 * edge_time; }
  /// Period used for measurements: the one after up to two warm-up periods.
  int measured_period() const { return n_periods >= 3 ? 2 : n_periods - 1; }

  bool operator==(const TestbenchConfig&) const = default;
};

/// Throws std::invalid_argument when an invariant does not hold
/// (0 < vcm < vdd, |dvin| < vdd, fclk > 0, edges fit inside each phase, ...).
void check_testbench(const TestbenchConfig& tb);

}  // namespace compsim
