#include "compsim/testbench.hpp"

#include <cmath>
#include <stdexcept>

#include "compsim/units.hpp"

namespace compsim {

std::string_view kind_id(ComparatorKind k) {
  switch (k) {
    case ComparatorKind::Jeon2010: return "jeon2010";
    case ComparatorKind::Mashhadi2014: return "mashhadi2014";
    case ComparatorKind::Deepika2015: return "deepika2015";
    case ComparatorKind::Proposed: return "proposed";
  }
  return "unknown";
}

std::optional<ComparatorKind> parse_kind(std::string_view id) {
  for (ComparatorKind k : kAllKinds) {
    if (iequals(kind_id(k), id)) return k;
  }
  return std::nullopt;
}

void check_testbench(const TestbenchConfig& tb) {
  auto fail = [](const std::string& why) { throw std::invalid_argument("testbench: " + why); };
  if (!(tb.vdd > 0)) fail("vdd must be > 0");
  if (!(tb.vcm > 0 && tb.vcm < tb.vdd)) fail("vcm must satisfy 0 < vcm < vdd");
  if (!(std::fabs(tb.dvin) < tb.vdd)) fail("|dvin| must be < vdd");
  if (!(tb.fclk > 0)) fail("fclk must be > 0");
  if (!(tb.duty > 0 && tb.duty < 1)) fail("duty must be in (0, 1)");
  if (!(tb.edge_time > 0)) fail("edge_time must be > 0");
  const double t = tb.period();
  if (!(tb.edge_time < std::min(tb.duty, 1 - tb.duty) * t)) fail("clock edges must fit inside each phase");
  if (!(tb.nonoverlap >= 0 && tb.duty * t - tb.edge_time - 2 * tb.nonoverlap > 0)) {
    fail("nonoverlap leaves no active window");
  }
  if (!(tb.cload >= 0)) fail("cload must be >= 0");
  if (tb.n_periods < 1) fail("n_periods must be >= 1");
  for (const auto& [name, nfin] : tb.sizing) {
    if (nfin < 1) fail("sizing override for " + name + " must be >= 1");
  }
  if (tb.vin() < 0 || tb.vref() < 0 || tb.vin() > tb.vdd || tb.vref() > tb.vdd) fail("inputs leave the supply rails");
}

}  // namespace compsim
