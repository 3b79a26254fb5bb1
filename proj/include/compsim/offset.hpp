#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "compsim/engine.hpp"
#include "compsim/measure.hpp"
#include "compsim/testbench.hpp"

namespace compsim {

/// The decision does not flip anywhere on the search interval.
class TripNotBracketed : public std::runtime_error {
 public:
  explicit TripNotBracketed(const std::string& what) : std::runtime_error(what) {}
};

struct McOptions {
  double sigma_vth0 = 0.0;  // V, for a single-fin device
  int n_samples = 0;
  std::uint64_t seed = 0;
};

void check_mc(const McOptions& mc);

inline constexpr double kTripSearchLimit = 50e-3;      // search dvin in [-limit, +limit]
inline constexpr double kTripResolution = 0.05e-3;

struct OffsetResult {
  std::optional<double> offset_sigma;            // empty when fewer than two samples bracketed
  std::vector<std::optional<double>> trip_points;  // empty entry: TripNotBracketed
  int failed = 0;
};

/// Decision after one reset/evaluation period with Vin - Vref = dvin:
/// sign of plus - minus once it reaches half a supply, else at the end of
/// evaluation.
Outcome trip_decision(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg,
                      const std::map<std::string, double>& deltas, double dvin);

/// Bisection for the dvin at which the decision flips from Minus to Plus.
/// Throws TripNotBracketed.
double find_trip_point(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg,
                       const std::map<std::string, double>& deltas);

/// Threshold offsets for sample `index`: N(0, sigma / sqrt(nfin)) for every
/// device, from a stream that depends only on (seed, index).
std::map<std::string, double> draw_vth_deltas(ComparatorKind kind, const TestbenchConfig& tb, double sigma_vth0,
                                              std::uint64_t seed, std::uint64_t index);

OffsetResult mc_offset(ComparatorKind kind, const TestbenchConfig& tb, const SimConfig& cfg, const McOptions& mc);

/// `sample,trip_v` rows (nan for unbracketed samples) then `sigma,<v>`.
void write_offset_csv(std::ostream& out, const OffsetResult& r);

}  // namespace compsim
