#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "compsim/engine.hpp"
#include "compsim/testbench.hpp"

namespace compsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  TestbenchConfig tb;
  SimConfig sim;
};

/// Applies one `key = value` setting. Keys:
///   tb.vdd tb.vcm tb.dvin tb.fclk tb.duty tb.edge_time tb.cload tb.n_periods tb.nonoverlap
///   sim.dt sim.tstop sim.newton_tol_v sim.newton_tol_i sim.max_newton_iters sim.gmin
///   sim.gmin_steps sim.max_halvings
///   model.{n,p}.{vth0,n_slope,k_tc,lambda_clm,cgs_fin,cgd_fin,cdb_fin,phi_t}
///   size.<device> (fin count)
/// Values accept engineering suffixes. Throws std::invalid_argument.
void apply_setting(RunConfig& rc, std::string_view key, std::string_view value);

/// Reads `key = value` lines; '#' starts a comment. Throws ConfigError.
void load_config(std::istream& in, RunConfig& rc);

}  // namespace compsim
