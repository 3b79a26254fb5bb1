#include "compsim/config.hpp"

#include <cmath>
#include <istream>

#include "compsim/units.hpp"

namespace compsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number(std::string_view key, std::string_view value) {
  const auto v = parse_eng(value);
  if (!v) throw std::invalid_argument("bad number '" + std::string(value) + "' for " + std::string(key));
  return *v;
}

int integer(std::string_view key, std::string_view value) {
  const double v = number(key, value);
  if (v != std::floor(v) || std::fabs(v) > 1e9) {
    throw std::invalid_argument(std::string(key) + " needs an integer, got '" + std::string(value) + "'");
  }
  return static_cast<int>(v);
}

bool set_card(FinFetParams& p, std::string_view field, std::string_view key, std::string_view value) {
  double* slot = nullptr;
  if (field == "vth0") slot = &p.vth0;
  else if (field == "n_slope") slot = &p.n_slope;
  else if (field == "k_tc") slot = &p.k_tc;
  else if (field == "lambda_clm") slot = &p.lambda_clm;
  else if (field == "cgs_fin") slot = &p.cgs_fin;
  else if (field == "cgd_fin") slot = &p.cgd_fin;
  else if (field == "cdb_fin") slot = &p.cdb_fin;
  else if (field == "phi_t") slot = &p.phi_t;
  if (slot == nullptr) return false;
  *slot = number(key, value);
  return true;
}

}  // namespace

void apply_setting(RunConfig& rc, std::string_view key_in, std::string_view value) {
  const std::string key = to_lower(trim(key_in));
  value = trim(value);
  const std::string_view k = key;
  TestbenchConfig& tb = rc.tb;
  SimConfig& s = rc.sim;

  if (k == "tb.vdd") tb.vdd = number(k, value);
  else if (k == "tb.vcm") tb.vcm = number(k, value);
  else if (k == "tb.dvin") tb.dvin = number(k, value);
  else if (k == "tb.fclk") tb.fclk = number(k, value);
  else if (k == "tb.duty") tb.duty = number(k, value);
  else if (k == "tb.edge_time") tb.edge_time = number(k, value);
  else if (k == "tb.cload") tb.cload = number(k, value);
  else if (k == "tb.n_periods") tb.n_periods = integer(k, value);
  else if (k == "tb.nonoverlap") tb.nonoverlap = number(k, value);
  else if (k == "sim.dt") s.dt = number(k, value);
  else if (k == "sim.tstop") s.tstop = number(k, value);
  else if (k == "sim.newton_tol_v") s.newton_tol_v = number(k, value);
  else if (k == "sim.newton_tol_i") s.newton_tol_i = number(k, value);
  else if (k == "sim.max_newton_iters") s.max_newton_iters = integer(k, value);
  else if (k == "sim.gmin") s.gmin = number(k, value);
  else if (k == "sim.gmin_steps") s.gmin_steps = integer(k, value);
  else if (k == "sim.max_halvings") s.max_halvings = integer(k, value);
  else if (k.starts_with("model.n.")) {
    if (!set_card(s.models.n, k.substr(8), k, value)) throw std::invalid_argument("unknown key " + key);
  } else if (k.starts_with("model.p.")) {
    if (!set_card(s.models.p, k.substr(8), k, value)) throw std::invalid_argument("unknown key " + key);
  } else if (k.starts_with("size.") && k.size() > 5) {
    tb.sizing[std::string(trim(key_in).substr(5))] = integer(k, value);
  } else {
    throw std::invalid_argument("unknown key " + key);
  }
}

void load_config(std::istream& in, RunConfig& rc) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "expected key = value");
    try {
      apply_setting(rc, s.substr(0, eq), s.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, e.what());
    }
  }
}

}  // namespace compsim
