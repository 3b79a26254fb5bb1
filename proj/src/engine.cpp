#include "compsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "compsim/units.hpp"

namespace compsim {

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("sim config: dt must be > 0");
  if (!(cfg.newton_tol_v > 0 && cfg.newton_tol_i > 0)) {
    throw std::invalid_argument("sim config: tolerances must be > 0");
  }
  if (cfg.max_newton_iters < 1) throw std::invalid_argument("sim config: max_newton_iters must be >= 1");
  if (cfg.gmin < 0) throw std::invalid_argument("sim config: gmin must be >= 0");
  if (cfg.gmin_steps < 0 || cfg.max_halvings < 0) throw std::invalid_argument("sim config: negative step count");
  check_card(cfg.models.n);
  check_card(cfg.models.p);
}

double evaluate_source(const SourceSpec& spec, double t) {
  if (const auto* dc = std::get_if<DcSpec>(&spec)) return dc->value;
  const auto& p = std::get<PulseSpec>(spec);
  if (t < p.tdelay) return p.v1;
  double local = t - p.tdelay;
  if (p.period > 0) local = std::fmod(local, p.period);
  if (local < p.trise) return p.v1 + (p.v2 - p.v1) * local / p.trise;
  local -= p.trise;
  if (local < p.twidth) return p.v2;
  local -= p.twidth;
  if (local < p.tfall) return p.v2 + (p.v1 - p.v2) * local / p.tfall;
  return p.v1;
}

std::vector<double> source_breakpoints(const Netlist& n, double tstop) {
  std::vector<double> bps;
  for (const auto& s : n.sources) {
    const auto* p = std::get_if<PulseSpec>(&s.spec);
    if (!p) continue;
    const double corners[] = {0.0, p->trise, p->trise + p->twidth, p->trise + p->twidth + p->tfall};
    for (long k = 0;; ++k) {
      const double base = p->tdelay + (p->period > 0 ? static_cast<double>(k) * p->period : 0.0);
      if (base > tstop) break;
      for (double c : corners) {
        if (base + c > 0 && base + c <= tstop) bps.push_back(base + c);
      }
      if (!(p->period > 0)) break;
    }
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(), [](double a, double b) { return std::fabs(a - b) < 1e-21; }),
            bps.end());
  return bps;
}

const std::vector<double>& WaveformSet::node(std::string_view name) const {
  std::string key = to_lower(name);
  if (key == "gnd") key = "0";
  for (std::size_t i = 0; i < node_names.size(); ++i) {
    if (node_names[i] == key) return node_traces[i];
  }
  throw std::out_of_range("waveform has no node '" + std::string(name) + "'");
}

const std::vector<double>& WaveformSet::source_current(std::string_view name) const {
  for (std::size_t i = 0; i < source_names.size(); ++i) {
    if (iequals(source_names[i], name)) return source_currents[i];
  }
  throw std::out_of_range("waveform has no source '" + std::string(name) + "'");
}

double WaveformSet::value_at(std::string_view node_name, double t) const {
  const auto& tr = node(node_name);
  if (times.empty()) throw std::out_of_range("empty waveform");
  if (t <= times.front()) return tr.front();
  if (t >= times.back()) return tr.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double f = (t - times[lo]) / (times[hi] - times[lo]);
  return tr[lo] + f * (tr[hi] - tr[lo]);
}

SystemState WaveformSet::state(std::size_t step) const {
  SystemState s;
  s.time = times.at(step);
  for (const auto& tr : node_traces) s.node_voltages.push_back(tr[step]);
  for (const auto& tr : source_currents) s.branch_currents.push_back(tr[step]);
  return s;
}

namespace {

struct CapBranch {
  NodeId a = kGround;
  NodeId b = kGround;
  double c = 0.0;
};

enum class Integration { BackwardEuler, Trapezoidal };

/// MNA system: unknowns are node voltages 1..N-1 followed by one branch
/// current per voltage source. Residual rows hold currents leaving each node.
class Mna {
 public:
  Mna(const Netlist& n, const SimConfig& cfg) : net_(n), cfg_(cfg) {
    nodes_ = n.node_count();
    unknowns_ = (nodes_ - 1) + n.sources.size();
    for (const auto& c : n.capacitors) {
      if (c.plus != c.minus && c.farads > 0) caps_.push_back({c.plus, c.minus, c.farads});
    }
    for (const auto& d : n.devices) {
      const DeviceCaps dc = device_capacitances(d.polarity, d.nfin, cfg.models.card(d.polarity));
      if (d.gate != d.source && dc.cgs > 0) caps_.push_back({d.gate, d.source, dc.cgs});
      if (d.gate != d.drain && dc.cgd > 0) caps_.push_back({d.gate, d.drain, dc.cgd});
      if (d.drain != kGround && dc.cdb > 0) caps_.push_back({d.drain, kGround, dc.cdb});
    }
    jac_.resize(unknowns_);
    rhs_.assign(unknowns_, 0.0);
  }

  std::size_t unknowns() const { return unknowns_; }
  std::size_t nodes() const { return nodes_; }
  const std::vector<CapBranch>& caps() const { return caps_; }

  // x layout helpers; ground maps to "no unknown".
  static std::size_t row(NodeId id) { return id - 1; }

  double voltage(const std::vector<double>& x, NodeId id) const { return id == kGround ? 0.0 : x[row(id)]; }

  struct CapState {
    std::vector<double> v_prev;  // per-cap voltage at the last accepted point
    std::vector<double> i_prev;  // per-cap current at the last accepted point
  };

  /// Companion coefficients for one step; a null `caps` means DC (caps open).
  struct StepContext {
    double t = 0.0;
    double h = 0.0;
    Integration method = Integration::BackwardEuler;
    const CapState* caps = nullptr;
    double gmin = 0.0;
  };

  double cap_geq(const StepContext& ctx, const CapBranch& cb) const {
    if (!ctx.caps) return 0.0;
    return (ctx.method == Integration::Trapezoidal ? 2.0 : 1.0) * cb.c / ctx.h;
  }

  double cap_current(const StepContext& ctx, std::size_t k, double v) const {
    const CapBranch& cb = caps_[k];
    const double geq = cap_geq(ctx, cb);
    double i = geq * (v - ctx.caps->v_prev[k]);
    if (ctx.method == Integration::Trapezoidal) i -= ctx.caps->i_prev[k];
    return i;
  }

  /// Fills jac_ and rhs_ (= residual F(x)). Returns the largest node-row
  /// residual magnitude and the largest source-row residual magnitude.
  std::pair<double, double> assemble(const std::vector<double>& x, const StepContext& ctx) {
    jac_.fill(0.0);
    std::fill(rhs_.begin(), rhs_.end(), 0.0);

    auto add_j = [&](NodeId r, NodeId c, double g) {
      if (r != kGround && c != kGround) jac_(row(r), row(c)) += g;
    };
    auto add_f = [&](NodeId r, double i) {
      if (r != kGround) rhs_[row(r)] += i;
    };
    auto conductance = [&](NodeId a, NodeId b, double g) {
      add_j(a, a, g);
      add_j(b, b, g);
      add_j(a, b, -g);
      add_j(b, a, -g);
    };

    if (ctx.gmin > 0) {
      for (NodeId id = 1; id < nodes_; ++id) {
        add_j(id, id, ctx.gmin);
        add_f(id, ctx.gmin * x[row(id)]);
      }
    }
    for (const auto& r : net_.resistors) {
      const double g = 1.0 / r.ohms;
      const double i = g * (voltage(x, r.plus) - voltage(x, r.minus));
      conductance(r.plus, r.minus, g);
      add_f(r.plus, i);
      add_f(r.minus, -i);
    }
    if (ctx.caps) {
      for (std::size_t k = 0; k < caps_.size(); ++k) {
        const CapBranch& cb = caps_[k];
        const double geq = cap_geq(ctx, cb);
        const double i = cap_current(ctx, k, voltage(x, cb.a) - voltage(x, cb.b));
        conductance(cb.a, cb.b, geq);
        add_f(cb.a, i);
        add_f(cb.b, -i);
      }
    }
    for (const auto& d : net_.devices) {
      const DeviceEval e = drain_current(d.polarity, voltage(x, d.gate), voltage(x, d.drain), voltage(x, d.source),
                                         d.nfin, d.vth_delta, cfg_.models.card(d.polarity));
      add_f(d.drain, e.id);
      add_f(d.source, -e.id);
      add_j(d.drain, d.gate, e.gm);
      add_j(d.drain, d.drain, e.gds);
      add_j(d.drain, d.source, e.gms);
      add_j(d.source, d.gate, -e.gm);
      add_j(d.source, d.drain, -e.gds);
      add_j(d.source, d.source, -e.gms);
    }

    for (std::size_t k = 0; k < net_.sources.size(); ++k) {
      const auto& s = net_.sources[k];
      const std::size_t br = (nodes_ - 1) + k;
      const double i = x[br];
      add_f(s.plus, i);
      add_f(s.minus, -i);
      if (s.plus != kGround) {
        jac_(row(s.plus), br) += 1.0;
        jac_(br, row(s.plus)) += 1.0;
      }
      if (s.minus != kGround) {
        jac_(row(s.minus), br) -= 1.0;
        jac_(br, row(s.minus)) -= 1.0;
      }
      rhs_[br] = voltage(x, s.plus) - voltage(x, s.minus) - evaluate_source(s.spec, ctx.t);
    }
    double worst_node = 0.0;
    for (std::size_t r = 0; r < nodes_ - 1; ++r) worst_node = std::max(worst_node, std::fabs(rhs_[r]));
    double worst_src = 0.0;
    for (std::size_t r = nodes_ - 1; r < unknowns_; ++r) worst_src = std::max(worst_src, std::fabs(rhs_[r]));
    return {worst_node, worst_src};
  }

  struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
  };

  /// Newton-Raphson from the guess in `x`; `x` holds the result on success.
  NewtonResult newton(std::vector<double>& x, const StepContext& ctx) {
    constexpr double kMaxNodeStep = 0.3;  // V per iteration
    NewtonResult res;
    for (int it = 0; it < cfg_.max_newton_iters; ++it) {
      res.iterations = it + 1;
      const auto [node_res, src_res] = assemble(x, ctx);
      try {
        lu_.factor(jac_);
      } catch (const SingularMatrix&) {
        return res;
      }
      delta_.assign(rhs_.begin(), rhs_.end());
      lu_.solve(delta_);
      double max_dv = 0.0;
      for (std::size_t r = 0; r < unknowns_; ++r) {
        double d = -delta_[r];
        if (r < nodes_ - 1) {
          d = std::clamp(d, -kMaxNodeStep, kMaxNodeStep);
          max_dv = std::max(max_dv, std::fabs(d));
        }
        x[r] += d;
      }
      if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) return res;
      if (node_res < cfg_.newton_tol_i && src_res < cfg_.newton_tol_v && max_dv < cfg_.newton_tol_v) {
        res.converged = true;
        res.residual = node_res;
        return res;
      }
    }
    return res;
  }

 private:
  const Netlist& net_;
  const SimConfig& cfg_;
  std::size_t nodes_ = 0;
  std::size_t unknowns_ = 0;
  std::vector<CapBranch> caps_;
  DenseMatrix jac_;
  std::vector<double> rhs_;
  std::vector<double> delta_;
  LuSolver lu_;
};

SystemState unpack(const Mna& mna, const std::vector<double>& x, double t) {
  SystemState s;
  s.time = t;
  s.node_voltages.assign(mna.nodes(), 0.0);
  for (NodeId id = 1; id < mna.nodes(); ++id) s.node_voltages[id] = x[Mna::row(id)];
  s.branch_currents.assign(x.begin() + static_cast<std::ptrdiff_t>(mna.nodes() - 1), x.end());
  return s;
}

}  // namespace

SystemState dc_operating_point(const Netlist& n, const SimConfig& cfg) {
  check_config(cfg);
  Mna mna(n, cfg);
  std::vector<double> x(mna.unknowns(), 0.0);
  for (const auto& [id, v] : n.initial_conditions) x[Mna::row(id)] = v;

  Mna::StepContext ctx;
  ctx.t = 0.0;
  ctx.gmin = cfg.gmin;
  std::vector<double> guess = x;
  if (mna.newton(guess, ctx).converged) return unpack(mna, guess, 0.0);

  // gmin stepping: geometric walk from a heavy shunt down to cfg.gmin.
  constexpr double kStartShunt = 1e-2;
  const double floor = std::max(cfg.gmin, 1e-30);
  const int steps = std::max(cfg.gmin_steps, 1);
  guess = x;
  for (int k = 0; k <= steps; ++k) {
    ctx.gmin = kStartShunt * std::pow(floor / kStartShunt, static_cast<double>(k) / steps);
    if (!mna.newton(guess, ctx).converged) {
      throw ConvergenceError(0.0, "dc operating point: no convergence at gmin step " + std::to_string(k));
    }
  }
  return unpack(mna, guess, 0.0);
}

WaveformSet transient(const Netlist& n, const SimConfig& cfg_in, const StepObserver& observer) {
  SimConfig cfg = cfg_in;
  if (!(cfg.tstop > 0)) {
    if (!n.tran) throw std::invalid_argument("transient: no .tran directive and no tstop configured");
    cfg.tstop = n.tran->stop;
    cfg.dt = n.tran->step;
  }
  check_config(cfg);

  Mna mna(n, cfg);
  const std::size_t nodes = mna.nodes();
  const std::size_t nsrc = n.sources.size();

  // Initial point: .ic values, everything else 0 V, except nodes tied to
  // ground through a chain of sources, which take the source value.
  std::vector<double> x(mna.unknowns(), 0.0);
  std::vector<bool> fixed(nodes, false);
  fixed[kGround] = true;
  for (const auto& [id, v] : n.initial_conditions) {
    x[Mna::row(id)] = v;
    fixed[id] = true;
  }
  for (std::size_t pass = 0; pass < nsrc; ++pass) {
    bool changed = false;
    for (const auto& s : n.sources) {
      const double v = evaluate_source(s.spec, 0.0);
      if (fixed[s.minus] && !fixed[s.plus]) {
        x[Mna::row(s.plus)] = mna.voltage(x, s.minus) + v;
        fixed[s.plus] = changed = true;
      } else if (fixed[s.plus] && !fixed[s.minus]) {
        x[Mna::row(s.minus)] = mna.voltage(x, s.plus) - v;
        fixed[s.minus] = changed = true;
      }
    }
    if (!changed) break;
  }

  WaveformSet w;
  w.node_names = n.node_names();
  w.node_traces.assign(nodes, {});
  for (const auto& s : n.sources) w.source_names.push_back(s.name);
  w.source_currents.assign(nsrc, {});

  auto record = [&](double t, const std::vector<double>& xs) {
    w.times.push_back(t);
    w.node_traces[kGround].push_back(0.0);
    for (NodeId id = 1; id < nodes; ++id) w.node_traces[id].push_back(xs[Mna::row(id)]);
    for (std::size_t k = 0; k < nsrc; ++k) w.source_currents[k].push_back(xs[(nodes - 1) + k]);
  };
  record(0.0, x);

  Mna::CapState caps;
  caps.v_prev.resize(mna.caps().size());
  caps.i_prev.assign(mna.caps().size(), 0.0);
  for (std::size_t k = 0; k < mna.caps().size(); ++k) {
    caps.v_prev[k] = mna.voltage(x, mna.caps()[k].a) - mna.voltage(x, mna.caps()[k].b);
  }

  const std::vector<double> bps = source_breakpoints(n, cfg.tstop);
  std::size_t next_bp = 0;

  // Advances the accepted state from t to t + h; returns false on failure.
  auto take_step = [&](double t, double h, Integration method, std::vector<double>& xs) {
    Mna::StepContext ctx;
    ctx.t = t + h;
    ctx.h = h;
    ctx.method = method;
    ctx.caps = &caps;
    ctx.gmin = cfg.gmin;
    std::vector<double> trial = xs;
    const auto r = mna.newton(trial, ctx);
    w.stats.newton_iterations += static_cast<std::size_t>(r.iterations);
    if (!r.converged) return false;
    for (std::size_t k = 0; k < mna.caps().size(); ++k) {
      const double v = mna.voltage(trial, mna.caps()[k].a) - mna.voltage(trial, mna.caps()[k].b);
      const double geq = (method == Integration::Trapezoidal ? 2.0 : 1.0) * mna.caps()[k].c / h;
      double i = geq * (v - caps.v_prev[k]);
      if (method == Integration::Trapezoidal) i -= caps.i_prev[k];
      caps.v_prev[k] = v;
      caps.i_prev[k] = i;
    }
    w.stats.max_kcl_residual = std::max(w.stats.max_kcl_residual, r.residual);
    xs = std::move(trial);
    return true;
  };

  double t = 0.0;
  bool restart_order = true;  // backward Euler on the first step and after each breakpoint
  const double eps = cfg.dt * 1e-6;
  while (t < cfg.tstop - eps) {
    while (next_bp < bps.size() && bps[next_bp] <= t + eps) ++next_bp;
    double target = std::min(t + cfg.dt, cfg.tstop);
    bool hits_bp = false;
    if (next_bp < bps.size() && bps[next_bp] < t + cfg.dt * 1.001) {
      target = bps[next_bp];
      hits_bp = true;
    }
    if (cfg.tstop - target < cfg.dt * 1e-3) target = cfg.tstop;

    const Integration method = restart_order ? Integration::BackwardEuler : Integration::Trapezoidal;
    bool ok = take_step(t, target - t, method, x);
    if (ok) {
      ++w.stats.accepted_steps;
      record(target, x);
    } else {
      // Retry the interval with 2^k equal sub-steps.
      for (int halving = 1; halving <= cfg.max_halvings && !ok; ++halving) {
        const int pieces = 1 << halving;
        const double h = (target - t) / pieces;
        const Mna::CapState saved = caps;
        std::vector<double> xs = x;
        std::vector<std::pair<double, std::vector<double>>> accepted;
        bool all = true;
        for (int p = 0; p < pieces && all; ++p) {
          const double ts = t + p * h;
          const Integration m = (p == 0) ? method : Integration::Trapezoidal;
          all = take_step(ts, h, m, xs);
          if (all) accepted.emplace_back(p + 1 == pieces ? target : ts + h, xs);
        }
        if (all) {
          ok = true;
          w.stats.halved_steps += 1;
          for (auto& [ts, xa] : accepted) {
            ++w.stats.accepted_steps;
            record(ts, xa);
          }
          x = std::move(xs);
        } else {
          caps = saved;
        }
      }
      if (!ok) {
        throw ConvergenceError(target, "transient: Newton failed near t=" + format_double(target) + " s after " +
                                           std::to_string(cfg.max_halvings) + " step halvings");
      }
    }
    t = target;
    restart_order = hits_bp;
    if (observer && !observer(unpack(mna, x, t))) {
      w.stats.stopped_early = true;
      break;
    }
  }
  return w;
}

void write_waveform_csv(std::ostream& out, const WaveformSet& w) {
  out << "time_s";
  for (std::size_t id = 1; id < w.node_names.size(); ++id) out << ',' << w.node_names[id];
  for (const auto& s : w.source_names) out << ",i(" << to_lower(s) << ')';
  out << '\n';
  for (std::size_t k = 0; k < w.times.size(); ++k) {
    out << format_double(w.times[k]);
    for (std::size_t id = 1; id < w.node_traces.size(); ++id) out << ',' << format_double(w.node_traces[id][k]);
    for (const auto& tr : w.source_currents) out << ',' << format_double(tr[k]);
    out << '\n';
  }
}

}  // namespace compsim
