#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "compsim/config.hpp"
#include "compsim/experiments.hpp"

using namespace compsim;

namespace {

const SimConfig kSim{};

std::set<std::string> device_names(const Netlist& n) {
  std::set<std::string> s;
  for (const auto& d : n.devices) s.insert(d.name);
  return s;
}

const DeviceInstance& device(const Netlist& n, const std::string& name) {
  return n.devices.at(n.find_device(name).value());
}

const VoltageSource& source(const Netlist& n, const std::string& name) {
  return n.sources.at(n.find_source(name).value());
}

}  // namespace

TEST(Testbench, DefaultsAndTiming) {
  TestbenchConfig tb;
  EXPECT_EQ(tb.vdd, 0.8);
  EXPECT_EQ(tb.vcm, 0.4);
  EXPECT_EQ(tb.dvin, 5e-3);
  EXPECT_EQ(tb.fclk, 5e9);
  EXPECT_DOUBLE_EQ(tb.period(), 200e-12);
  EXPECT_DOUBLE_EQ(tb.eval_start(2), 500e-12);
  EXPECT_EQ(tb.measured_period(), 2);
  EXPECT_NEAR(tb.vin() - tb.vref(), tb.dvin, 1e-15);
  tb.vcm = 0.9;
  EXPECT_THROW(check_testbench(tb), std::invalid_argument);
}

TEST(Testbench, KindIds) {
  for (auto k : kAllKinds) EXPECT_EQ(parse_kind(kind_id(k)), k);
  EXPECT_EQ(parse_kind("PROPOSED"), ComparatorKind::Proposed);
  EXPECT_FALSE(parse_kind("strongarm").has_value());
}

TEST(BuildNetlist, ProposedDeviceTable) {
  const Netlist n = build_netlist(ComparatorKind::Proposed, TestbenchConfig{});
  EXPECT_EQ(n.devices.size(), 18u);
  for (const char* node : {"fa", "fb", "outp", "outn"}) EXPECT_TRUE(n.find_node(node).has_value()) << node;
  std::set<std::string> want{"MFtail1", "MFtail2"};
  for (int i = 1; i <= 16; ++i) want.insert("MF" + std::to_string(i));
  EXPECT_EQ(device_names(n), want);

  const auto& f14 = device(n, "MF14");
  EXPECT_EQ(f14.drain, n.node("outp"));
  EXPECT_EQ(f14.gate, n.node("fb"));
  EXPECT_EQ(f14.source, kGround);
  const auto& f9 = device(n, "MF9");
  EXPECT_EQ(f9.polarity, Polarity::P);
  EXPECT_EQ(f9.drain, n.node("fa"));
  EXPECT_EQ(f9.gate, n.node("fb"));
  EXPECT_EQ(device(n, "MFtail2").gate, n.node("clk2"));
  EXPECT_EQ(device(n, "MF1").gate, n.node("vin"));
  EXPECT_EQ(device(n, "MF2").gate, n.node("vref"));
}

TEST(BuildNetlist, DeviceCountsAndSources) {
  const std::size_t counts[] = {19, 16, 17, 18};
  for (auto k : kAllKinds) {
    const Netlist n = build_netlist(k, TestbenchConfig{});
    EXPECT_EQ(n.devices.size(), counts[static_cast<int>(k)]) << kind_id(k);
    EXPECT_EQ(n.devices.size(), comparator_info(k).device_count);
    EXPECT_EQ(n.capacitors.size(), 2u);
    EXPECT_EQ(n.sources.size(), comparator_info(k).two_clocks ? 5u : 4u);
    ASSERT_TRUE(n.tran.has_value());
    EXPECT_DOUBLE_EQ(n.tran->stop, 4 * 200e-12);
  }
}

TEST(BuildNetlist, ZeroDvinGivesEqualInputs) {
  TestbenchConfig tb;
  tb.dvin = 0;
  for (auto k : kAllKinds) {
    const Netlist n = build_netlist(k, tb);
    EXPECT_EQ(evaluate_source(source(n, "Vin"), 0), evaluate_source(source(n, "Vref"), 0));
  }
}

TEST(BuildNetlist, RoundTripsThroughText) {
  for (auto k : kAllKinds) {
    const Netlist n = build_netlist(k, TestbenchConfig{});
    const Netlist back = parse_netlist(emit_netlist(n));
    EXPECT_TRUE(structurally_equal(n, back)) << kind_id(k);
    EXPECT_EQ(n, back) << kind_id(k);
  }
}

TEST(BuildNetlist, ComplementaryClocks) {
  const Netlist n = build_netlist(ComparatorKind::Proposed, TestbenchConfig{});
  const auto& c1 = source(n, "Vclk1");
  const auto& c2 = source(n, "Vclk2");
  for (double t = 0; t < 800e-12; t += 0.7e-12) {
    EXPECT_NEAR(evaluate_source(c1, t) + evaluate_source(c2, t), 0.8, 1e-12);
  }
}

TEST(BuildNetlist, SizingDefaultsAndOverrides) {
  TestbenchConfig tb;
  const Netlist d = build_netlist(ComparatorKind::Proposed, tb);
  EXPECT_EQ(device(d, "MF9").nfin, kDefaultNfinP);
  EXPECT_EQ(device(d, "MF15").nfin, kDefaultNfinN);
  EXPECT_EQ(device(d, "MF1").nfin, kInputNfin);
  EXPECT_EQ(device(d, "MF3").nfin, kSwitchNfin);
  tb.sizing["F9"] = 5;
  tb.sizing["MF15"] = 1;
  const Netlist o = build_netlist(ComparatorKind::Proposed, tb);
  EXPECT_EQ(device(o, "MF9").nfin, 5);
  EXPECT_EQ(device(o, "MF15").nfin, 1);
  tb.sizing["F99"] = 2;
  EXPECT_THROW(build_netlist(ComparatorKind::Proposed, tb), std::invalid_argument);
}

TEST(BuildWithMismatch, AppliesAndRejects) {
  const Netlist n = build_with_mismatch(ComparatorKind::Jeon2010, TestbenchConfig{}, {{"F2", 5e-3}});
  EXPECT_EQ(device(n, "MF2").vth_delta, 5e-3);
  EXPECT_EQ(device(n, "MF3").vth_delta, 0.0);
  EXPECT_THROW(build_with_mismatch(ComparatorKind::Jeon2010, TestbenchConfig{}, {{"Fx", 1e-3}}),
               std::invalid_argument);
}

TEST(RunMetrics, ProposedDecidesBothWays) {
  TestbenchConfig tb;
  const MetricsRow plus = run_metrics(ComparatorKind::Proposed, tb, kSim);
  EXPECT_EQ(plus.decision, Outcome::Plus);
  EXPECT_GT(plus.power_w, 0);
  EXPECT_GT(plus.delay_s, 0);
  EXPECT_EQ(plus.pdp_j, plus.power_w * plus.delay_s);
  EXPECT_EQ(plus.comparator, "proposed");
  tb.dvin = -5e-3;
  const MetricsRow minus = run_metrics(ComparatorKind::Proposed, tb, kSim);
  EXPECT_EQ(minus.decision, Outcome::Minus);
  EXPECT_NEAR(minus.delay_s, plus.delay_s, kSim.dt);
}

TEST(RunMetrics, SwapSymmetryAllKinds) {
  for (auto k : kAllKinds) {
    TestbenchConfig tb;
    tb.dvin = 20e-3;
    const auto a = run_metrics(k, tb, kSim);
    tb.dvin = -20e-3;
    const auto b = run_metrics(k, tb, kSim);
    EXPECT_EQ(a.decision, Outcome::Plus) << kind_id(k);
    EXPECT_EQ(b.decision, Outcome::Minus) << kind_id(k);
    EXPECT_NEAR(a.delay_s, b.delay_s, kSim.dt) << kind_id(k);
  }
}

TEST(RunMetrics, ErrorsCarryComparatorId) {
  TestbenchConfig tb;
  tb.n_periods = 3;
  tb.fclk = 100e9;  // 5 ps of evaluation: the latch cannot resolve
  tb.edge_time = 1e-12;
  try {
    run_metrics(ComparatorKind::Mashhadi2014, tb, kSim);
    FAIL() << "expected NoDecision";
  } catch (const NoDecision& e) {
    EXPECT_NE(std::string(e.what()).find("mashhadi2014"), std::string::npos);
  }
}

TEST(AnalyzePeriod, ResetContractsAndRails) {
  const TestbenchConfig tb;
  for (auto k : kAllKinds) {
    const auto w = simulate(k, tb, kSim);
    const auto r = analyze_period(k, tb, w, 2);
    ASSERT_TRUE(r.delay.has_value()) << kind_id(k);
    EXPECT_TRUE(r.latch_held);
    for (std::size_t i = 0; i < r.reset_values.size(); ++i) {
      const double want = comparator_info(k).reset_checks[i].at_vdd ? tb.vdd : 0.0;
      EXPECT_NEAR(r.reset_values[i].second, want, 5e-3) << kind_id(k) << ' ' << r.reset_values[i].first;
    }
    EXPECT_GE(r.plus_final, 0.9 * tb.vdd);
    EXPECT_LE(r.minus_final, 0.1 * tb.vdd);
    EXPECT_THROW(analyze_period(k, tb, w, 4), WindowOutOfRange);
  }
}

TEST(Sweep, SpecValidation) {
  EXPECT_THROW(check_sweep({SweepAxis::Dvin, {}}), std::invalid_argument);
  EXPECT_THROW(check_sweep({SweepAxis::Dvin, {5e-3, 5e-3}}), std::invalid_argument);
  EXPECT_THROW(check_sweep({SweepAxis::Dvin, {10e-3, 5e-3}}), std::invalid_argument);
  EXPECT_NO_THROW(check_sweep({SweepAxis::Vdd, {0.7}}));
  EXPECT_EQ(parse_axis("VCM"), SweepAxis::Vcm);
  EXPECT_FALSE(parse_axis("temp").has_value());
}

TEST(Sweep, PointRules) {
  const TestbenchConfig base;
  EXPECT_EQ(sweep_point(base, SweepAxis::Dvin, 20e-3).dvin, 20e-3);
  EXPECT_EQ(sweep_point(base, SweepAxis::Dvin, 20e-3).vcm, base.vcm);
  const auto v = sweep_point(base, SweepAxis::Vcm, 0.6);
  EXPECT_EQ(v.vcm, 0.6);
  EXPECT_EQ(v.dvin, 10e-3);
  const auto d = sweep_point(base, SweepAxis::Vdd, 0.9);
  EXPECT_EQ(d.vdd, 0.9);
  EXPECT_EQ(d.vcm, 0.45);
}

TEST(Sweep, SingletonMatchesRunMetrics) {
  const TestbenchConfig tb;
  const auto rows = run_sweep(ComparatorKind::Deepika2015, {SweepAxis::Dvin, {5e-3}}, tb, kSim);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].metrics.has_value());
  const auto direct = run_metrics(ComparatorKind::Deepika2015, tb, kSim);
  EXPECT_EQ(rows[0].metrics->delay_s, direct.delay_s);
  EXPECT_EQ(rows[0].metrics->power_w, direct.power_w);
  EXPECT_EQ(rows[0].status, "ok");
}

TEST(Sweep, FailedPointsAreKept) {
  TestbenchConfig tb;
  tb.n_periods = 3;
  const auto rows = run_sweep({ComparatorKind::Proposed, ComparatorKind::Jeon2010},
                              {SweepAxis::Dvin, {-5e-3, 0.0, 5e-3}}, tb, kSim);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].kind, ComparatorKind::Proposed);
  EXPECT_EQ(rows[3].kind, ComparatorKind::Jeon2010);
  EXPECT_EQ(rows[2].axis_value, 5e-3);
  std::ostringstream csv;
  write_sweep_csv(csv, SweepAxis::Dvin, rows);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,axis,axis_value,delay_s,power_w,pdp_j,status");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
    EXPECT_TRUE(line.starts_with("proposed,dvin,") || line.starts_with("jeon2010,dvin,")) << line;
  }
  EXPECT_EQ(n, 6);
}

TEST(Comparison, OrderAndPublishedColumns) {
  const auto rows = comparison_table(TestbenchConfig{}, kSim);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].kind, kAllKinds[i]);
    ASSERT_TRUE(rows[i].metrics.has_value());
    EXPECT_EQ(rows[i].metrics->pdp_j, rows[i].metrics->power_w * rows[i].metrics->delay_s);
  }
  std::ostringstream a, b;
  write_comparison_csv(a, rows);
  write_comparison_csv(b, comparison_table(TestbenchConfig{}, kSim));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find(",ok,73.36,12.63,1.69,0.926\n"), std::string::npos);
  EXPECT_NE(a.str().find(",ok,150.11,12.15,1.55,1.82\n"), std::string::npos);
}

TEST(Offset, DrawsAreDeterministicPerSample) {
  const TestbenchConfig tb;
  const auto a = draw_vth_deltas(ComparatorKind::Proposed, tb, 10e-3, 42, 3);
  const auto b = draw_vth_deltas(ComparatorKind::Proposed, tb, 10e-3, 42, 3);
  const auto c = draw_vth_deltas(ComparatorKind::Proposed, tb, 10e-3, 42, 4);
  const auto d = draw_vth_deltas(ComparatorKind::Proposed, tb, 20e-3, 42, 3);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a.size(), 18u);
  for (const auto& [name, v] : a) EXPECT_NEAR(d.at(name), 2 * v, 1e-15);
}

TEST(Offset, DrawScaleFollowsFinCount) {
  // Sample standard deviation over many draws of a 6-fin and a 3-fin device.
  const TestbenchConfig tb;
  double s6 = 0, s3 = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto d = draw_vth_deltas(ComparatorKind::Proposed, tb, 10e-3, 9, static_cast<std::uint64_t>(i));
    s6 += d.at("MF1") * d.at("MF1");
    s3 += d.at("MF9") * d.at("MF9");
  }
  EXPECT_NEAR(std::sqrt(s6 / n), 10e-3 / std::sqrt(6.0), 0.05 * 10e-3 / std::sqrt(6.0));
  EXPECT_NEAR(std::sqrt(s3 / n), 10e-3 / std::sqrt(3.0), 0.05 * 10e-3 / std::sqrt(3.0));
}

TEST(Offset, NoMismatchTripsAtZero) {
  const double trip = find_trip_point(ComparatorKind::Mashhadi2014, TestbenchConfig{}, kSim, {});
  EXPECT_LE(std::fabs(trip), kTripResolution);
}

TEST(Offset, InjectedShiftIsInputReferred) {
  const auto k = ComparatorKind::Proposed;
  const double trip = find_trip_point(k, TestbenchConfig{}, kSim, {{comparator_info(k).vin_device, 5e-3}});
  EXPECT_NEAR(trip, 5e-3, 1e-3);
  // direct check on either side of the reported trip point
  EXPECT_EQ(trip_decision(k, TestbenchConfig{}, kSim, {{"MF1", 5e-3}}, trip - 0.2e-3), Outcome::Minus);
  EXPECT_EQ(trip_decision(k, TestbenchConfig{}, kSim, {{"MF1", 5e-3}}, trip + 0.2e-3), Outcome::Plus);
}

TEST(Offset, UnbracketedSampleIsCounted) {
  const auto k = ComparatorKind::Jeon2010;
  EXPECT_THROW(find_trip_point(k, TestbenchConfig{}, kSim, {{"MF2", 80e-3}}), TripNotBracketed);
  McOptions mc{0.5, 2, 1};  // absurd mismatch: nothing brackets
  const auto r = mc_offset(k, TestbenchConfig{}, kSim, mc);
  EXPECT_EQ(r.trip_points.size(), 2u);
  EXPECT_EQ(r.failed, 2);
  EXPECT_FALSE(r.offset_sigma.has_value());
}

TEST(Offset, McRejectsBadOptions) {
  EXPECT_THROW(mc_offset(ComparatorKind::Proposed, TestbenchConfig{}, kSim, {1e-3, 0, 1}), std::invalid_argument);
  EXPECT_THROW(mc_offset(ComparatorKind::Proposed, TestbenchConfig{}, kSim, {-1e-3, 2, 1}), std::invalid_argument);
}

TEST(Offset, McDeterministicAndCsv) {
  const McOptions mc{5e-3, 3, 11};
  const auto a = mc_offset(ComparatorKind::Proposed, TestbenchConfig{}, kSim, mc);
  const auto b = mc_offset(ComparatorKind::Proposed, TestbenchConfig{}, kSim, mc);
  EXPECT_EQ(a.trip_points, b.trip_points);
  ASSERT_TRUE(a.offset_sigma.has_value());
  std::ostringstream csv;
  write_offset_csv(csv, a);
  EXPECT_TRUE(csv.str().starts_with("sample,trip_v\n0,"));
  EXPECT_NE(csv.str().find("\nsigma,"), std::string::npos);
}

TEST(Config, ReadsSettings) {
  std::istringstream in(
      "# comment\n"
      "tb.vdd = 0.9\n"
      "tb.dvin = -10m   # trailing comment\n"
      "tb.n_periods = 3\n"
      "sim.dt = 0.1p\n"
      "model.n.vth0 = 0.3\n"
      "size.F9 = 4\n");
  RunConfig rc;
  load_config(in, rc);
  EXPECT_EQ(rc.tb.vdd, 0.9);
  EXPECT_DOUBLE_EQ(rc.tb.dvin, -10e-3);
  EXPECT_EQ(rc.tb.n_periods, 3);
  EXPECT_DOUBLE_EQ(rc.sim.dt, 0.1e-12);
  EXPECT_EQ(rc.sim.models.n.vth0, 0.3);
  EXPECT_EQ(rc.sim.models.p, default_p_card());
  EXPECT_EQ(rc.tb.sizing.at("F9"), 4);
}

TEST(Config, ErrorsCarryLine) {
  RunConfig rc;
  std::istringstream bad_key("tb.vdd = 0.8\ntb.colour = 3\n");
  try {
    load_config(bad_key, rc);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream no_eq("tb.vdd 0.8\n");
  EXPECT_THROW(load_config(no_eq, rc), ConfigError);
  std::istringstream not_int("tb.n_periods = 2.5\n");
  EXPECT_THROW(load_config(not_int, rc), ConfigError);
}
