#include <gtest/gtest.h>

#include <random>

#include "compsim/netlist.hpp"

using namespace compsim;

namespace {

const char* kThreeElement =
    "Vd vdd 0 dc 0.8\n"
    "M1 out in 0 type=n nfin=2\n"
    "C1 out 0 1f\n"
    ".tran 0.05p 600p\n";

template <typename E>
std::size_t error_line(const std::string& text) {
  try {
    parse_netlist(text);
  } catch (const E& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected diagnostic for: " << text;
  return 0;
}

}  // namespace

TEST(ParseNetlist, ThreeElementExample) {
  Netlist n = parse_netlist(kThreeElement);
  EXPECT_EQ(n.devices.size(), 1u);
  EXPECT_EQ(n.capacitors.size(), 1u);
  EXPECT_EQ(n.sources.size(), 1u);
  ASSERT_TRUE(n.tran);
  EXPECT_DOUBLE_EQ(n.tran->step, 5e-14);
  EXPECT_DOUBLE_EQ(n.tran->stop, 600e-12);
  EXPECT_EQ(n.devices[0].nfin, 2);
  EXPECT_EQ(n.devices[0].polarity, Polarity::N);
  EXPECT_DOUBLE_EQ(std::get<DcSpec>(n.sources[0].spec).value, 0.8);
  EXPECT_DOUBLE_EQ(n.capacitors[0].farads, 1e-15);
}

TEST(ParseNetlist, NodeOrderIsFirstAppearanceGroundFirst) {
  Netlist n = parse_netlist(kThreeElement);
  const std::vector<std::string> expected{"0", "vdd", "out", "in"};
  EXPECT_EQ(n.node_names(), expected);
  EXPECT_EQ(n.node("OUT"), 2u);
  EXPECT_EQ(n.node("gnd"), kGround);
}

TEST(ParseNetlist, EmptyTextHasOnlyGround) {
  Netlist n = parse_netlist("");
  EXPECT_EQ(n.node_count(), 1u);
  EXPECT_EQ(n.node_name(0), "0");
  EXPECT_EQ(n.element_count(), 0u);
  EXPECT_FALSE(n.tran);
}

TEST(ParseNetlist, CommentsBlankLinesAndContinuations) {
  Netlist n = parse_netlist(
      "* a comment\n"
      "\n"
      "Vclk clk 0 pulse(0 0.8 0 4p\n"
      "+ 4p 96p 200p)\n"
      "  * indented comment\n"
      "R1 clk out 1k\n"
      "C1 out 0 2fF\n"
      ".ic v(out)=0.25\n"
      ".end\n"
      "R2 this is ignored after end\n");
  ASSERT_EQ(n.sources.size(), 1u);
  const auto& p = std::get<PulseSpec>(n.sources[0].spec);
  EXPECT_DOUBLE_EQ(p.v2, 0.8);
  EXPECT_DOUBLE_EQ(p.twidth, 96e-12);
  EXPECT_DOUBLE_EQ(p.period, 200e-12);
  EXPECT_EQ(n.resistors.size(), 1u);
  EXPECT_DOUBLE_EQ(n.initial_conditions.at(n.node("out")), 0.25);
}

TEST(ParseNetlist, DeviceOptions) {
  Netlist n = parse_netlist("MP1 d g s TYPE=P NFIN=3 dvth=-2m\nR1 s 0 1k\n");
  EXPECT_EQ(n.devices[0].polarity, Polarity::P);
  EXPECT_EQ(n.devices[0].nfin, 3);
  EXPECT_DOUBLE_EQ(n.devices[0].vth_delta, -2e-3);
}

TEST(ParseNetlist, NfinZeroIsValidationError) {
  EXPECT_THROW(parse_netlist("M1 a b c type=n nfin=0"), ValidationError);
  EXPECT_EQ(error_line<ValidationError>("* hdr\nV1 a 0 dc 1\nM1 a b c type=n nfin=0\n"), 3u);
}

TEST(ParseNetlist, DuplicateNamesCaseInsensitive) {
  EXPECT_EQ(error_line<ValidationError>("R1 a 0 1k\nr1 a 0 2k\n"), 2u);
}

TEST(ParseNetlist, MissingGround) {
  EXPECT_THROW(parse_netlist("R1 a b 1k\nC1 b c 1f\n"), ValidationError);
}

TEST(ParseNetlist, MalformedLinesReportLineNumbers) {
  EXPECT_EQ(error_line<ParseError>("R1 a 0 1k\nR2 a 0\n"), 2u);
  EXPECT_EQ(error_line<ParseError>("R1 a 0 1k\n\nX1 a 0 foo\n"), 3u);
  EXPECT_EQ(error_line<ParseError>("M1 a b 0 type=q nfin=1\n"), 1u);
  EXPECT_EQ(error_line<ParseError>("V1 a 0 pulse(0 1 0 1p 1p)\n"), 1u);
  EXPECT_EQ(error_line<ParseError>("V1 a 0 dc 1\n.tran 1p\n"), 2u);
  EXPECT_EQ(error_line<ParseError>("+ dangling\n"), 1u);
  EXPECT_EQ(error_line<ValidationError>("V1 a 0 dc 1\n.ic v(zz)=1\n"), 2u);
  EXPECT_EQ(error_line<ValidationError>("V1 a 0 pulse(0 1 0 0 1p 1p 10p)\n"), 1u);
  EXPECT_EQ(error_line<ValidationError>("V1 a 0 pulse(0 1 0 1p 1p 10p 10p)\n"), 1u);
  EXPECT_EQ(error_line<ValidationError>("V1 a 0 dc 1\n.tran 2p 1p\n"), 2u);
}

TEST(ParseNetlist, TotalOnRandomInput) {
  // Every input yields a netlist or a located diagnostic; nothing else escapes.
  std::mt19937 rng(7);
  const std::vector<std::string> pieces{"M1", "R1", "C2", "V3", "a", "0", "b", "type=n", "nfin=2", "1k",
                                        "dc", "pulse(", ")", ".tran", ".ic", "v(a)=1", "+", "*", "\n", " ",
                                        "1f", "=", "(", "dvth=1m", ".end", "x", "-3"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = 1 + trial % 30;
    for (int k = 0; k < len; ++k) text += pieces[pick(rng)] + ((k % 3 == 2) ? "\n" : " ");
    try {
      parse_netlist(text);
    } catch (const NetlistError& e) {
      const bool located = e.line() > 0 || dynamic_cast<const ValidationError*>(&e) != nullptr;
      EXPECT_TRUE(located) << text;
    }
  }
}

TEST(EmitNetlist, RoundTripThreeElement) {
  Netlist n = parse_netlist(kThreeElement);
  Netlist back = parse_netlist(emit_netlist(n));
  EXPECT_TRUE(structurally_equal(n, back));
  EXPECT_EQ(n, back);
}

TEST(EmitNetlist, EmptyIsTitleOnly) {
  Netlist n = parse_netlist("");
  EXPECT_EQ(emit_netlist(n), ".title\n");
  n.title = "bench";
  EXPECT_EQ(emit_netlist(n), ".title bench\n");
  EXPECT_TRUE(structurally_equal(parse_netlist(emit_netlist(n)), n));
}

TEST(EmitNetlist, RoundTripAcrossElementOrder) {
  // Capacitor first: node numbering changes on re-parse, structure does not.
  Netlist n = parse_netlist(
      ".title ordering\n"
      "C1 x 0 3f\nR1 y x 2k\nV1 y 0 pulse(0 0.8 1p 2p 2p 5p 20p)\nM9 x y 0 type=p nfin=4 dvth=0.001\n"
      ".ic v(x)=0.1\n.tran 0.1p 40p\n");
  Netlist back = parse_netlist(emit_netlist(n));
  EXPECT_TRUE(structurally_equal(n, back));
  back.capacitors[0].farads = 4e-15;
  EXPECT_FALSE(structurally_equal(n, back));
}

TEST(ValidateNetlist, CatchesBuiltNetlistDefects) {
  Netlist n;
  NodeId a = n.intern_node("a");
  n.resistors.push_back({"R1", a, kGround, 1e3});
  EXPECT_NO_THROW(validate_netlist(n));
  n.devices.push_back({"M1", Polarity::N, a, a, kGround, 0, 0.0});
  EXPECT_THROW(validate_netlist(n), ValidationError);
  n.devices.back().nfin = 1;
  n.capacitors.push_back({"r1", a, kGround, 1e-15});
  EXPECT_THROW(validate_netlist(n), ValidationError);
}
