#include "compsim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "compsim/units.hpp"

namespace compsim {

Netlist::Netlist() {
  node_names_.push_back("0");
  node_index_.emplace("0", kGround);
}

NodeId Netlist::intern_node(std::string_view name) {
  std::string key = to_lower(name);
  if (key == "gnd") key = "0";
  if (auto it = node_index_.find(key); it != node_index_.end()) return it->second;
  NodeId id = node_names_.size();
  node_names_.push_back(key);
  node_index_.emplace(std::move(key), id);
  return id;
}

std::optional<NodeId> Netlist::find_node(std::string_view name) const {
  std::string key = to_lower(name);
  if (key == "gnd") key = "0";
  if (auto it = node_index_.find(key); it != node_index_.end()) return it->second;
  return std::nullopt;
}

NodeId Netlist::node(std::string_view name) const {
  if (auto id = find_node(name)) return *id;
  throw std::out_of_range("unknown node '" + std::string(name) + "'");
}

std::optional<std::size_t> Netlist::find_source(std::string_view name) const {
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (iequals(sources[i].name, name)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Netlist::find_device(std::string_view name) const {
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (iequals(devices[i].name, name)) return i;
  }
  return std::nullopt;
}

NetlistError::NetlistError(std::size_t line, const std::string& reason)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
      line_(line),
      reason_(reason) {}

namespace {

struct LogicalLine {
  std::size_t number = 0;
  std::string text;
};

std::vector<LogicalLine> join_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    ++number;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '*') {
      if (end == text.size()) break;
      continue;
    }
    if (line[first] == '+') {
      if (out.empty()) throw ParseError(number, "continuation line with nothing to continue");
      out.back().text += ' ';
      out.back().text += line.substr(first + 1);
    } else {
      out.push_back({number, line.substr(first)});
    }
    if (end == text.size()) break;
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double number_or_throw(const std::string& tok, std::size_t line, const char* what) {
  auto v = parse_eng(tok);
  if (!v) throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  return *v;
}

struct Parser {
  Netlist n;
  std::set<std::string> names;  // lower-cased element names
  std::vector<std::pair<std::string, std::size_t>> pending_ic;

  void claim_name(const std::string& name, std::size_t line) {
    if (!names.insert(to_lower(name)).second) {
      throw ValidationError(line, "duplicate element name '" + name + "'");
    }
  }

  void parse_device(const std::vector<std::string>& t, std::size_t line) {
    if (t.size() < 5) throw ParseError(line, "device needs drain, gate, source and type=");
    DeviceInstance d;
    d.name = t[0];
    bool have_type = false;
    bool have_nfin = false;
    for (std::size_t i = 4; i < t.size(); ++i) {
      auto eq = t[i].find('=');
      if (eq == std::string::npos) throw ParseError(line, "expected key=value, got '" + t[i] + "'");
      std::string key = to_lower(t[i].substr(0, eq));
      std::string val = t[i].substr(eq + 1);
      if (key == "type") {
        std::string v = to_lower(val);
        if (v == "n") {
          d.polarity = Polarity::N;
        } else if (v == "p") {
          d.polarity = Polarity::P;
        } else {
          throw ParseError(line, "type must be n or p, got '" + val + "'");
        }
        have_type = true;
      } else if (key == "nfin") {
        double v = number_or_throw(val, line, "nfin");
        if (v != static_cast<double>(static_cast<long>(v))) {
          throw ParseError(line, "nfin must be an integer");
        }
        if (v <= 0) throw ValidationError(line, "nfin must be >= 1");
        d.nfin = static_cast<int>(v);
        have_nfin = true;
      } else if (key == "dvth") {
        d.vth_delta = number_or_throw(val, line, "dvth");
      } else {
        throw ParseError(line, "unknown device parameter '" + key + "'");
      }
    }
    if (!have_type) throw ParseError(line, "device is missing type=");
    if (!have_nfin) throw ParseError(line, "device is missing nfin=");
    claim_name(d.name, line);
    d.drain = n.intern_node(t[1]);
    d.gate = n.intern_node(t[2]);
    d.source = n.intern_node(t[3]);
    n.devices.push_back(std::move(d));
  }

  void parse_two_terminal(const std::vector<std::string>& t, std::size_t line) {
    if (t.size() != 4) throw ParseError(line, "expected <name> <n+> <n-> <value>");
    const bool is_cap = std::toupper(static_cast<unsigned char>(t[0][0])) == 'C';
    double v = number_or_throw(t[3], line, is_cap ? "capacitance" : "resistance");
    claim_name(t[0], line);
    if (is_cap) {
      if (v < 0) throw ValidationError(line, "capacitance must be >= 0");
      n.capacitors.push_back({t[0], n.intern_node(t[1]), n.intern_node(t[2]), v});
    } else {
      if (v <= 0) throw ValidationError(line, "resistance must be > 0");
      n.resistors.push_back({t[0], n.intern_node(t[1]), n.intern_node(t[2]), v});
    }
  }

  void parse_source(const std::string& text, std::size_t line) {
    std::string flat = text;
    std::replace_if(flat.begin(), flat.end(), [](char c) { return c == '(' || c == ')' || c == ','; }, ' ');
    auto t = split_tokens(flat);
    if (t.size() < 4) throw ParseError(line, "expected <name> <n+> <n-> dc <v> | pulse(...)");
    VoltageSource s;
    s.name = t[0];
    std::string kind = to_lower(t[3]);
    if (kind == "dc") {
      if (t.size() != 5) throw ParseError(line, "dc source takes exactly one value");
      s.spec = DcSpec{number_or_throw(t[4], line, "dc value")};
    } else if (kind == "pulse") {
      if (t.size() != 11) throw ParseError(line, "pulse takes 7 values: v1 v2 td tr tf pw per");
      PulseSpec p;
      p.v1 = number_or_throw(t[4], line, "v1");
      p.v2 = number_or_throw(t[5], line, "v2");
      p.tdelay = number_or_throw(t[6], line, "td");
      p.trise = number_or_throw(t[7], line, "tr");
      p.tfall = number_or_throw(t[8], line, "tf");
      p.twidth = number_or_throw(t[9], line, "pw");
      p.period = number_or_throw(t[10], line, "per");
      s.spec = p;
    } else if (t.size() == 4) {
      s.spec = DcSpec{number_or_throw(t[3], line, "dc value")};
    } else {
      throw ParseError(line, "unknown source kind '" + t[3] + "'");
    }
    claim_name(s.name, line);
    s.plus = n.intern_node(t[1]);
    s.minus = n.intern_node(t[2]);
    n.sources.push_back(std::move(s));
  }

  void parse_directive(const std::string& text, std::size_t line, bool& ended) {
    auto t = split_tokens(text);
    std::string kw = to_lower(t[0]);
    if (kw == ".end") {
      ended = true;
    } else if (kw == ".title") {
      std::size_t start = text.find_first_not_of(" \t", t[0].size());
      n.title = start == std::string::npos ? "" : text.substr(start);
      while (!n.title.empty() && std::isspace(static_cast<unsigned char>(n.title.back()))) n.title.pop_back();
    } else if (kw == ".tran") {
      if (t.size() != 3) throw ParseError(line, ".tran takes <step> <stop>");
      TranDirective tr{number_or_throw(t[1], line, "step"), number_or_throw(t[2], line, "stop")};
      if (!(tr.step > 0 && tr.step < tr.stop)) throw ValidationError(line, ".tran requires 0 < step < stop");
      n.tran = tr;
    } else if (kw == ".ic") {
      static const std::regex entry(R"(v\(\s*([^()\s]+)\s*\)\s*=\s*(\S+))", std::regex::icase);
      std::string rest = text.substr(t[0].size());
      std::size_t count = 0;
      for (auto it = std::sregex_iterator(rest.begin(), rest.end(), entry); it != std::sregex_iterator(); ++it) {
        double v = number_or_throw((*it)[2].str(), line, "initial condition");
        pending_ic.emplace_back((*it)[1].str(), line);
        ic_values.push_back(v);
        ++count;
      }
      if (count == 0) throw ParseError(line, ".ic expects v(<node>)=<volts>");
    } else {
      throw ParseError(line, "unknown directive '" + t[0] + "'");
    }
  }

  std::vector<double> ic_values;
};

void check_pulse(const PulseSpec& p, std::size_t line, const std::string& name) {
  if (!(p.trise > 0 && p.tfall > 0)) throw ValidationError(line, name + ": pulse rise and fall must be > 0");
  if (p.twidth < 0 || p.tdelay < 0) throw ValidationError(line, name + ": pulse delay and width must be >= 0");
  if (p.period > 0 && !(p.period > p.trise + p.tfall + p.twidth)) {
    throw ValidationError(line, name + ": pulse period must exceed rise + fall + width");
  }
}

}  // namespace

Netlist parse_netlist(std::string_view text) {
  Parser p;
  bool ended = false;
  for (const auto& ll : join_lines(text)) {
    if (ended) break;
    const char lead = static_cast<char>(std::toupper(static_cast<unsigned char>(ll.text[0])));
    switch (lead) {
      case 'M': p.parse_device(split_tokens(ll.text), ll.number); break;
      case 'C':
      case 'R': p.parse_two_terminal(split_tokens(ll.text), ll.number); break;
      case 'V': {
        p.parse_source(ll.text, ll.number);
        if (auto* pulse = std::get_if<PulseSpec>(&p.n.sources.back().spec)) {
          check_pulse(*pulse, ll.number, p.n.sources.back().name);
        }
        break;
      }
      case '.': p.parse_directive(ll.text, ll.number, ended); break;
      default: throw ParseError(ll.number, "unrecognised element '" + split_tokens(ll.text)[0] + "'");
    }
  }
  for (std::size_t i = 0; i < p.pending_ic.size(); ++i) {
    const auto& [name, line] = p.pending_ic[i];
    auto id = p.n.find_node(name);
    if (!id) throw ValidationError(line, ".ic refers to unknown node '" + name + "'");
    if (*id == kGround) throw ValidationError(line, ".ic cannot set the ground node");
    p.n.initial_conditions[*id] = p.ic_values[i];
  }
  validate_netlist(p.n);
  return std::move(p.n);
}

void validate_netlist(const Netlist& n) {
  std::set<std::string> names;
  auto claim = [&](const std::string& name) {
    if (name.empty()) throw ValidationError(0, "element with empty name");
    if (!names.insert(to_lower(name)).second) throw ValidationError(0, "duplicate element name '" + name + "'");
  };
  bool touches_ground = false;
  auto check_node = [&](NodeId id, const std::string& owner) {
    if (id >= n.node_count()) throw ValidationError(0, owner + " refers to a node outside the node table");
    if (id == kGround) touches_ground = true;
  };
  for (const auto& d : n.devices) {
    claim(d.name);
    if (d.nfin < 1) throw ValidationError(0, d.name + ": nfin must be >= 1");
    check_node(d.drain, d.name);
    check_node(d.gate, d.name);
    check_node(d.source, d.name);
  }
  for (const auto& c : n.capacitors) {
    claim(c.name);
    if (c.farads < 0) throw ValidationError(0, c.name + ": capacitance must be >= 0");
    check_node(c.plus, c.name);
    check_node(c.minus, c.name);
  }
  for (const auto& r : n.resistors) {
    claim(r.name);
    if (!(r.ohms > 0)) throw ValidationError(0, r.name + ": resistance must be > 0");
    check_node(r.plus, r.name);
    check_node(r.minus, r.name);
  }
  for (const auto& s : n.sources) {
    claim(s.name);
    check_node(s.plus, s.name);
    check_node(s.minus, s.name);
    if (const auto* p = std::get_if<PulseSpec>(&s.spec)) check_pulse(*p, 0, s.name);
  }
  if (n.tran && !(n.tran->step > 0 && n.tran->step < n.tran->stop)) {
    throw ValidationError(0, ".tran requires 0 < step < stop");
  }
  if (n.element_count() > 0 && !touches_ground) {
    throw ValidationError(0, "no element connects to ground node 0");
  }
}

namespace {

std::string node_list(const Netlist& n, std::initializer_list<NodeId> ids) {
  std::string out;
  for (NodeId id : ids) {
    out += ' ';
    out += n.node_name(id);
  }
  return out;
}

}  // namespace

std::string emit_netlist(const Netlist& n) {
  std::ostringstream out;
  out << ".title";
  if (!n.title.empty()) out << ' ' << n.title;
  out << '\n';
  for (const auto& s : n.sources) {
    out << s.name << node_list(n, {s.plus, s.minus});
    if (const auto* dc = std::get_if<DcSpec>(&s.spec)) {
      out << " dc " << format_double(dc->value) << '\n';
    } else {
      const auto& p = std::get<PulseSpec>(s.spec);
      out << " pulse(" << format_double(p.v1) << ' ' << format_double(p.v2) << ' ' << format_double(p.tdelay)
          << ' ' << format_double(p.trise) << ' ' << format_double(p.tfall) << ' ' << format_double(p.twidth)
          << ' ' << format_double(p.period) << ")\n";
    }
  }
  for (const auto& d : n.devices) {
    out << d.name << node_list(n, {d.drain, d.gate, d.source}) << " type=" << (d.polarity == Polarity::N ? 'n' : 'p')
        << " nfin=" << d.nfin;
    if (d.vth_delta != 0.0) out << " dvth=" << format_double(d.vth_delta);
    out << '\n';
  }
  for (const auto& c : n.capacitors) {
    out << c.name << node_list(n, {c.plus, c.minus}) << ' ' << format_double(c.farads) << '\n';
  }
  for (const auto& r : n.resistors) {
    out << r.name << node_list(n, {r.plus, r.minus}) << ' ' << format_double(r.ohms) << '\n';
  }
  if (n.tran) out << ".tran " << format_double(n.tran->step) << ' ' << format_double(n.tran->stop) << '\n';
  for (const auto& [id, v] : n.initial_conditions) {
    out << ".ic v(" << n.node_name(id) << ")=" << format_double(v) << '\n';
  }
  if (n.element_count() > 0 || n.tran || !n.initial_conditions.empty()) out << ".end\n";
  return out.str();
}

bool structurally_equal(const Netlist& a, const Netlist& b) {
  if (a.title != b.title || a.tran != b.tran) return false;
  std::set<std::string> na(a.node_names().begin(), a.node_names().end());
  std::set<std::string> nb(b.node_names().begin(), b.node_names().end());
  if (na != nb) return false;
  auto same = [&](NodeId x, NodeId y) { return a.node_name(x) == b.node_name(y); };

  if (a.devices.size() != b.devices.size() || a.capacitors.size() != b.capacitors.size() ||
      a.resistors.size() != b.resistors.size() || a.sources.size() != b.sources.size() ||
      a.initial_conditions.size() != b.initial_conditions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.devices.size(); ++i) {
    const auto& x = a.devices[i];
    const auto& y = b.devices[i];
    if (x.name != y.name || x.polarity != y.polarity || x.nfin != y.nfin || x.vth_delta != y.vth_delta ||
        !same(x.drain, y.drain) || !same(x.gate, y.gate) || !same(x.source, y.source)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.capacitors.size(); ++i) {
    const auto& x = a.capacitors[i];
    const auto& y = b.capacitors[i];
    if (x.name != y.name || x.farads != y.farads || !same(x.plus, y.plus) || !same(x.minus, y.minus)) return false;
  }
  for (std::size_t i = 0; i < a.resistors.size(); ++i) {
    const auto& x = a.resistors[i];
    const auto& y = b.resistors[i];
    if (x.name != y.name || x.ohms != y.ohms || !same(x.plus, y.plus) || !same(x.minus, y.minus)) return false;
  }
  for (std::size_t i = 0; i < a.sources.size(); ++i) {
    const auto& x = a.sources[i];
    const auto& y = b.sources[i];
    if (x.name != y.name || x.spec != y.spec || !same(x.plus, y.plus) || !same(x.minus, y.minus)) return false;
  }
  for (const auto& [id, v] : a.initial_conditions) {
    auto other = b.find_node(a.node_name(id));
    if (!other) return false;
    auto it = b.initial_conditions.find(*other);
    if (it == b.initial_conditions.end() || it->second != v) return false;
  }
  return true;
}

}  // namespace compsim
