#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace compsim {

using NodeId = std::size_t;
inline constexpr NodeId kGround = 0;

enum class Polarity { N, P };

struct DeviceInstance {
  std::string name;  // full element name including the leading 'M'
  Polarity polarity = Polarity::N;
  NodeId drain = kGround;
  NodeId gate = kGround;
  NodeId source = kGround;
  int nfin = 1;
  double vth_delta = 0.0;

  bool operator==(const DeviceInstance&) const = default;
};

struct Capacitor {
  std::string name;
  NodeId plus = kGround;
  NodeId minus = kGround;
  double farads = 0.0;

  bool operator==(const Capacitor&) const = default;
};

struct Resistor {
  std::string name;
  NodeId plus = kGround;
  NodeId minus = kGround;
  double ohms = 0.0;

  bool operator==(const Resistor&) const = default;
};

struct DcSpec {
  double value = 0.0;

  bool operator==(const DcSpec&) const = default;
};

struct PulseSpec {
  double v1 = 0.0;
  double v2 = 0.0;
  double tdelay = 0.0;
  double trise = 0.0;
  double tfall = 0.0;
  double twidth = 0.0;
  double period = 0.0;  // <= 0 means a single, non-repeating pulse

  bool operator==(const PulseSpec&) const = default;
};

using SourceSpec = std::variant<DcSpec, PulseSpec>;

struct VoltageSource {
  std::string name;
  NodeId plus = kGround;
  NodeId minus = kGround;
  SourceSpec spec = DcSpec{};

  bool operator==(const VoltageSource&) const = default;
};

struct TranDirective {
  double step = 0.0;
  double stop = 0.0;

  bool operator==(const TranDirective&) const = default;
};

/// Parsed circuit. Node 0 is always ground ("0"); other nodes are numbered in
/// order of first appearance. Node names are stored lower-case.
class Netlist {
 public:
  Netlist();

  std::string title;
  std::vector<DeviceInstance> devices;
  std::vector<Capacitor> capacitors;
  std::vector<Resistor> resistors;
  std::vector<VoltageSource> sources;
  std::optional<TranDirective> tran;
  std::map<NodeId, double> initial_conditions;

  /// Returns the id of `name`, adding it to the node table when new.
  NodeId intern_node(std::string_view name);
  std::optional<NodeId> find_node(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  NodeId node(std::string_view name) const;
  const std::string& node_name(NodeId id) const { return node_names_.at(id); }
  const std::vector<std::string>& node_names() const { return node_names_; }
  std::size_t node_count() const { return node_names_.size(); }

  std::optional<std::size_t> find_source(std::string_view name) const;
  std::optional<std::size_t> find_device(std::string_view name) const;

  std::size_t element_count() const {
    return devices.size() + capacitors.size() + resistors.size() + sources.size();
  }

  bool operator==(const Netlist&) const = default;

 private:
  std::vector<std::string> node_names_;
  std::map<std::string, NodeId, std::less<>> node_index_;
};

/// Base for every netlist diagnostic. `line()` is 1-based; 0 means the problem
/// is not tied to a single line.
class NetlistError : public std::runtime_error {
 public:
  NetlistError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class ParseError : public NetlistError {
 public:
  using NetlistError::NetlistError;
};

class ValidationError : public NetlistError {
 public:
  using NetlistError::NetlistError;
};

Netlist parse_netlist(std::string_view text);
std::string emit_netlist(const Netlist& n);

/// Equality up to node numbering: elements compared field by field with node
/// references resolved to names, node sets compared as sets.
bool structurally_equal(const Netlist& a, const Netlist& b);

/// Checks the structural invariants shared by parsed and programmatically
/// built netlists. Throws ValidationError.
void validate_netlist(const Netlist& n);

}  // namespace compsim
