#include "compsim/units.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace compsim {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::optional<double> parse_eng(std::string_view text) {
  if (text.empty()) return std::nullopt;
  // from_chars rejects a leading '+'
  std::string_view body = text;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const char* first = body.data();
  const char* last = body.data() + body.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;

  std::string rest = to_lower(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  if (rest.empty()) return value;
  if (!std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isalpha(c); })) {
    return std::nullopt;
  }
  double scale = 1.0;
  if (rest.rfind("meg", 0) == 0) {
    scale = 1e6;
  } else {
    switch (rest.front()) {
      case 'f': scale = 1e-15; break;
      case 'p': scale = 1e-12; break;
      case 'n': scale = 1e-9; break;
      case 'u': scale = 1e-6; break;
      case 'm': scale = 1e-3; break;
      case 'k': scale = 1e3; break;
      case 'g': scale = 1e9; break;
      case 't': scale = 1e12; break;
      default: scale = 1.0; break;  // bare unit such as "v" or "s"
    }
  }
  return value * scale;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace compsim
