#include "mstcam/routing_table.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace mstcam {

Prefix Prefix::make(Word bits, int length, Port port, int width) {
  check_width(width);
  if (length < 0 || length > width) {
    throw Error("prefix length " + std::to_string(length) + " exceeds width " +
                std::to_string(width));
  }
  return Prefix{bits & leading_mask(length, width), length, port};
}

std::string prefix_bits_string(const Prefix& p, int width) {
  return address_to_string(p.bits, width).substr(0, static_cast<std::size_t>(p.length));
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

RoutingTable::RoutingTable(int width) : width_(width) { check_width(width); }

RoutingTable::AddResult RoutingTable::add(const Prefix& p) {
  if (p.length > width_) throw Error("prefix longer than table width");
  const Prefix canon = Prefix::make(p.bits, p.length, p.port, width_);
  auto [it, inserted] = index_.try_emplace(canon.key(), entries_.size());
  if (!inserted) {
    const Prefix& existing = entries_[it->second];
    if (existing.port != canon.port) {
      throw Error("prefix " + prefix_bits_string(canon, width_) + "/" + std::to_string(canon.length) +
                  " already present with port " + std::to_string(existing.port));
    }
    return AddResult::kDuplicate;
  }
  entries_.push_back(canon);
  return AddResult::kAdded;
}

std::optional<Prefix> RoutingTable::remove(Word bits, int length) {
  const Prefix probe = Prefix::make(bits, length, 0, width_);
  auto it = index_.find(probe.key());
  if (it == index_.end()) return std::nullopt;
  const Prefix removed = entries_[it->second];
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(it->second));
  reindex();
  return removed;
}

std::optional<Prefix> RoutingTable::find(Word bits, int length) const {
  if (length < 0 || length > width_) return std::nullopt;
  const Prefix probe = Prefix::make(bits, length, 0, width_);
  auto it = index_.find(probe.key());
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

std::vector<Port> RoutingTable::ports() const {
  std::set<Port> ports;
  for (const auto& e : entries_) ports.insert(e.port);
  return {ports.begin(), ports.end()};
}

void RoutingTable::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].key(), i);
}

namespace {

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<Word> parse_dotted(std::string_view s) {
  Word value = 0;
  int parts = 0;
  while (!s.empty()) {
    const auto dot = s.find('.');
    const auto part = s.substr(0, dot);
    unsigned octet = 0;
    if (!parse_number(part, octet) || octet > 255) return std::nullopt;
    value = (value << 8) | octet;
    ++parts;
    if (dot == std::string_view::npos) break;
    s.remove_prefix(dot + 1);
    if (s.empty()) return std::nullopt;
  }
  if (parts != 4) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Returns the N of a `# width N` comment, if the line is one.
std::optional<int> width_header(std::string_view line) {
  auto fields = split_ws(line);
  if (fields.size() == 3 && fields[0] == "#" && fields[1] == "width") {
    int w = 0;
    if (parse_number(fields[2], w)) return w;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Prefix> parse_prefix_token(std::string_view token, Port port, int width) {
  if (const auto slash = token.find('/'); slash != std::string_view::npos) {
    if (width != 32) return std::nullopt;
    const auto addr = parse_dotted(token.substr(0, slash));
    int length = 0;
    if (!addr || !parse_number(token.substr(slash + 1), length) || length < 0 || length > 32) {
      return std::nullopt;
    }
    return Prefix::make(*addr, length, port, width);
  }
  if (token.size() > static_cast<std::size_t>(width)) return std::nullopt;
  if (token == "*") return Prefix::make(0, 0, port, width);
  Word bits = 0;
  for (char ch : token) {
    if (ch != '0' && ch != '1') return std::nullopt;
    bits = (bits << 1) | static_cast<Word>(ch == '1');
  }
  const int length = static_cast<int>(token.size());
  if (length == 0) return Prefix::make(0, 0, port, width);
  return Prefix::make(bits << (width - length), length, port, width);
}

RoutingTable parse_routing_table(std::istream& in, int width) {
  RoutingTable table(width);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto w = width_header(view); w && *w != width) {
      throw ParseError(line_no, "table header declares width " + std::to_string(*w) +
                                    " but width " + std::to_string(width) + " was requested");
    }
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = split_ws(view);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(line_no, "expected `<prefix> <port>`");
    Port port = 0;
    if (!parse_number(fields[1], port)) throw ParseError(line_no, "bad port '" + std::string(fields[1]) + "'");
    if (fields[0].size() > static_cast<std::size_t>(width) && fields[0].find('/') == std::string_view::npos &&
        fields[0].find_first_not_of("01") == std::string_view::npos) {
      throw ParseError(line_no, "prefix longer than width " + std::to_string(width));
    }
    const auto prefix = parse_prefix_token(fields[0], port, width);
    if (!prefix) throw ParseError(line_no, "malformed prefix '" + std::string(fields[0]) + "'");
    try {
      table.add(*prefix);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return table;
}

RoutingTable parse_routing_table(std::string_view text, int width) {
  std::istringstream in{std::string(text)};
  return parse_routing_table(in, width);
}

std::optional<int> peek_width_header(std::istream& in) {
  const auto start = in.tellg();
  std::string line;
  std::optional<int> found;
  while (std::getline(in, line)) {
    if (auto w = width_header(line)) {
      found = w;
      break;
    }
    const auto fields = split_ws(line);
    if (!fields.empty() && fields[0][0] != '#') break;
  }
  in.clear();
  in.seekg(start);
  return found;
}

void write_routing_table(std::ostream& out, const RoutingTable& table) {
  out << "# width " << table.width() << "\n";
  for (const auto& e : table.entries()) {
    std::string bits = prefix_bits_string(e, table.width());
    if (bits.empty()) bits = "*";
    out << bits << ' ' << e.port << '\n';
  }
}

std::optional<Word> parse_address(std::string_view token, int width) {
  if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
    Word v = 0;
    auto body = token.substr(2);
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, 16);
    if (ec != std::errc{} || ptr != body.data() + body.size() || (v & ~low_mask(width))) return std::nullopt;
    return v;
  }
  if (token.find('.') != std::string_view::npos) {
    if (width != 32) return std::nullopt;
    return parse_dotted(token);
  }
  if (token.size() != static_cast<std::size_t>(width)) return std::nullopt;
  Word v = 0;
  for (char ch : token) {
    if (ch != '0' && ch != '1') return std::nullopt;
    v = (v << 1) | static_cast<Word>(ch == '1');
  }
  return v;
}

std::string format_address(Word address, int width) {
  if (width != 32) return address_to_string(address, width);
  std::ostringstream s;
  s << (address >> 24) << '.' << ((address >> 16) & 0xff) << '.' << ((address >> 8) & 0xff) << '.'
    << (address & 0xff);
  return s.str();
}

std::vector<Word> parse_trace(std::istream& in, int width) {
  std::vector<Word> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto w = width_header(view); w && *w != width) {
      throw ParseError(line_no, "trace header declares width " + std::to_string(*w) +
                                    " but width " + std::to_string(width) + " was requested");
    }
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = split_ws(view);
    if (fields.empty()) continue;
    if (fields.size() != 1) throw ParseError(line_no, "expected one address per line");
    const auto addr = parse_address(fields[0], width);
    if (!addr) throw ParseError(line_no, "malformed address '" + std::string(fields[0]) + "'");
    trace.push_back(*addr);
  }
  return trace;
}

void write_trace(std::ostream& out, const std::vector<Word>& trace, int width) {
  out << "# width " << width << "\n";
  for (Word a : trace) out << format_address(a, width) << '\n';
}

}  // namespace mstcam
