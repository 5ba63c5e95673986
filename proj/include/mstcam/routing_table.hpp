#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mstcam/cube.hpp"

namespace mstcam {

/// A CIDR route entry. `bits` is aligned to the owning table's word width
/// (first prefix bit in the most significant position) and is zero beyond
/// `length`.
struct Prefix {
  Word bits = 0;
  int length = 0;
  Port port = 0;

  static Prefix make(Word bits, int length, Port port, int width);

  TernaryCube cube(int width) const { return TernaryCube::from_prefix(bits, length, width); }

  /// (bits, length) packed into one key.
  std::uint64_t key() const { return (std::uint64_t{bits} << 6) | static_cast<std::uint64_t>(length); }

  friend bool operator==(const Prefix&, const Prefix&) = default;
};

/// Renders the prefix as its significant 0/1 bits ("" for the default route).
std::string prefix_bits_string(const Prefix& p, int width);

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Ordered list of routes over a fixed word width. (bits, length) pairs are
/// unique; re-adding one with the same port is a no-op.
class RoutingTable {
 public:
  explicit RoutingTable(int width = kDefaultWidth);

  int width() const { return width_; }
  const std::vector<Prefix>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  enum class AddResult { kAdded, kDuplicate };

  /// Throws Error on a conflicting port for an existing (bits, length).
  AddResult add(const Prefix& p);

  /// Removes (bits, length). Returns the removed entry or nothing.
  std::optional<Prefix> remove(Word bits, int length);

  std::optional<Prefix> find(Word bits, int length) const;

  /// Distinct ports, ascending.
  std::vector<Port> ports() const;

  friend bool operator==(const RoutingTable& a, const RoutingTable& b) {
    return a.width_ == b.width_ && a.entries_ == b.entries_;
  }

 private:
  void reindex();

  int width_;
  std::vector<Prefix> entries_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Parses one prefix token: a 0/1 string of at most `width` characters, or
/// `a.b.c.d/len` when `width` is 32.
std::optional<Prefix> parse_prefix_token(std::string_view token, Port port, int width);

/// Reads the routing-table text format: `<prefix> <port>` per line, `#`
/// comments and blank lines ignored. A `# width N` comment must agree with
/// `width`. Errors are reported as ParseError with a 1-based line number.
RoutingTable parse_routing_table(std::istream& in, int width);
RoutingTable parse_routing_table(std::string_view text, int width);

/// Scans a stream for a `# width N` header without consuming the table.
std::optional<int> peek_width_header(std::istream& in);

/// Writes a table with a `# width N` header; parses back to the same entries.
void write_routing_table(std::ostream& out, const RoutingTable& table);

/// Reads one address: 0/1 string of exactly `width` chars, `0x` hex, or
/// dotted quad at width 32.
std::optional<Word> parse_address(std::string_view token, int width);
std::string format_address(Word address, int width);

std::vector<Word> parse_trace(std::istream& in, int width);
void write_trace(std::ostream& out, const std::vector<Word>& trace, int width);

}  // namespace mstcam
