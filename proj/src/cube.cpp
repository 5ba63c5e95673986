#include "mstcam/cube.hpp"

namespace mstcam {

void check_width(int width) {
  if (width < 1 || width > kMaxWidth) {
    throw Error("word width " + std::to_string(width) + " outside [1, " +
                std::to_string(kMaxWidth) + "]");
  }
}

TernaryCube::TernaryCube(Word value, Word care, int width)
    : value_(value & care & low_mask(width)), care_(care & low_mask(width)), width_(width) {
  check_width(width);
}

TernaryCube TernaryCube::universe(int width) { return TernaryCube(0, 0, width); }

TernaryCube TernaryCube::from_prefix(Word bits, int length, int width) {
  if (length < 0 || length > width) {
    throw Error("prefix length " + std::to_string(length) + " exceeds width " +
                std::to_string(width));
  }
  return TernaryCube(bits, leading_mask(length, width), width);
}

TernaryCube TernaryCube::parse(std::string_view text) {
  const int width = static_cast<int>(text.size());
  check_width(width);
  Word value = 0;
  Word care = 0;
  for (char ch : text) {
    value <<= 1;
    care <<= 1;
    switch (ch) {
      case '0': care |= 1; break;
      case '1': care |= 1; value |= 1; break;
      case '-': break;
      default: throw Error(std::string("illegal ternary character '") + ch + "'");
    }
  }
  return TernaryCube(value, care, width);
}

TernaryCube TernaryCube::without_bit(int position) const {
  const Word bit = Word{1} << position;
  return TernaryCube(value_ & ~bit, care_ & ~bit, width_);
}

TernaryCube TernaryCube::with_bit(int position, bool set) const {
  const Word bit = Word{1} << position;
  return TernaryCube(set ? (value_ | bit) : (value_ & ~bit), care_ | bit, width_);
}

std::string TernaryCube::to_string() const {
  std::string out(static_cast<std::size_t>(width_), '-');
  for (int i = 0; i < width_; ++i) {
    const Word bit = Word{1} << (width_ - 1 - i);
    if (care_ & bit) out[static_cast<std::size_t>(i)] = (value_ & bit) ? '1' : '0';
  }
  return out;
}

bool cube_matches(const TernaryCube& cube, Word address) { return cube.matches(address); }

bool cube_contains(const TernaryCube& a, const TernaryCube& b) { return a.contains(b); }

std::optional<TernaryCube> try_merge(const TernaryCube& a, const TernaryCube& b) {
  if (a.width() != b.width() || a.care() != b.care()) return std::nullopt;
  const Word diff = a.value() ^ b.value();
  if (std::popcount(diff) != 1) return std::nullopt;
  return TernaryCube(a.value() & ~diff, a.care() & ~diff, a.width());
}

namespace {

// Rank of the rendered character at a bit: '-' < '0' < '1'.
int render_rank(const TernaryCube& c, Word bit) {
  if (!(c.care() & bit)) return 0;
  return (c.value() & bit) ? 2 : 1;
}

}  // namespace

bool candidate_less(const TernaryCube& a, const TernaryCube& b) {
  const int sa = a.specified_bits();
  const int sb = b.specified_bits();
  if (sa != sb) return sa > sb;
  const Word diff = (a.care() ^ b.care()) | (a.value() ^ b.value());
  if (diff == 0) return false;
  const Word top = Word{1} << (31 - std::countl_zero(diff));
  return render_rank(a, top) < render_rank(b, top);
}

std::string address_to_string(Word address, int width) {
  std::string out(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if (address & (Word{1} << (width - 1 - i))) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

}  // namespace mstcam
