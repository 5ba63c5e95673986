#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mstcam {

/// Address word. Bit (width - 1) is the most significant, first-compared bit.
using Word = std::uint32_t;

/// Next-hop identifier.
using Port = std::uint32_t;

inline constexpr int kMaxWidth = 32;
inline constexpr int kDefaultWidth = 32;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mask of the low `width` bits.
constexpr Word low_mask(int width) {
  return width >= 32 ? ~Word{0} : ((Word{1} << width) - 1);
}

/// Mask of the `length` leading (most significant) bits of a `width`-bit word.
constexpr Word leading_mask(int length, int width) {
  if (length <= 0) return 0;
  return low_mask(width) & ~low_mask(width - length);
}

void check_width(int width);

/// Ternary word: `care` selects specified bits, `value` holds them. Bits outside
/// `care` are kept at zero so that equality is bitwise.
class TernaryCube {
 public:
  constexpr TernaryCube() = default;
  TernaryCube(Word value, Word care, int width);

  /// The all-don't-care cube.
  static TernaryCube universe(int width);
  /// A prefix of `length` leading bits taken from `bits`.
  static TernaryCube from_prefix(Word bits, int length, int width);
  /// Parses a `width`-character string over {0,1,-}.
  static TernaryCube parse(std::string_view text);

  Word value() const { return value_; }
  Word care() const { return care_; }
  int width() const { return width_; }
  int specified_bits() const { return std::popcount(care_); }

  bool matches(Word address) const { return (address & care_) == value_; }

  /// True iff every address matched by `other` is matched by this cube.
  bool contains(const TernaryCube& other) const {
    return (care_ & ~other.care_) == 0 && ((value_ ^ other.value_) & care_) == 0;
  }

  bool intersects(const TernaryCube& other) const {
    return ((value_ ^ other.value_) & care_ & other.care_) == 0;
  }

  /// Demotes the bit at `position` (0 = least significant) to don't-care.
  TernaryCube without_bit(int position) const;

  /// Restricts to the bit at `position` fixed to `bit`.
  TernaryCube with_bit(int position, bool bit) const;

  /// Number of addresses matched, as a power of two exponent.
  int free_bits() const { return width_ - specified_bits(); }

  std::string to_string() const;

  friend bool operator==(const TernaryCube&, const TernaryCube&) = default;

 private:
  Word value_ = 0;
  Word care_ = 0;
  int width_ = 0;
};

bool cube_matches(const TernaryCube& cube, Word address);
bool cube_contains(const TernaryCube& a, const TernaryCube& b);

/// Distance-1 merge: equal care masks differing in exactly one specified bit.
/// The result matches exactly the union of `a` and `b`.
std::optional<TernaryCube> try_merge(const TernaryCube& a, const TernaryCube& b);

/// Ordering used wherever the minimizer needs a deterministic candidate
/// sequence: more specified bits first, then lexicographic rendering.
bool candidate_less(const TernaryCube& a, const TernaryCube& b);

/// Renders `address` as `width` characters over {0,1}.
std::string address_to_string(Word address, int width);

}  // namespace mstcam

template <>
struct std::hash<mstcam::TernaryCube> {
  std::size_t operator()(const mstcam::TernaryCube& c) const noexcept {
    std::uint64_t key = (std::uint64_t{c.value()} << 32) | c.care();
    key ^= static_cast<std::uint64_t>(c.width()) * 0x9e3779b97f4a7c15ULL;
    return std::hash<std::uint64_t>{}(key);
  }
};
