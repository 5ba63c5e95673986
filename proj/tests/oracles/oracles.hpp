// Brute-force references the library is checked against. Nothing here calls
// into the trie or the minimizer.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mstcam/routing_table.hpp"

namespace oracle {

using mstcam::Port;
using mstcam::Prefix;
using mstcam::Word;

// Longest matching prefix by linear scan, comparing bit by bit from the top.
inline std::optional<Port> naive_lpm(const std::vector<Prefix>& entries, Word address, int width) {
  int best_len = -1;
  std::optional<Port> best;
  for (const auto& p : entries) {
    bool ok = true;
    for (int i = 0; i < p.length && ok; ++i) {
      const int bit = width - 1 - i;
      ok = ((p.bits >> bit) & 1u) == ((address >> bit) & 1u);
    }
    if (ok && p.length > best_len) {
      best_len = p.length;
      best = p.port;
    }
  }
  return best;
}

// Character-wise ternary match; pattern[0] is the most significant bit.
inline bool pattern_matches(const std::string& pattern, Word address, int width) {
  for (int i = 0; i < width; ++i) {
    const char c = pattern[static_cast<std::size_t>(i)];
    const unsigned bit = (address >> (width - 1 - i)) & 1u;
    if (c == '-') continue;
    if ((c == '1') != (bit == 1)) return false;
  }
  return true;
}

// Every ternary pattern of the given width.
inline std::vector<std::string> all_patterns(int width) {
  std::vector<std::string> out{""};
  for (int i = 0; i < width; ++i) {
    std::vector<std::string> next;
    for (const auto& s : out) {
      for (char c : {'0', '1', '-'}) next.push_back(s + c);
    }
    out = std::move(next);
  }
  return out;
}

enum class Cell { kOff, kOn, kDontCare };

// Size of a smallest set of cubes covering every kOn address and no kOff
// address, by prime enumeration plus branch-and-bound set cover. Intended for
// width <= 8.
inline std::size_t min_cover_size(const std::vector<Cell>& f, int width) {
  const std::size_t n = std::size_t{1} << width;
  std::vector<std::vector<Word>> implicants;  // addresses covered by each legal cube
  std::vector<std::string> legal;
  for (const auto& pat : all_patterns(width)) {
    std::vector<Word> covered;
    bool ok = true, any_on = false;
    for (std::size_t a = 0; a < n && ok; ++a) {
      if (!pattern_matches(pat, static_cast<Word>(a), width)) continue;
      if (f[a] == Cell::kOff) ok = false;
      if (f[a] == Cell::kOn) any_on = true;
      covered.push_back(static_cast<Word>(a));
    }
    if (ok && any_on) {
      legal.push_back(pat);
      implicants.push_back(std::move(covered));
    }
  }
  // Primes: legal cubes not strictly inside another legal cube.
  auto inside = [&](const std::string& a, const std::string& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (b[i] != '-' && a[i] != b[i]) return false;
    }
    return a != b;
  };
  std::vector<std::vector<Word>> primes;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    bool prime = true;
    for (std::size_t j = 0; j < legal.size() && prime; ++j) prime = !inside(legal[i], legal[j]);
    if (prime) {
      std::vector<Word> on;
      for (Word a : implicants[i]) {
        if (f[a] == Cell::kOn) on.push_back(a);
      }
      primes.push_back(std::move(on));
    }
  }
  std::vector<Word> minterms;
  for (std::size_t a = 0; a < n; ++a) {
    if (f[a] == Cell::kOn) minterms.push_back(static_cast<Word>(a));
  }
  if (minterms.empty()) return 0;
  std::vector<std::vector<std::size_t>> covering(n);
  for (std::size_t p = 0; p < primes.size(); ++p) {
    for (Word a : primes[p]) covering[a].push_back(p);
  }

  std::size_t best = minterms.size();  // one cube per minterm always works
  std::vector<int> count(n, 0);
  auto rec = [&](auto&& self, std::size_t used) -> void {
    if (used >= best) return;
    // Branch on the uncovered minterm with the fewest covering primes.
    std::optional<Word> pick;
    std::size_t fewest = SIZE_MAX, uncovered = 0;
    for (Word a : minterms) {
      if (count[a] > 0) continue;
      ++uncovered;
      if (covering[a].size() < fewest) {
        fewest = covering[a].size();
        pick = a;
      }
    }
    if (!pick) {
      best = used;
      return;
    }
    // Lower bound: each further cube covers at most the largest prime.
    std::size_t largest = 1;
    for (const auto& p : primes) largest = std::max(largest, p.size());
    if (used + (uncovered + largest - 1) / largest >= best) return;
    for (std::size_t p : covering[*pick]) {
      for (Word a : primes[p]) ++count[a];
      self(self, used + 1);
      for (Word a : primes[p]) --count[a];
    }
  };
  rec(rec, 0);
  return best;
}

}  // namespace oracle
