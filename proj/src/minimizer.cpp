#include <algorithm>
#include <bit>
#include <unordered_map>
#include <unordered_set>

#include "mstcam/compaction.hpp"

namespace mstcam {

namespace {

void sort_candidates(std::vector<TernaryCube>& cubes) {
  std::sort(cubes.begin(), cubes.end(), candidate_less);
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
}

// Drops duplicates and every cube contained in another cube of the set.
void absorb(std::vector<TernaryCube>& cubes) {
  sort_candidates(cubes);
  std::unordered_map<Word, std::unordered_set<Word>> by_care;
  for (const auto& c : cubes) by_care[c.care()].insert(c.value());
  std::vector<Word> cares;
  cares.reserve(by_care.size());
  for (const auto& [care, values] : by_care) cares.push_back(care);
  std::sort(cares.begin(), cares.end(), [](Word a, Word b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  std::vector<TernaryCube> kept;
  kept.reserve(cubes.size());
  for (const auto& c : cubes) {
    bool contained = false;
    for (Word g : cares) {
      if (std::popcount(g) >= c.specified_bits()) break;
      if (g & ~c.care()) continue;
      if (by_care[g].count(c.value() & g)) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(c);
  }
  cubes = std::move(kept);
}

// One sweep of distance-1 merges. Each cube takes part in at most one merge
// per sweep; merged results are considered by the next sweep.
bool merge_sweep(std::vector<TernaryCube>& cubes) {
  sort_candidates(cubes);
  std::unordered_map<TernaryCube, std::size_t> index;
  index.reserve(cubes.size() * 2);
  for (std::size_t i = 0; i < cubes.size(); ++i) index.emplace(cubes[i], i);

  std::vector<bool> used(cubes.size(), false);
  std::vector<TernaryCube> merged;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (used[i]) continue;
    const TernaryCube& c = cubes[i];
    for (Word rest = c.care(); rest != 0; rest &= rest - 1) {
      const Word bit = rest & (~rest + 1);
      const TernaryCube partner(c.value() ^ bit, c.care(), c.width());
      auto it = index.find(partner);
      if (it == index.end() || used[it->second]) continue;
      used[i] = used[it->second] = true;
      merged.push_back(*try_merge(c, partner));
      break;
    }
  }
  if (merged.empty()) return false;
  std::vector<TernaryCube> next;
  next.reserve(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (!used[i]) next.push_back(cubes[i]);
  }
  next.insert(next.end(), merged.begin(), merged.end());
  cubes = std::move(next);
  return true;
}

// Raises each cube bit by bit while the guard accepts the larger cube.
bool expand_sweep(std::vector<TernaryCube>& cubes, const CubeGuard& guard) {
  sort_candidates(cubes);
  bool changed = false;
  for (auto& c : cubes) {
    for (Word rest = c.care(); rest != 0; rest &= rest - 1) {
      const int pos = std::countr_zero(rest);
      const TernaryCube wider = c.without_bit(pos);
      if (guard(wider)) {
        c = wider;
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

std::vector<TernaryCube> minimize_cubes(std::vector<TernaryCube> cubes, const CubeGuard& guard) {
  absorb(cubes);
  for (;;) {
    while (merge_sweep(cubes)) absorb(cubes);
    if (!guard || !expand_sweep(cubes, guard)) break;
    absorb(cubes);
  }
  sort_candidates(cubes);
  return cubes;
}

CubeGuard port_guard(const LpmTrie& oracle, Port port, bool strict) {
  if (strict) {
    return [&oracle, port](const TernaryCube& c) { return !oracle.cube_leaves_port(c, port); };
  }
  return [&oracle, port](const TernaryCube& c) { return !oracle.cube_port_conflict(c, port); };
}

bool covered_by_union(const TernaryCube& cube, const std::vector<TernaryCube>& cover) {
  std::vector<TernaryCube> relevant;
  for (const auto& c : cover) {
    if (c.contains(cube)) return true;
    if (c.intersects(cube)) relevant.push_back(c);
  }
  if (relevant.empty()) return false;
  // Split on the highest bit that is free in `cube` but fixed somewhere else.
  Word split = 0;
  for (const auto& c : relevant) split |= c.care() & ~cube.care();
  if (split == 0) return false;
  const int pos = 31 - std::countl_zero(split);
  return covered_by_union(cube.with_bit(pos, false), relevant) &&
         covered_by_union(cube.with_bit(pos, true), relevant);
}

}  // namespace mstcam
