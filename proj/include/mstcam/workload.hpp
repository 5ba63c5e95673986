#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mstcam/routing_table.hpp"

namespace mstcam {

/// Knobs of the synthetic routing-table generator.
///
/// Entries are either roots (pairwise non-nested prefixes) or children, which
/// extend a random existing entry by 1..max_extension bits. A child keeps its
/// parent's port with probability `duplicate_ratio`, otherwise it takes a
/// different random port. With probability `sibling_ratio` a root is placed
/// at the numeric neighbour of the previous root with the same length and
/// port, which produces mergeable runs like consecutive rows of a real table.
struct TableParams {
  std::size_t entries = 1000;
  Port ports = 8;
  int min_length = 8;
  int max_length = 24;
  double child_fraction = 0.4;
  double duplicate_ratio = 0.6;
  int max_extension = 6;
  double sibling_ratio = 0.4;

  /// Length bounds scaled to `width` (the defaults above are for 32 bits).
  static TableParams defaults_for(int width, std::size_t entries);
};

/// Deterministic for a given (width, params, seed). Throws Error when the
/// parameters cannot be met.
RoutingTable generate_table(int width, const TableParams& params, std::uint64_t seed);

/// `parents` disjoint prefixes, each with its own port, plus `children`
/// more-specific prefixes that all repeat their parent's port.
RoutingTable generate_parent_child_table(int width, std::size_t parents, std::size_t children, std::uint64_t seed);

/// `m` addresses; a `hit_ratio` fraction is drawn from under random table
/// prefixes, the rest uniformly from the whole address space.
std::vector<Word> generate_trace(const RoutingTable& table, std::size_t m, double hit_ratio, std::uint64_t seed);

}  // namespace mstcam
