#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "mstcam/cube.hpp"
#include "mstcam/routing_table.hpp"
#include "mstcam/trie.hpp"

namespace mstcam {

/// The routes of one output port together with the cubes that replace them.
struct PartialRoutingTable {
  Port port = 0;
  std::vector<Prefix> source_prefixes;
  std::vector<TernaryCube> cubes;
};

struct MinimizedRow {
  TernaryCube cube;
  Port port = 0;

  friend bool operator==(const MinimizedRow&, const MinimizedRow&) = default;
};

/// Half-open row interval [begin, end).
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Rows grouped into one contiguous block per port, ascending by port.
struct MinimizedTable {
  int width = kDefaultWidth;
  bool strict = false;
  std::vector<MinimizedRow> rows;
  std::map<Port, RowRange> ranges;

  std::size_t row_count() const { return rows.size(); }
  friend bool operator==(const MinimizedTable&, const MinimizedTable&) = default;
};

/// Drops every entry whose parent (longest strictly shorter covering prefix in
/// the table) has the same port. Order of survivors is preserved.
RoutingTable eliminate_overlaps(const RoutingTable& table);

/// One PRT per distinct port, ascending by port, with cubes initialised to the
/// prefix embeddings.
std::vector<PartialRoutingTable> partition_prts(const RoutingTable& table);

/// Legality test for a candidate cube during minimization.
using CubeGuard = std::function<bool(const TernaryCube&)>;

/// Heuristic two-level minimizer over a cube set. Repeats until stable:
/// absorption of contained cubes, distance-1 merges, then (if `guard` is set)
/// single-bit expansion of each cube while `guard` accepts the result.
/// Candidates are visited in `candidate_less` order; low-order bits are tried
/// first.
std::vector<TernaryCube> minimize_cubes(std::vector<TernaryCube> cubes, const CubeGuard& guard);

/// Guard accepting cubes that stay inside the addresses `port` may claim: its
/// own on-set, plus unrouted space unless `strict`.
CubeGuard port_guard(const LpmTrie& oracle, Port port, bool strict);

/// Exact on-set of the PRT's source prefixes (addresses whose LPM is the PRT
/// port), as disjoint cubes.
std::vector<TernaryCube> prt_on_set(const PartialRoutingTable& prt, const LpmTrie& oracle);

/// Replaces `prt.cubes` with a minimized cover. `oracle` must hold the whole
/// table so that other ports' addresses are excluded.
PartialRoutingTable minimize_prt(const PartialRoutingTable& prt, const LpmTrie& oracle, bool strict);

/// Concatenates PRT cube lists in ascending port order and records ranges.
MinimizedTable merge_prts(std::vector<PartialRoutingTable> prts, int width, bool strict);

struct CompactOptions {
  /// Worker threads for per-PRT minimization; 0 picks the hardware count.
  unsigned threads = 0;
};

/// eliminate_overlaps -> partition_prts -> minimize_prt (per port) -> merge_prts.
MinimizedTable compact(const RoutingTable& table, bool strict, CompactOptions options = {});

/// True iff every address of `cube` is matched by some cube of `cover`.
bool covered_by_union(const TernaryCube& cube, const std::vector<TernaryCube>& cover);

/// Minimization POF: 100 * (1 - after / before); 0 for an empty table.
double minimization_pof(std::size_t rows_before, std::size_t rows_after);

/// Minimized-table text format: `#` header lines recording width, strict
/// flag and per-port ranges, then one `<ternary> <port>` row per line.
void write_minimized_table(std::ostream& out, const MinimizedTable& table);
MinimizedTable parse_minimized_table(std::istream& in);

}  // namespace mstcam
