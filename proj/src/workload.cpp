#include "mstcam/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mstcam/trie.hpp"
#include "rng.hpp"

namespace mstcam {

namespace {

using detail::Rng;

constexpr Port kProbePort = std::numeric_limits<Port>::max();

// True iff the prefix nests with (or equals) any prefix stored in `roots`.
bool nests(const LpmTrie& roots, const Prefix& p, int width) {
  return roots.cube_port_conflict(p.cube(width), kProbePort);
}

Port other_port(Rng& rng, Port ports, Port not_this) {
  if (ports <= 1) return not_this;
  const Port r = static_cast<Port>(rng.below(ports - 1));
  return r >= not_this ? r + 1 : r;
}

void check_feasible(int width, std::size_t entries) {
  check_width(width);
  if (width < 63 && entries > (std::uint64_t{1} << width)) {
    throw Error("cannot place " + std::to_string(entries) + " prefixes at width " + std::to_string(width));
  }
}

}  // namespace

TableParams TableParams::defaults_for(int width, std::size_t entries) {
  TableParams p;
  p.entries = entries;
  p.min_length = std::max(1, width / 4);
  p.max_length = std::max(p.min_length, (width * 3) / 4);
  p.max_extension = std::max(1, width / 5);
  return p;
}

RoutingTable generate_table(int width, const TableParams& params, std::uint64_t seed) {
  check_feasible(width, params.entries);
  if (params.ports == 0) throw Error("generate_table: need at least one port");
  if (params.min_length < 0 || params.max_length > width || params.min_length > params.max_length) {
    throw Error("generate_table: length range [" + std::to_string(params.min_length) + ", " +
                std::to_string(params.max_length) + "] invalid for width " + std::to_string(width));
  }
  if (params.child_fraction < 0 || params.child_fraction > 1 || params.duplicate_ratio < 0 ||
      params.duplicate_ratio > 1 || params.sibling_ratio < 0 || params.sibling_ratio > 1 ||
      params.max_extension < 1) {
    throw Error("generate_table: ratios must lie in [0, 1] and max_extension must be positive");
  }

  Rng rng(seed);
  RoutingTable table(width);
  LpmTrie roots(width);
  std::optional<Prefix> last_root;

  auto try_root = [&]() -> bool {
    Prefix p;
    if (last_root && rng.unit() < params.sibling_ratio && last_root->length > 0) {
      const Word step = Word{1} << (width - last_root->length);
      p = Prefix::make(last_root->bits + step, last_root->length, last_root->port, width);
      if (p.bits == 0) return false;  // wrapped around
    } else {
      const int len = rng.between(params.min_length, params.max_length);
      p = Prefix::make(rng.bits(width), len, static_cast<Port>(rng.below(params.ports)), width);
    }
    if (nests(roots, p, width)) return false;
    roots.insert(Prefix{p.bits, p.length, 0});
    table.add(p);
    last_root = p;
    return true;
  };

  auto try_child = [&]() -> bool {
    if (table.empty()) return false;
    const Prefix& parent = table.entries()[rng.below(table.size())];
    if (parent.length >= width) return false;
    const int len = std::min(width, parent.length + rng.between(1, params.max_extension));
    const Word extra = rng.bits(width) & ~leading_mask(parent.length, width);
    const Port port = rng.unit() < params.duplicate_ratio ? parent.port : other_port(rng, params.ports, parent.port);
    const Prefix child = Prefix::make(parent.bits | extra, len, port, width);
    if (table.find(child.bits, child.length)) return false;
    table.add(child);
    return true;
  };

  const std::size_t budget = params.entries * 64 + 1024;
  std::size_t attempts = 0;
  while (table.size() < params.entries) {
    if (++attempts > budget) {
      throw Error("generate_table: could only place " + std::to_string(table.size()) + " of " +
                  std::to_string(params.entries) + " prefixes with these parameters");
    }
    const bool want_child = !table.empty() && rng.unit() < params.child_fraction;
    if (want_child) {
      if (!try_child()) try_root();
    } else if (!try_root()) {
      try_child();
    }
  }
  return table;
}

RoutingTable generate_parent_child_table(int width, std::size_t parents, std::size_t children, std::uint64_t seed) {
  check_feasible(width, parents + children);
  Rng rng(seed);
  RoutingTable table(width);
  LpmTrie roots(width);
  // Parent lengths leave room below each parent for its children.
  int parent_len = 1;
  while ((std::size_t{1} << parent_len) < parents * 2 && parent_len < width) ++parent_len;
  if (parent_len >= width && children > 0) throw Error("no room for children below the parents");

  std::size_t attempts = 0;
  while (table.size() < parents) {
    if (++attempts > parents * 256 + 1024) throw Error("cannot place " + std::to_string(parents) + " parents");
    const Prefix p = Prefix::make(rng.bits(width), parent_len, static_cast<Port>(table.size()), width);
    if (nests(roots, p, width)) continue;
    roots.insert(p);
    table.add(p);
  }
  attempts = 0;
  while (table.size() < parents + children) {
    if (++attempts > children * 256 + 1024) throw Error("cannot place " + std::to_string(children) + " children");
    const Prefix& parent = table.entries()[rng.below(table.size())];
    if (parent.length >= width) continue;
    const int len = rng.between(parent.length + 1, width);
    const Word extra = rng.bits(width) & ~leading_mask(parent.length, width);
    const Prefix child = Prefix::make(parent.bits | extra, len, parent.port, width);
    if (table.find(child.bits, child.length)) continue;
    table.add(child);
  }
  return table;
}

std::vector<Word> generate_trace(const RoutingTable& table, std::size_t m, double hit_ratio, std::uint64_t seed) {
  if (hit_ratio < 0 || hit_ratio > 1) throw Error("generate_trace: hit ratio must lie in [0, 1]");
  if (hit_ratio > 0 && table.empty() && m > 0) throw Error("generate_trace: hit ratio > 0 needs a non-empty table");
  const int width = table.width();
  Rng rng(seed);
  std::vector<Word> trace;
  trace.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (hit_ratio > 0 && rng.unit() < hit_ratio) {
      const Prefix& p = table.entries()[rng.below(table.size())];
      trace.push_back(p.bits | (rng.bits(width) & ~leading_mask(p.length, width)));
    } else {
      trace.push_back(rng.bits(width));
    }
  }
  return trace;
}

}  // namespace mstcam
