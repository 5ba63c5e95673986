#include "mstcam/trie.hpp"

#include <algorithm>
#include <string>

namespace mstcam {

namespace {

constexpr std::uint64_t kOverflowBit = std::uint64_t{1} << 63;

bool mask_only_port(std::uint64_t mask, std::uint64_t port_bit, Port port) {
  if (mask == 0) return true;
  return port < 63 && mask == port_bit;
}

bool mask_has_other(std::uint64_t mask, std::uint64_t port_bit, Port port) {
  if (mask & ~port_bit) return true;
  // Ports >= 63 share one bit, so their presence cannot be ruled out.
  return port >= 63 && (mask & kOverflowBit);
}

bool mask_may_have_port(std::uint64_t mask, std::uint64_t port_bit) { return (mask & port_bit) != 0; }

}  // namespace

LpmTrie::LpmTrie(int width) : width_(width) {
  check_width(width);
  nodes_.emplace_back();
}

LpmTrie LpmTrie::build(const RoutingTable& table) {
  LpmTrie trie(table.width());
  for (const auto& e : table.entries()) trie.insert(e);
  return trie;
}

std::uint64_t LpmTrie::port_bit(Port p) { return p < 63 ? (std::uint64_t{1} << p) : kOverflowBit; }

std::uint64_t LpmTrie::below_mask(const Node& n) const {
  std::uint64_t m = 0;
  for (auto c : n.child) {
    if (c != kNone) m |= nodes_[static_cast<std::size_t>(c)].subtree_ports;
  }
  return m;
}

void LpmTrie::refresh_masks(std::int32_t index) {
  while (index != kNone) {
    Node& n = nodes_[static_cast<std::size_t>(index)];
    n.subtree_ports = below_mask(n) | (n.has_port ? port_bit(n.port) : 0);
    index = n.parent;
  }
}

std::int32_t LpmTrie::new_node(std::int32_t parent) {
  std::int32_t idx;
  if (!free_.empty()) {
    idx = free_.back();
    free_.pop_back();
    nodes_[static_cast<std::size_t>(idx)] = Node{};
  } else {
    idx = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
  }
  nodes_[static_cast<std::size_t>(idx)].parent = parent;
  return idx;
}

void LpmTrie::insert(const Prefix& p) {
  if (p.length < 0 || p.length > width_) throw Error("prefix length exceeds trie width");
  std::int32_t cur = 0;
  for (int d = 0; d < p.length; ++d) {
    const int b = static_cast<int>((p.bits >> (width_ - 1 - d)) & 1);
    std::int32_t next = nodes_[static_cast<std::size_t>(cur)].child[b];
    if (next == kNone) {
      next = new_node(cur);
      nodes_[static_cast<std::size_t>(cur)].child[b] = next;
    }
    cur = next;
  }
  Node& n = nodes_[static_cast<std::size_t>(cur)];
  if (!n.has_port) ++prefix_count_;
  n.has_port = true;
  n.port = p.port;
  refresh_masks(cur);
}

void LpmTrie::remove(Word bits, int length) {
  std::int32_t cur = 0;
  if (length < 0 || length > width_) cur = kNone;
  for (int d = 0; d < length && cur != kNone; ++d) {
    const int b = static_cast<int>((bits >> (width_ - 1 - d)) & 1);
    cur = nodes_[static_cast<std::size_t>(cur)].child[b];
  }
  if (cur == kNone || length < 0 || length > width_ || !nodes_[static_cast<std::size_t>(cur)].has_port) {
    throw Error("remove: prefix " + address_to_string(bits, width_).substr(0, static_cast<std::size_t>(
                                        std::max(length, 0))) + "/" + std::to_string(length) + " not present");
  }
  nodes_[static_cast<std::size_t>(cur)].has_port = false;
  --prefix_count_;
  // Prune now-empty branches.
  while (cur != 0) {
    Node& n = nodes_[static_cast<std::size_t>(cur)];
    if (n.has_port || n.child[0] != kNone || n.child[1] != kNone) break;
    const std::int32_t parent = n.parent;
    Node& p = nodes_[static_cast<std::size_t>(parent)];
    if (p.child[0] == cur) p.child[0] = kNone;
    else p.child[1] = kNone;
    free_.push_back(cur);
    cur = parent;
  }
  refresh_masks(cur);
}

std::optional<Port> LpmTrie::lookup(Word address) const {
  std::optional<Port> best;
  std::int32_t cur = 0;
  for (int d = 0;; ++d) {
    const Node& n = nodes_[static_cast<std::size_t>(cur)];
    if (n.has_port) best = n.port;
    if (d == width_) break;
    const int b = static_cast<int>((address >> (width_ - 1 - d)) & 1);
    cur = n.child[b];
    if (cur == kNone) break;
  }
  return best;
}

std::optional<Port> LpmTrie::exact(Word bits, int length) const {
  std::int32_t cur = 0;
  for (int d = 0; d < length && cur != kNone; ++d) {
    const int b = static_cast<int>((bits >> (width_ - 1 - d)) & 1);
    cur = nodes_[static_cast<std::size_t>(cur)].child[b];
  }
  if (cur == kNone) return std::nullopt;
  const Node& n = nodes_[static_cast<std::size_t>(cur)];
  if (!n.has_port) return std::nullopt;
  return n.port;
}

std::optional<LpmTrie::Ancestor> LpmTrie::parent_of(Word bits, int length) const {
  std::optional<Ancestor> best;
  std::int32_t cur = 0;
  for (int d = 0; d < length; ++d) {
    const Node& n = nodes_[static_cast<std::size_t>(cur)];
    if (n.has_port) best = Ancestor{d, n.port};
    const int b = static_cast<int>((bits >> (width_ - 1 - d)) & 1);
    cur = n.child[b];
    if (cur == kNone) break;
  }
  return best;
}

bool LpmTrie::cube_port_conflict(const TernaryCube& cube, Port port) const {
  return any_in_cube(cube, Query::kOtherPort, port);
}

bool LpmTrie::cube_has_unrouted(const TernaryCube& cube) const {
  return any_in_cube(cube, Query::kUnrouted, 0);
}

bool LpmTrie::cube_leaves_port(const TernaryCube& cube, Port port) const {
  return any_in_cube(cube, Query::kNotPort, port);
}

bool LpmTrie::any_in_cube(const TernaryCube& cube, Query q, Port port) const {
  if (cube.width() != width_) throw Error("cube width does not match trie width");
  return any_walk(0, 0, std::nullopt, cube, q, port);
}

bool LpmTrie::any_walk(std::int32_t index, int depth, std::optional<Port> inherited, const TernaryCube& cube,
                       Query q, Port port) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  const std::optional<Port> here = n.has_port ? std::optional<Port>(n.port) : inherited;
  auto hit = [&](std::optional<Port> v) {
    switch (q) {
      case Query::kOtherPort: return v.has_value() && *v != port;
      case Query::kUnrouted: return !v.has_value();
      case Query::kNotPort: return !v.has_value() || *v != port;
    }
    return false;
  };
  if (depth == width_) return hit(here);

  const std::uint64_t below = below_mask(n);
  const std::uint64_t pb = port_bit(port);
  switch (q) {
    case Query::kOtherPort:
      if (!hit(here) && !mask_has_other(below, pb, port)) return false;
      break;
    case Query::kUnrouted:
      if (here) return false;
      break;
    case Query::kNotPort:
      if (!hit(here) && !mask_has_other(below, pb, port)) return false;
      break;
  }

  const int bitpos = width_ - 1 - depth;
  const Word bit = Word{1} << bitpos;
  for (int b = 0; b < 2; ++b) {
    if ((cube.care() & bit) && static_cast<int>((cube.value() >> bitpos) & 1) != b) continue;
    const std::int32_t c = n.child[b];
    if (c == kNone) {
      if (hit(here)) return true;
    } else if (any_walk(c, depth + 1, here, cube, q, port)) {
      return true;
    }
  }
  return false;
}

std::vector<TernaryCube> LpmTrie::on_set_pieces(const TernaryCube& cube, Port port) const {
  if (cube.width() != width_) throw Error("cube width does not match trie width");
  std::vector<TernaryCube> out;
  if (pieces_walk(0, 0, std::nullopt, cube, port, out)) out.push_back(cube);
  return out;
}

bool LpmTrie::pieces_walk(std::int32_t index, int depth, std::optional<Port> inherited,
                          const TernaryCube& region, Port port, std::vector<TernaryCube>& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  const std::optional<Port> here = n.has_port ? std::optional<Port>(n.port) : inherited;
  const bool here_is_port = here.has_value() && *here == port;
  if (depth == width_) return here_is_port;

  const std::uint64_t below = below_mask(n);
  const std::uint64_t pb = port_bit(port);
  if (here_is_port && mask_only_port(below, pb, port)) return true;
  if (!here_is_port && !mask_may_have_port(below, pb)) return false;

  const int bitpos = width_ - 1 - depth;
  const Word bit = Word{1} << bitpos;
  bool whole[2] = {false, false};
  bool allowed[2] = {true, true};
  for (int b = 0; b < 2; ++b) {
    if ((region.care() & bit) && static_cast<int>((region.value() >> bitpos) & 1) != b) {
      allowed[b] = false;
      continue;
    }
    const std::int32_t c = n.child[b];
    whole[b] = c == kNone ? here_is_port
                          : pieces_walk(c, depth + 1, here, region.with_bit(bitpos, b != 0), port, out);
  }
  if ((!allowed[0] || whole[0]) && (!allowed[1] || whole[1])) return true;
  for (int b = 0; b < 2; ++b) {
    if (allowed[b] && whole[b]) out.push_back(region.with_bit(bitpos, b != 0));
  }
  return false;
}

}  // namespace mstcam
