#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mstcam/cube.hpp"
#include "mstcam/routing_table.hpp"

namespace mstcam {

/// Plain binary trie used as the longest-prefix-match reference. Each node
/// also records which ports occur in its subtree so cube-constrained walks
/// can skip regions whose routing is already known.
class LpmTrie {
 public:
  explicit LpmTrie(int width = kDefaultWidth);

  static LpmTrie build(const RoutingTable& table);

  int width() const { return width_; }
  std::size_t prefix_count() const { return prefix_count_; }

  /// Stores or overwrites the port of (bits, length).
  void insert(const Prefix& p);

  /// Throws Error if (bits, length) is not stored.
  void remove(Word bits, int length);

  std::optional<Port> lookup(Word address) const;

  /// Port stored exactly at (bits, length), if any.
  std::optional<Port> exact(Word bits, int length) const;

  struct Ancestor {
    int length;
    Port port;
  };
  /// Longest stored prefix strictly shorter than `length` that is a prefix of
  /// `bits`.
  std::optional<Ancestor> parent_of(Word bits, int length) const;

  /// True iff some address matched by `cube` has a defined LPM port other than
  /// `port`. Walks only the trie region inside the cube.
  bool cube_port_conflict(const TernaryCube& cube, Port port) const;

  /// True iff some address matched by `cube` has no LPM result.
  bool cube_has_unrouted(const TernaryCube& cube) const;

  /// True iff some address matched by `cube` does not route to `port`
  /// (including unrouted addresses).
  bool cube_leaves_port(const TernaryCube& cube, Port port) const;

  /// Disjoint cubes whose union is exactly {a in cube : lookup(a) == port}.
  /// Sibling regions that both route to `port` are returned as one cube.
  std::vector<TernaryCube> on_set_pieces(const TernaryCube& cube, Port port) const;

 private:
  static constexpr std::int32_t kNone = -1;

  struct Node {
    std::int32_t child[2] = {kNone, kNone};
    std::int32_t parent = kNone;
    bool has_port = false;
    Port port = 0;
    std::uint64_t subtree_ports = 0;
  };

  enum class Query { kOtherPort, kUnrouted, kNotPort };

  static std::uint64_t port_bit(Port p);
  std::uint64_t below_mask(const Node& n) const;
  void refresh_masks(std::int32_t index);
  std::int32_t new_node(std::int32_t parent);

  bool any_in_cube(const TernaryCube& cube, Query q, Port port) const;
  bool any_walk(std::int32_t node, int depth, std::optional<Port> inherited, const TernaryCube& cube,
                Query q, Port port) const;
  bool pieces_walk(std::int32_t node, int depth, std::optional<Port> inherited, const TernaryCube& region,
                   Port port, std::vector<TernaryCube>& out) const;

  int width_;
  std::size_t prefix_count_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> free_;
};

}  // namespace mstcam
