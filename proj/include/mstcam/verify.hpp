#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mstcam/engine.hpp"
#include "mstcam/routing_table.hpp"

namespace mstcam {

enum class PropertyStatus { kPass, kFail, kSkipped };

struct PropertyResult {
  std::string name;
  PropertyStatus status = PropertyStatus::kPass;
  std::string detail;
  std::optional<Word> counterexample;
};

/// Widths up to this are checked over every address.
inline constexpr int kExhaustiveWidth = 12;

/// Stage configurations every property is checked under: the single stage,
/// power-of-two equal splits, one bit per stage, and near-even two- and
/// three-way splits.
std::vector<StageConfig> verification_configs(int width);

/// Every address when width <= kExhaustiveWidth; otherwise `samples` addresses,
/// half drawn from under table prefixes.
std::vector<Word> verification_addresses(const RoutingTable& table, std::size_t samples, std::uint64_t seed);

/// Checks, for `engine` under each of `configs`, against the engine's own
/// reference trie:
///   oracle-equivalence, strict-completeness (strict engines only),
///   config-independence, refinement-monotonicity, eps-bounds,
///   cross-port-disjointness and lookup-read-only.
std::vector<PropertyResult> verify_engine(const MstcamEngine& engine, const std::vector<StageConfig>& configs,
                                          const std::vector<Word>& addresses);

/// Applies `ops` seeded random insert/withdraw operations to an engine built
/// from `table`, comparing against a from-scratch rebuild and the reference
/// trie every `check_every` operations and at the end.
PropertyResult verify_updates(const RoutingTable& table, bool strict, std::size_t ops, std::uint64_t seed,
                              std::size_t check_every, std::size_t samples);

std::string to_string(PropertyStatus s);

}  // namespace mstcam
