#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mstcam/compaction.hpp"
#include "mstcam/cube.hpp"
#include "mstcam/routing_table.hpp"
#include "mstcam/trie.hpp"

namespace mstcam {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Stage widths W_1..W_k of a multi-stage TCAM row, most significant stage
/// first. A valid configuration for word width M has every W_i >= 1 and
/// sum(W_i) == M.
class StageConfig {
 public:
  StageConfig() = default;
  explicit StageConfig(std::vector<int> widths) : widths_(std::move(widths)) {}

  /// Parses `w1,w2,...`.
  static StageConfig parse(std::string_view text);
  static StageConfig single(int width) { return StageConfig({width}); }
  /// k stages of width/k bits each; throws if k does not divide width.
  static StageConfig equal_split(int width, int stages);

  const std::vector<int>& widths() const { return widths_; }
  int stages() const { return static_cast<int>(widths_.size()); }
  int total() const;

  /// Throws ConfigError naming the widths and M when invalid for `width`.
  void validate(int width) const;
  bool valid_for(int width) const;

  /// True iff every stage boundary of `coarser` is also a boundary here.
  bool refines(const StageConfig& coarser) const;

  /// `w1+w2+...`
  std::string to_string() const;

  friend bool operator==(const StageConfig&, const StageConfig&) = default;

 private:
  std::vector<int> widths_;
};

/// Splits an address into per-stage sub-words (the data registers), most
/// significant part first.
std::vector<Word> split_address(Word address, const StageConfig& config, int width);

struct LookupResult {
  std::optional<Port> port;
  /// Enabled ternary cells charged for this search.
  std::uint64_t eps = 0;
  std::optional<std::size_t> matched_row;
};

struct LpmChoice {
  std::size_t row;
  Port port;
};

/// Picks the matched row with the most specified bits, lowest index on ties.
std::optional<LpmChoice> select_lpm(std::span<const MinimizedRow> rows, std::span<const std::size_t> matched);

/// Behavioral model of a multi-stage TCAM array holding a minimized routing
/// table. Row j's stage i+1 is enabled only if its stage i matched; each
/// enabled stage charges its width in cells.
///
/// The engine keeps the full routing table and a reference trie alongside the
/// rows so that prefixes can be inserted and withdrawn incrementally.
class MstcamEngine {
 public:
  /// Builds from precomputed rows. `shadow` is the routing table the rows were
  /// compacted from.
  MstcamEngine(const MinimizedTable& minimized, StageConfig config, const RoutingTable& shadow, bool strict);

  /// Compacts `table` and builds an engine over the result.
  static MstcamEngine from_table(const RoutingTable& table, StageConfig config, bool strict);

  /// Same rows and state, segmented for a different stage configuration.
  MstcamEngine reconfigured(StageConfig config) const;

  int width() const { return width_; }
  bool strict() const { return strict_; }
  const StageConfig& config() const { return config_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<MinimizedRow>& rows() const { return rows_; }
  const std::map<Port, RowRange>& ranges() const { return ranges_; }
  const RoutingTable& shadow() const { return shadow_; }
  const LpmTrie& oracle() const { return oracle_; }

  /// Stage segments of row `row`, one sub-cube per stage.
  std::vector<TernaryCube> segments(std::size_t row) const;

  /// Current rows and ranges as a minimized table.
  MinimizedTable minimized() const;

  /// S * M: cells charged by a search that enables every stage of every row.
  std::uint64_t eps_max() const;

  LookupResult lookup(Word address) const;

  enum class UpdateEffect { kRowsChanged, kShadowOnly, kNoChange };

  /// Adds a route. A prefix whose parent has the same port only updates the
  /// shadow table. Throws Error on a conflicting duplicate.
  UpdateEffect insert(const Prefix& prefix);

  /// Removes a route. Throws Error if absent.
  UpdateEffect withdraw(Word bits, int length);

 private:
  struct PortBlock {
    std::vector<Prefix> sources;
    std::vector<TernaryCube> cubes;
  };

  void refresh_sources(const TernaryCube& region);
  void reminimize_block(Port port);
  void revalidate_block(Port port, const TernaryCube& region, bool drop_all_intersecting, bool on_set_may_grow);
  void rebuild_rows();
  void segment_rows();

  int width_;
  StageConfig config_;
  bool strict_;
  RoutingTable shadow_;
  LpmTrie oracle_;
  std::map<Port, PortBlock> blocks_;

  std::vector<MinimizedRow> rows_;
  std::map<Port, RowRange> ranges_;
  // rows_.size() * stages segments, row-major.
  std::vector<TernaryCube> segments_;
  std::vector<int> specified_;
};

}  // namespace mstcam
