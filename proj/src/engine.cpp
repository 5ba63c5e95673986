#include "mstcam/engine.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>
#include <set>

namespace mstcam {

// ---- StageConfig ----

StageConfig StageConfig::parse(std::string_view text) {
  std::vector<int> widths;
  while (true) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    int w = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), w);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ConfigError("malformed stage list '" + std::string(text) + "'");
    }
    widths.push_back(w);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return StageConfig(std::move(widths));
}

StageConfig StageConfig::equal_split(int width, int stages) {
  if (stages < 1 || width % stages != 0) {
    throw ConfigError(std::to_string(stages) + " equal stages do not divide width " + std::to_string(width));
  }
  return StageConfig(std::vector<int>(static_cast<std::size_t>(stages), width / stages));
}

int StageConfig::total() const { return std::accumulate(widths_.begin(), widths_.end(), 0); }

void StageConfig::validate(int width) const {
  if (widths_.empty()) throw ConfigError("stage configuration is empty");
  for (int w : widths_) {
    if (w < 1) throw ConfigError("stage widths " + to_string() + ": every stage needs at least one bit");
  }
  if (total() != width || stages() > width) {
    throw ConfigError("stage widths " + to_string() + " sum to " + std::to_string(total()) + ", expected M=" +
                      std::to_string(width));
  }
}

bool StageConfig::valid_for(int width) const {
  try {
    validate(width);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

bool StageConfig::refines(const StageConfig& coarser) const {
  if (total() != coarser.total()) return false;
  std::set<int> mine;
  int acc = 0;
  for (int w : widths_) mine.insert(acc += w);
  acc = 0;
  for (int w : coarser.widths_) {
    if (!mine.count(acc += w)) return false;
  }
  return true;
}

std::string StageConfig::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(widths_[i]);
  }
  return out;
}

std::vector<Word> split_address(Word address, const StageConfig& config, int width) {
  config.validate(width);
  std::vector<Word> parts;
  parts.reserve(static_cast<std::size_t>(config.stages()));
  int shift = width;
  for (int w : config.widths()) {
    shift -= w;
    parts.push_back((address >> shift) & low_mask(w));
  }
  return parts;
}

std::optional<LpmChoice> select_lpm(std::span<const MinimizedRow> rows, std::span<const std::size_t> matched) {
  std::optional<LpmChoice> best;
  int best_bits = -1;
  for (std::size_t j : matched) {
    const int bits = rows[j].cube.specified_bits();
    if (bits > best_bits || (bits == best_bits && j < best->row)) {
      best = LpmChoice{j, rows[j].port};
      best_bits = bits;
    }
  }
  return best;
}

// ---- MstcamEngine ----

MstcamEngine::MstcamEngine(const MinimizedTable& minimized, StageConfig config, const RoutingTable& shadow,
                           bool strict)
    : width_(shadow.width()),
      config_(std::move(config)),
      strict_(strict),
      shadow_(shadow),
      oracle_(LpmTrie::build(shadow)),
      rows_(minimized.rows),
      ranges_(minimized.ranges) {
  if (minimized.width != width_ && !minimized.rows.empty()) {
    throw Error("minimized table width " + std::to_string(minimized.width) + " does not match routing table width " +
                std::to_string(width_));
  }
  config_.validate(width_);
  for (const auto& prt : partition_prts(eliminate_overlaps(shadow_))) {
    blocks_[prt.port].sources = prt.source_prefixes;
  }
  for (const auto& row : rows_) blocks_[row.port].cubes.push_back(row.cube);
  segment_rows();
}

MstcamEngine MstcamEngine::from_table(const RoutingTable& table, StageConfig config, bool strict) {
  config.validate(table.width());
  return MstcamEngine(compact(table, strict), std::move(config), table, strict);
}

MstcamEngine MstcamEngine::reconfigured(StageConfig config) const {
  MstcamEngine copy = *this;
  config.validate(width_);
  copy.config_ = std::move(config);
  copy.segment_rows();
  return copy;
}

void MstcamEngine::segment_rows() {
  const std::size_t k = static_cast<std::size_t>(config_.stages());
  segments_.clear();
  segments_.reserve(rows_.size() * k);
  specified_.clear();
  specified_.reserve(rows_.size());
  for (const auto& row : rows_) {
    int shift = width_;
    for (int w : config_.widths()) {
      shift -= w;
      const Word m = low_mask(w);
      segments_.emplace_back((row.cube.value() >> shift) & m, (row.cube.care() >> shift) & m, w);
    }
    specified_.push_back(row.cube.specified_bits());
  }
}

std::vector<TernaryCube> MstcamEngine::segments(std::size_t row) const {
  const std::size_t k = static_cast<std::size_t>(config_.stages());
  return {segments_.begin() + static_cast<std::ptrdiff_t>(row * k),
          segments_.begin() + static_cast<std::ptrdiff_t>((row + 1) * k)};
}

MinimizedTable MstcamEngine::minimized() const {
  MinimizedTable t;
  t.width = width_;
  t.strict = strict_;
  t.rows = rows_;
  t.ranges = ranges_;
  return t;
}

std::uint64_t MstcamEngine::eps_max() const {
  return static_cast<std::uint64_t>(rows_.size()) * static_cast<std::uint64_t>(width_);
}

LookupResult MstcamEngine::lookup(Word address) const {
  const auto& widths = config_.widths();
  const std::size_t k = widths.size();
  std::array<Word, kMaxWidth> parts{};
  {
    int shift = width_;
    for (std::size_t i = 0; i < k; ++i) {
      shift -= widths[i];
      parts[i] = (address >> shift) & low_mask(widths[i]);
    }
  }

  LookupResult result;
  std::uint64_t eps = 0;
  std::size_t best = rows_.size();
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const TernaryCube* seg = &segments_[j * k];
    bool all = true;
    // Stage 1 is always enabled; stage i+1 only when stage i matched.
    for (std::size_t i = 0; i < k; ++i) {
      eps += static_cast<std::uint64_t>(widths[i]);
      if (!seg[i].matches(parts[i])) {
        all = false;
        break;
      }
    }
    if (all && (best == rows_.size() || specified_[j] > specified_[best])) best = j;
  }
  result.eps = eps;
  if (best != rows_.size()) {
    result.port = rows_[best].port;
    result.matched_row = best;
  }
  return result;
}

// ---- updates ----

void MstcamEngine::refresh_sources(const TernaryCube& region) {
  for (auto& [port, block] : blocks_) {
    std::erase_if(block.sources, [&](const Prefix& p) { return region.contains(p.cube(width_)); });
  }
  for (const auto& e : shadow_.entries()) {
    if (!region.contains(e.cube(width_))) continue;
    const auto parent = oracle_.parent_of(e.bits, e.length);
    if (parent && parent->port == e.port) continue;
    blocks_[e.port].sources.push_back(e);
  }
}

void MstcamEngine::reminimize_block(Port port) {
  auto& block = blocks_[port];
  PartialRoutingTable prt{port, block.sources, {}};
  block.cubes = minimize_cubes(prt_on_set(prt, oracle_), port_guard(oracle_, port, strict_));
}

void MstcamEngine::revalidate_block(Port port, const TernaryCube& region, bool drop_all_intersecting,
                                    bool on_set_may_grow) {
  auto& block = blocks_[port];
  const CubeGuard guard = port_guard(oracle_, port, strict_);

  std::vector<TernaryCube> kept;
  std::vector<TernaryCube> zones;
  for (const auto& c : block.cubes) {
    if (c.intersects(region) && (drop_all_intersecting || !guard(c))) {
      zones.push_back(c);
    } else {
      kept.push_back(c);
    }
  }
  if (on_set_may_grow) zones.push_back(region);
  if (zones.empty()) return;

  auto touches_zone = [&](const TernaryCube& c) {
    return std::any_of(zones.begin(), zones.end(), [&](const TernaryCube& z) { return z.intersects(c); });
  };

  // Prefixes whose routed addresses are no longer fully covered.
  std::vector<TernaryCube> seeds;
  for (const auto& src : block.sources) {
    const TernaryCube sc = src.cube(width_);
    if (!touches_zone(sc)) continue;
    const auto pieces = oracle_.on_set_pieces(sc, port);
    const bool affected = std::any_of(pieces.begin(), pieces.end(), [&](const TernaryCube& p) {
      return touches_zone(p) && !covered_by_union(p, kept);
    });
    if (affected) seeds.insert(seeds.end(), pieces.begin(), pieces.end());
  }

  for (const auto& fresh : minimize_cubes(std::move(seeds), guard)) {
    const bool redundant =
        std::any_of(kept.begin(), kept.end(), [&](const TernaryCube& c) { return c.contains(fresh); });
    if (!redundant) kept.push_back(fresh);
  }
  block.cubes = std::move(kept);
}

void MstcamEngine::rebuild_rows() {
  std::erase_if(blocks_, [](const auto& kv) { return kv.second.sources.empty() && kv.second.cubes.empty(); });
  rows_.clear();
  ranges_.clear();
  for (const auto& [port, block] : blocks_) {
    RowRange r{rows_.size(), rows_.size()};
    for (const auto& c : block.cubes) rows_.push_back({c, port});
    r.end = rows_.size();
    ranges_.emplace(port, r);
  }
  segment_rows();
}

MstcamEngine::UpdateEffect MstcamEngine::insert(const Prefix& prefix) {
  const Prefix p = Prefix::make(prefix.bits, prefix.length, prefix.port, width_);
  if (const auto existing = shadow_.find(p.bits, p.length)) {
    if (existing->port == p.port) return UpdateEffect::kNoChange;
    throw Error("insert: prefix " + prefix_bits_string(p, width_) + "/" + std::to_string(p.length) +
                " already routes to port " + std::to_string(existing->port));
  }
  shadow_.add(p);
  oracle_.insert(p);

  // With an identical parent the new route changes no lookup result.
  const auto parent = oracle_.parent_of(p.bits, p.length);
  if (parent && parent->port == p.port) return UpdateEffect::kShadowOnly;

  const TernaryCube region = p.cube(width_);
  refresh_sources(region);
  reminimize_block(p.port);
  for (auto& [port, block] : blocks_) {
    if (port != p.port) revalidate_block(port, region, false, false);
  }
  rebuild_rows();
  return UpdateEffect::kRowsChanged;
}

MstcamEngine::UpdateEffect MstcamEngine::withdraw(Word bits, int length) {
  if (length < 0 || length > width_) throw Error("withdraw: prefix length out of range");
  const auto existing = shadow_.find(bits, length);
  if (!existing) {
    throw Error("withdraw: prefix " + address_to_string(bits, width_).substr(0, static_cast<std::size_t>(length)) +
                "/" + std::to_string(length) + " not present");
  }
  const auto parent = oracle_.parent_of(existing->bits, existing->length);
  shadow_.remove(existing->bits, existing->length);
  oracle_.remove(existing->bits, existing->length);
  if (parent && parent->port == existing->port) return UpdateEffect::kShadowOnly;

  const TernaryCube region = existing->cube(width_);
  refresh_sources(region);
  revalidate_block(existing->port, region, true, true);
  for (auto& [port, block] : blocks_) {
    if (port != existing->port) revalidate_block(port, region, false, true);
  }
  rebuild_rows();
  return UpdateEffect::kRowsChanged;
}

}  // namespace mstcam
