#include "mstcam/verify.hpp"

#include <algorithm>
#include <sstream>

#include "mstcam/metrics.hpp"
#include "mstcam/trie.hpp"
#include "rng.hpp"

namespace mstcam {

namespace {

struct Tracker {
  PropertyResult result;

  explicit Tracker(std::string name) { result.name = std::move(name); }

  bool failed() const { return result.status == PropertyStatus::kFail; }

  void fail(Word address, int width, const std::string& why) {
    if (failed()) return;
    result.status = PropertyStatus::kFail;
    result.counterexample = address;
    result.detail = "address " + format_address(address, width) + ": " + why;
  }
};

std::string port_str(const std::optional<Port>& p) { return p ? std::to_string(*p) : std::string("none"); }

bool ranges_consistent(const MstcamEngine& engine, std::string& why) {
  std::size_t expect = 0;
  for (const auto& [port, r] : engine.ranges()) {
    if (r.begin != expect) {
      why = "range of port " + std::to_string(port) + " does not start at row " + std::to_string(expect);
      return false;
    }
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (engine.rows()[i].port != port) {
        why = "row " + std::to_string(i) + " carries port " + std::to_string(engine.rows()[i].port) +
              " inside the range of port " + std::to_string(port);
        return false;
      }
    }
    expect = r.end;
  }
  if (expect != engine.row_count()) {
    why = "ranges cover " + std::to_string(expect) + " of " + std::to_string(engine.row_count()) + " rows";
    return false;
  }
  return true;
}

}  // namespace

std::string to_string(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::kPass: return "PASS";
    case PropertyStatus::kFail: return "FAIL";
    case PropertyStatus::kSkipped: return "SKIP";
  }
  return "?";
}

std::vector<StageConfig> verification_configs(int width) {
  std::vector<StageConfig> out;
  auto add = [&](StageConfig c) {
    if (c.valid_for(width) && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  add(StageConfig::single(width));
  for (auto& c : equal_split_configs(width)) add(c);
  add(StageConfig::equal_split(width, width));
  if (width >= 2) add(StageConfig({(width + 1) / 2, width / 2}));
  if (width >= 3) {
    std::vector<int> three(3, width / 3);
    for (int i = 0; i < width % 3; ++i) ++three[static_cast<std::size_t>(i)];
    add(StageConfig(three));
  }
  return out;
}


std::vector<Word> verification_addresses(const RoutingTable& table, std::size_t samples, std::uint64_t seed) {
  const int width = table.width();
  std::vector<Word> out;
  if (width <= kExhaustiveWidth) {
    out.reserve(std::size_t{1} << width);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << width); ++a) out.push_back(static_cast<Word>(a));
    return out;
  }
  detail::Rng rng(seed);
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    if (!table.empty() && (i % 2 == 0)) {
      const Prefix& p = table.entries()[rng.below(table.size())];
      out.push_back(p.bits | (rng.bits(width) & ~leading_mask(p.length, width)));
    } else {
      out.push_back(rng.bits(width));
    }
  }
  return out;
}

std::vector<PropertyResult> verify_engine(const MstcamEngine& engine, const std::vector<StageConfig>& configs,
                                          const std::vector<Word>& addresses) {
  const int width = engine.width();
  const auto rows_before = engine.rows();
  const auto ranges_before = engine.ranges();

  std::vector<MstcamEngine> variants;
  variants.reserve(configs.size());
  for (const auto& c : configs) variants.push_back(engine.reconfigured(c));

  std::vector<std::pair<std::size_t, std::size_t>> refinements;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::size_t j = 0; j < configs.size(); ++j) {
      if (i != j && configs[j].refines(configs[i])) refinements.emplace_back(i, j);
    }
  }

  Tracker equivalence("oracle-equivalence");
  Tracker completeness("strict-completeness");
  Tracker independence("config-independence");
  Tracker refinement("refinement-monotonicity");
  Tracker bounds("eps-bounds");
  Tracker disjoint("cross-port-disjointness");
  Tracker read_only("lookup-read-only");
  Tracker ranges("port-ranges");

  if (std::string why; !ranges_consistent(engine, why)) ranges.result = {"port-ranges", PropertyStatus::kFail, why, {}};

  const std::uint64_t rows = engine.row_count();
  std::vector<LookupResult> results(configs.size());
  for (Word a : addresses) {
    const auto expected = engine.oracle().lookup(a);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      results[i] = variants[i].lookup(a);
      const auto& r = results[i];
      const std::string where = " under stages " + configs[i].to_string();
      if (expected && r.port != expected) {
        equivalence.fail(a, width, "engine port " + port_str(r.port) + ", reference " + port_str(expected) + where);
      }
      if (engine.strict() && !expected && r.port) {
        completeness.fail(a, width, "unrouted address matched port " + port_str(r.port) + where);
      }
      if (r.port != results[0].port) {
        independence.fail(a, width, "port " + port_str(r.port) + where + " vs " + port_str(results[0].port) +
                                        " under stages " + configs[0].to_string());
      }
      const std::uint64_t lo = rows * static_cast<std::uint64_t>(configs[i].widths().front());
      const std::uint64_t hi = rows * static_cast<std::uint64_t>(width);
      if (r.eps < lo || r.eps > hi || (configs[i].stages() == 1 && r.eps != hi)) {
        bounds.fail(a, width, "eps " + std::to_string(r.eps) + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]" + where);
      }
    }
    for (auto [coarse, fine] : refinements) {
      if (results[fine].eps > results[coarse].eps) {
        refinement.fail(a, width, "eps " + std::to_string(results[fine].eps) + " under " + configs[fine].to_string() +
                                      " exceeds " + std::to_string(results[coarse].eps) + " under " +
                                      configs[coarse].to_string());
      }
    }
    if (expected || engine.strict()) {
      std::optional<Port> seen;
      for (const auto& row : engine.rows()) {
        if (!row.cube.matches(a)) continue;
        if (seen && *seen != row.port) {
          disjoint.fail(a, width, "rows of ports " + std::to_string(*seen) + " and " + std::to_string(row.port) +
                                      " both match");
          break;
        }
        seen = row.port;
      }
    }
  }
  if (engine.rows() != rows_before || engine.ranges() != ranges_before) {
    read_only.result.status = PropertyStatus::kFail;
    read_only.result.detail = "engine rows changed during lookups";
  }
  if (!engine.strict()) {
    completeness.result.status = PropertyStatus::kSkipped;
    completeness.result.detail = "engine is not strict";
  }
  if (refinements.empty()) {
    refinement.result.status = PropertyStatus::kSkipped;
    refinement.result.detail = "no refinement pairs among the configurations";
  }
  return {equivalence.result, completeness.result, independence.result, refinement.result,
          bounds.result,      disjoint.result,     read_only.result,    ranges.result};
}

PropertyResult verify_updates(const RoutingTable& table, bool strict, std::size_t ops, std::uint64_t seed,
                              std::size_t check_every, std::size_t samples) {
  Tracker t("update-rebuild-equivalence");
  if (ops == 0) {
    t.result.status = PropertyStatus::kSkipped;
    t.result.detail = "no update operations requested";
    return t.result;
  }
  const int width = table.width();
  const StageConfig config = width >= 2 ? StageConfig({(width + 1) / 2, width / 2}) : StageConfig::single(width);
  MstcamEngine engine = MstcamEngine::from_table(table, config, strict);
  detail::Rng rng(seed);

  Port port_pool = 1;
  for (Port p : table.ports()) port_pool = std::max(port_pool, p + 2);

  auto check = [&](std::size_t done) {
    if (std::string why; !ranges_consistent(engine, why)) {
      t.result.status = PropertyStatus::kFail;
      t.result.detail = "after " + std::to_string(done) + " operations: " + why;
      return;
    }
    const MstcamEngine rebuilt = MstcamEngine::from_table(engine.shadow(), config, strict);
    const LpmTrie reference = LpmTrie::build(engine.shadow());
    for (Word a : verification_addresses(engine.shadow(), samples, seed + done)) {
      const auto expected = reference.lookup(a);
      const auto got = engine.lookup(a).port;
      const auto fresh = rebuilt.lookup(a).port;
      const std::string when = " after " + std::to_string(done) + " operations";
      if (expected && (got != expected || fresh != expected)) {
        t.fail(a, width, "incremental port " + port_str(got) + ", rebuilt " + port_str(fresh) + ", reference " +
                             port_str(expected) + when);
        return;
      }
      if (strict && !expected && (got || fresh)) {
        t.fail(a, width, "unrouted address matched (incremental " + port_str(got) + ", rebuilt " +
                             port_str(fresh) + ")" + when);
        return;
      }
    }
  };

  for (std::size_t done = 0; done < ops && !t.failed();) {
    const auto& entries = engine.shadow().entries();
    if (!entries.empty() && rng.unit() < 0.45) {
      const Prefix victim = entries[rng.below(entries.size())];
      engine.withdraw(victim.bits, victim.length);
    } else {
      Prefix p;
      if (!entries.empty() && rng.unit() < 0.4) {
        // Extend an existing route, half the time keeping its port.
        const Prefix& base = entries[rng.below(entries.size())];
        if (base.length >= width) continue;
        const int len = rng.between(base.length + 1, width);
        const Port port = rng.unit() < 0.5 ? base.port : static_cast<Port>(rng.below(port_pool));
        p = Prefix::make(base.bits | (rng.bits(width) & ~leading_mask(base.length, width)), len, port, width);
      } else {
        p = Prefix::make(rng.bits(width), rng.between(0, width), static_cast<Port>(rng.below(port_pool)), width);
      }
      if (engine.shadow().find(p.bits, p.length)) continue;
      engine.insert(p);
    }
    ++done;
    if (done % check_every == 0 || done == ops) check(done);
  }
  if (!t.failed()) t.result.detail = std::to_string(ops) + " operations";
  return t.result;
}

}  // namespace mstcam
