#include <doctest.h>

#include <random>
#include <thread>

#include "mstcam/engine.hpp"
#include "mstcam/metrics.hpp"
#include "mstcam/workload.hpp"
#include "oracles/oracles.hpp"

using namespace mstcam;

namespace {

RoutingTable random_table(int width, std::size_t n, Port ports, std::uint64_t seed) {
  TableParams p = TableParams::defaults_for(width, n);
  p.ports = ports;
  return generate_table(width, p, seed);
}

MinimizedTable rows_of(int width, std::initializer_list<std::pair<const char*, Port>> rows) {
  MinimizedTable m;
  m.width = width;
  for (auto [pat, port] : rows) {
    auto it = m.ranges.find(port);
    if (it == m.ranges.end()) {
      m.ranges[port] = RowRange{m.rows.size(), m.rows.size() + 1};
    } else {
      it->second.end = m.rows.size() + 1;
    }
    m.rows.push_back({TernaryCube::parse(pat), port});
  }
  return m;
}

// Stage-by-stage enabling on the rendered row strings: every row pays for
// stage 1, and for stage i+1 only when stage i matched.
struct Simulated {
  std::uint64_t eps = 0;
  std::optional<Port> port;
};

Simulated simulate(const MstcamEngine& e, Word address) {
  const int width = e.width();
  const std::string addr = address_to_string(address, width);
  Simulated out;
  int best_bits = -1;
  for (std::size_t j = 0; j < e.row_count(); ++j) {
    const std::string row = e.rows()[j].cube.to_string();
    int offset = 0;
    bool all = true;
    for (int w : e.config().widths()) {
      out.eps += static_cast<std::uint64_t>(w);
      bool stage_match = true;
      for (int i = offset; i < offset + w; ++i) {
        const char c = row[static_cast<std::size_t>(i)];
        if (c != '-' && c != addr[static_cast<std::size_t>(i)]) stage_match = false;
      }
      offset += w;
      if (!stage_match) {
        all = false;
        break;
      }
    }
    if (all) {
      const int bits = static_cast<int>(std::count_if(row.begin(), row.end(), [](char c) { return c != '-'; }));
      if (bits > best_bits) {
        best_bits = bits;
        out.port = e.rows()[j].port;
      }
    }
  }
  return out;
}

std::vector<StageConfig> random_configs(std::mt19937& gen, int width, int count) {
  std::vector<StageConfig> out{StageConfig::single(width)};
  while (static_cast<int>(out.size()) < count) {
    std::vector<int> ws;
    int left = width;
    while (left > 0) {
      const int w = 1 + static_cast<int>(gen() % static_cast<unsigned>(left));
      ws.push_back(w);
      left -= w;
    }
    out.emplace_back(ws);
  }
  return out;
}

}  // namespace

TEST_CASE("stage configurations") {
  CHECK(StageConfig::parse("8,8,8,8").widths() == std::vector<int>{8, 8, 8, 8});
  CHECK(StageConfig::parse("32").stages() == 1);
  CHECK_THROWS_AS(StageConfig::parse("8,,8"), ConfigError);
  CHECK_THROWS_AS(StageConfig::parse("8,a"), ConfigError);
  CHECK_THROWS_AS(StageConfig::parse(""), ConfigError);

  CHECK(StageConfig({4, 4}).valid_for(8));
  CHECK_FALSE(StageConfig({5, 4}).valid_for(8));
  CHECK_FALSE(StageConfig({8, 0}).valid_for(8));
  CHECK_FALSE(StageConfig({9, -1}).valid_for(8));
  CHECK_FALSE(StageConfig().valid_for(8));
  try {
    StageConfig({16, 15}).validate(32);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("16+15") != std::string::npos);
    CHECK(msg.find("31") != std::string::npos);
    CHECK(msg.find("M=32") != std::string::npos);
  }

  CHECK(StageConfig::equal_split(32, 4) == StageConfig({8, 8, 8, 8}));
  CHECK_THROWS_AS(StageConfig::equal_split(32, 3), ConfigError);
  CHECK(StageConfig({4, 2, 2}).to_string() == "4+2+2");

  CHECK(StageConfig({4, 2, 2}).refines(StageConfig({4, 4})));
  CHECK(StageConfig({4, 4}).refines(StageConfig({8})));
  CHECK(StageConfig({4, 4}).refines(StageConfig({4, 4})));
  CHECK_FALSE(StageConfig({4, 4}).refines(StageConfig({4, 2, 2})));
  CHECK_FALSE(StageConfig({3, 5}).refines(StageConfig({4, 4})));
}

TEST_CASE("address splitting") {
  CHECK(split_address(0xDEADBEEF, StageConfig({16, 16}), 32) == std::vector<Word>{0xDEAD, 0xBEEF});
  CHECK(split_address(0xDEADBEEF, StageConfig({32}), 32) == std::vector<Word>{0xDEADBEEF});
  CHECK(split_address(0b0100'1101, StageConfig({4, 2, 2}), 8) == std::vector<Word>{0b0100, 0b11, 0b01});
  CHECK_THROWS_AS(split_address(0, StageConfig({4, 3}), 8), ConfigError);
  std::mt19937 gen(3);
  for (int i = 0; i < 200; ++i) {
    const auto cfg = random_configs(gen, 32, 2).back();
    const Word a = static_cast<Word>(gen());
    Word joined = 0;
    const auto parts = split_address(a, cfg, 32);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const int w = cfg.widths()[k];
      CHECK((parts[k] & ~low_mask(w)) == 0);
      joined = w >= 32 ? parts[k] : (joined << w) | parts[k];
    }
    CHECK(joined == a);
  }
}

TEST_CASE("row segments") {
  const auto m = rows_of(8, {{"010-----", 0}});
  const MstcamEngine e(m, StageConfig({4, 4}), parse_routing_table("010 0\n", 8), false);
  const auto segs = e.segments(0);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].to_string() == "010-");
  CHECK(segs[1].to_string() == "----");
  CHECK(e.reconfigured(StageConfig::single(8)).segments(0).size() == 1);
  CHECK_THROWS_AS(MstcamEngine(m, StageConfig({5, 4}), parse_routing_table("010 0\n", 8), false), ConfigError);

  // Concatenated segments reproduce each row.
  const auto t = random_table(12, 200, 4, 2);
  std::mt19937 gen(8);
  for (const auto& cfg : random_configs(gen, 12, 6)) {
    const auto eng = MstcamEngine::from_table(t, cfg, false);
    for (std::size_t r = 0; r < eng.row_count(); ++r) {
      std::string joined;
      for (const auto& s : eng.segments(r)) joined += s.to_string();
      CHECK(joined == eng.rows()[r].cube.to_string());
    }
  }
}

TEST_CASE("enabling charges stage widths row by row") {
  const auto m = rows_of(8, {{"0100----", 0}, {"1111----", 1}, {"1010----", 2}});
  const auto shadow = parse_routing_table("0100 0\n1111 1\n1010 2\n", 8);
  const MstcamEngine e(m, StageConfig({4, 4}), shadow, false);
  const auto hit = e.lookup(0b0100'1010);
  CHECK(hit.eps == 3 * 4 + 1 * 4);
  CHECK(hit.port == 0u);
  CHECK(hit.matched_row == 0u);

  const auto miss = e.lookup(0b0000'0000);
  CHECK(miss.eps == 3 * 4);
  CHECK_FALSE(miss.port);
  CHECK_FALSE(miss.matched_row);

  const auto ref = e.reconfigured(StageConfig::single(8));
  for (Word a = 0; a < 256; ++a) CHECK(ref.lookup(a).eps == e.eps_max());
  CHECK(e.eps_max() == 3 * 8);
}

TEST_CASE("LPM selector") {
  const auto m = rows_of(8, {{"0-------", 0}, {"01------", 0}, {"010-----", 0}, {"0-0-----", 0}});
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto pick = select_lpm(m.rows, all);
  REQUIRE(pick);
  CHECK(pick->row == 2);
  const std::vector<std::size_t> tie{1, 3};
  CHECK(select_lpm(m.rows, tie)->row == 1);
  const std::vector<std::size_t> one{3};
  CHECK(select_lpm(m.rows, one)->row == 3);
  CHECK_FALSE(select_lpm(m.rows, {}));
}

TEST_CASE("equal-specificity matches agree on the port") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = random_table(8, 40, 2, seed);
    const auto e = MstcamEngine::from_table(t, StageConfig::single(8), false);
    for (Word a = 0; a < 256; ++a) {
      std::vector<std::size_t> matched;
      for (std::size_t j = 0; j < e.row_count(); ++j) {
        if (e.rows()[j].cube.matches(a)) matched.push_back(j);
      }
      if (!t.empty() && !LpmTrie::build(t).lookup(a)) continue;
      for (std::size_t x : matched) {
        for (std::size_t y : matched) CHECK(e.rows()[x].port == e.rows()[y].port);
      }
    }
  }
}

TEST_CASE("lookup agrees with a stage-by-stage simulation") {
  std::mt19937 gen(31);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto t = random_table(10, 150, 5, seed);
    for (bool strict : {false, true}) {
      const auto base = MstcamEngine::from_table(t, StageConfig::single(10), strict);
      for (const auto& cfg : random_configs(gen, 10, 5)) {
        const auto e = base.reconfigured(cfg);
        for (Word a = 0; a < 1024; a += 3) {
          const auto got = e.lookup(a);
          const auto want = simulate(e, a);
          REQUIRE(got.eps == want.eps);
          REQUIRE(got.port == want.port);
        }
      }
    }
  }
}

TEST_CASE("engine ports equal the reference under every configuration") {
  std::mt19937 gen(41);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto t = random_table(10, 200, 6, seed);
    for (bool strict : {false, true}) {
      const auto base = MstcamEngine::from_table(t, StageConfig::single(10), strict);
      for (const auto& cfg : random_configs(gen, 10, 6)) {
        const auto e = base.reconfigured(cfg);
        for (Word a = 0; a < 1024; ++a) {
          const auto want = oracle::naive_lpm(t.entries(), a, 10);
          const auto got = e.lookup(a);
          if (want || strict) REQUIRE(got.port == want);
          CHECK(got.port == base.lookup(a).port);
          CHECK(got.eps >= e.row_count() * static_cast<std::uint64_t>(cfg.widths().front()));
          CHECK(got.eps <= e.eps_max());
        }
      }
    }
  }
}

TEST_CASE("refining a configuration never enables more cells") {
  const auto t = random_table(32, 3000, 8, 5);
  const auto base = MstcamEngine::from_table(t, StageConfig::single(32), false);
  const auto trace = generate_trace(t, 2000, 0.8, 6);
  const std::vector<StageConfig> chain{StageConfig({32}), StageConfig({16, 16}), StageConfig({16, 8, 8}),
                                       StageConfig({8, 8, 8, 8}), StageConfig({8, 8, 4, 4, 4, 4}),
                                       StageConfig::equal_split(32, 32)};
  std::vector<MstcamEngine> engines;
  for (const auto& c : chain) engines.push_back(base.reconfigured(c));
  for (Word a : trace) {
    for (std::size_t i = 1; i < engines.size(); ++i) {
      REQUIRE(chain[i].refines(chain[i - 1]));
      CHECK(engines[i].lookup(a).eps <= engines[i - 1].lookup(a).eps);
    }
  }
}

TEST_CASE("lookups leave the engine untouched and may run concurrently") {
  const auto t = random_table(16, 800, 5, 9);
  const auto e = MstcamEngine::from_table(t, StageConfig({6, 5, 5}), true);
  const auto rows = e.rows();
  const auto ranges = e.ranges();
  const auto trace = generate_trace(t, 4000, 0.7, 1);
  std::vector<LookupResult> serial;
  for (Word a : trace) serial.push_back(e.lookup(a));
  std::vector<std::vector<LookupResult>> par(4);
  std::vector<std::thread> pool;
  for (auto& out : par) {
    pool.emplace_back([&] {
      for (Word a : trace) out.push_back(e.lookup(a));
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& out : par) {
    REQUIRE(out.size() == serial.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].port == serial[i].port);
      CHECK(out[i].eps == serial[i].eps);
    }
  }
  CHECK(e.rows() == rows);
  CHECK(e.ranges() == ranges);
}

namespace {

void check_against_rebuild(const MstcamEngine& e) {
  const auto rebuilt = MstcamEngine::from_table(e.shadow(), e.config(), e.strict());
  const int width = e.width();
  for (Word a = 0; a < (Word{1} << width); ++a) {
    const auto want = oracle::naive_lpm(e.shadow().entries(), a, width);
    const auto got = e.lookup(a).port;
    if (want || e.strict()) {
      REQUIRE_MESSAGE(got == want, "address " << address_to_string(a, width));
      REQUIRE(rebuilt.lookup(a).port == want);
    }
  }
  std::size_t expect = 0;
  for (const auto& [port, r] : e.ranges()) {
    CHECK(r.begin == expect);
    for (std::size_t i = r.begin; i < r.end; ++i) CHECK(e.rows()[i].port == port);
    expect = r.end;
  }
  CHECK(expect == e.row_count());
}

}  // namespace

TEST_CASE("insert") {
  const StageConfig cfg({4, 4});
  SUBCASE("into an empty engine") {
    auto e = MstcamEngine::from_table(RoutingTable(8), cfg, false);
    CHECK(e.row_count() == 0);
    CHECK(e.insert(Prefix::make(0b0110'0000, 3, 2, 8)) == MstcamEngine::UpdateEffect::kRowsChanged);
    CHECK(e.row_count() == 1);
    CHECK(e.ranges().at(2) == RowRange{0, 1});
  }
  SUBCASE("below an identical parent only the shadow table changes") {
    auto e = MstcamEngine::from_table(parse_routing_table("010 0\n1 1\n", 8), cfg, true);
    const auto rows = e.rows();
    CHECK(e.insert(Prefix::make(0b0101'0000, 4, 0, 8)) == MstcamEngine::UpdateEffect::kShadowOnly);
    CHECK(e.rows() == rows);
    CHECK(e.shadow().size() == 3);
    check_against_rebuild(e);
  }
  SUBCASE("a different port below an existing route") {
    for (bool strict : {false, true}) {
      auto e = MstcamEngine::from_table(parse_routing_table("010 0\n", 8), cfg, strict);
      e.insert(Prefix::make(0b0101'0000, 4, 1, 8));
      check_against_rebuild(e);
      CHECK(e.lookup(0b0101'0011).port == 1u);
      CHECK(e.lookup(0b0100'0011).port == 0u);
    }
  }
  SUBCASE("duplicates") {
    auto e = MstcamEngine::from_table(parse_routing_table("010 0\n", 8), cfg, false);
    CHECK(e.insert(Prefix::make(0b0100'0000, 3, 0, 8)) == MstcamEngine::UpdateEffect::kNoChange);
    CHECK_THROWS_AS(e.insert(Prefix::make(0b0100'0000, 3, 1, 8)), Error);
  }
}

TEST_CASE("withdraw") {
  const StageConfig cfg({4, 4});
  SUBCASE("the only route of a port empties its range") {
    auto e = MstcamEngine::from_table(parse_routing_table("010 0\n1 1\n", 8), cfg, false);
    e.withdraw(0b0100'0000, 3);
    CHECK(e.ranges().count(0) == 0);
    CHECK(e.ranges().count(1) == 1);
    check_against_rebuild(e);
  }
  SUBCASE("an eliminated child reappears when its parent goes") {
    for (bool strict : {false, true}) {
      auto e = MstcamEngine::from_table(parse_routing_table("01 0\n0110 0\n0 1\n", 8), cfg, strict);
      e.withdraw(0b0100'0000, 2);
      CHECK(e.lookup(0b0110'1111).port == 0u);
      CHECK(e.lookup(0b0100'1111).port == 1u);
      check_against_rebuild(e);
    }
  }
  SUBCASE("cubes away from the withdrawn route survive") {
    auto e = MstcamEngine::from_table(parse_routing_table("11 0\n0000 0\n0001 0\n10 1\n", 8), cfg, true);
    const auto keep = TernaryCube::parse("11------");
    auto has = [&](const std::string& pat) {
      return std::any_of(e.rows().begin(), e.rows().end(),
                         [&](const MinimizedRow& r) { return r.cube.to_string() == pat; });
    };
    REQUIRE(has(keep.to_string()));
    REQUIRE(has("000-----"));
    e.withdraw(0b0001'0000, 4);
    CHECK(has(keep.to_string()));
    CHECK(has("0000----"));
    CHECK_FALSE(has("000-----"));
    check_against_rebuild(e);
  }
  SUBCASE("absent routes") {
    auto e = MstcamEngine::from_table(parse_routing_table("010 0\n", 8), cfg, false);
    CHECK_THROWS_AS(e.withdraw(0b0100'0000, 4), Error);
    CHECK_THROWS_AS(e.withdraw(0, 9), Error);
  }
}

TEST_CASE("random update sequences match a rebuild") {
  for (bool strict : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::mt19937 gen(static_cast<unsigned>(seed * 7 + strict));
      auto e = MstcamEngine::from_table(random_table(8, 30, 4, seed), StageConfig({3, 5}), strict);
      for (int op = 1; op <= 300; ++op) {
        const auto& entries = e.shadow().entries();
        if (!entries.empty() && gen() % 2 == 0) {
          const Prefix v = entries[gen() % entries.size()];
          e.withdraw(v.bits, v.length);
        } else {
          const Prefix p = Prefix::make(static_cast<Word>(gen()), static_cast<int>(gen() % 9),
                                        static_cast<Port>(gen() % 5), 8);
          if (e.shadow().find(p.bits, p.length)) continue;
          e.insert(p);
        }
        if (op % 25 == 0) check_against_rebuild(e);
      }
    }
  }
}
