#include "mstcam/compaction.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace mstcam {

RoutingTable eliminate_overlaps(const RoutingTable& table) {
  const LpmTrie trie = LpmTrie::build(table);
  RoutingTable out(table.width());
  for (const auto& e : table.entries()) {
    const auto parent = trie.parent_of(e.bits, e.length);
    if (parent && parent->port == e.port) continue;
    out.add(e);
  }
  return out;
}

std::vector<PartialRoutingTable> partition_prts(const RoutingTable& table) {
  std::map<Port, PartialRoutingTable> by_port;
  for (const auto& e : table.entries()) {
    auto& prt = by_port[e.port];
    prt.port = e.port;
    prt.source_prefixes.push_back(e);
    prt.cubes.push_back(e.cube(table.width()));
  }
  std::vector<PartialRoutingTable> out;
  out.reserve(by_port.size());
  for (auto& [port, prt] : by_port) out.push_back(std::move(prt));
  return out;
}

std::vector<TernaryCube> prt_on_set(const PartialRoutingTable& prt, const LpmTrie& oracle) {
  std::vector<TernaryCube> pieces;
  for (const auto& p : prt.source_prefixes) {
    auto part = oracle.on_set_pieces(p.cube(oracle.width()), prt.port);
    pieces.insert(pieces.end(), part.begin(), part.end());
  }
  return pieces;
}

PartialRoutingTable minimize_prt(const PartialRoutingTable& prt, const LpmTrie& oracle, bool strict) {
  PartialRoutingTable out;
  out.port = prt.port;
  out.source_prefixes = prt.source_prefixes;
  out.cubes = minimize_cubes(prt_on_set(prt, oracle), port_guard(oracle, prt.port, strict));
  return out;
}

MinimizedTable merge_prts(std::vector<PartialRoutingTable> prts, int width, bool strict) {
  std::sort(prts.begin(), prts.end(),
            [](const PartialRoutingTable& a, const PartialRoutingTable& b) { return a.port < b.port; });
  MinimizedTable out;
  out.width = width;
  out.strict = strict;
  for (const auto& prt : prts) {
    if (out.ranges.count(prt.port)) throw Error("merge_prts: duplicate port " + std::to_string(prt.port));
    RowRange range{out.rows.size(), out.rows.size()};
    for (const auto& c : prt.cubes) out.rows.push_back({c, prt.port});
    range.end = out.rows.size();
    out.ranges.emplace(prt.port, range);
  }
  return out;
}

MinimizedTable compact(const RoutingTable& table, bool strict, CompactOptions options) {
  const LpmTrie oracle = LpmTrie::build(table);
  std::vector<PartialRoutingTable> prts = partition_prts(eliminate_overlaps(table));

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(prts.size()));
  if (threads <= 1) {
    for (auto& prt : prts) prt = minimize_prt(prt, oracle, strict);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < prts.size(); i = next++) prts[i] = minimize_prt(prts[i], oracle, strict);
      });
    }
    for (auto& th : pool) th.join();
  }
  return merge_prts(std::move(prts), table.width(), strict);
}

double minimization_pof(std::size_t rows_before, std::size_t rows_after) {
  if (rows_before == 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(rows_after) / static_cast<double>(rows_before));
}

void write_minimized_table(std::ostream& out, const MinimizedTable& table) {
  out << "# mstcam minimized table\n";
  out << "# width " << table.width << "\n";
  out << "# strict " << (table.strict ? 1 : 0) << "\n";
  out << "# rows " << table.rows.size() << "\n";
  for (const auto& [port, r] : table.ranges) out << "# range " << port << ' ' << r.begin << ' ' << r.end << "\n";
  for (const auto& row : table.rows) out << row.cube.to_string() << ' ' << row.port << "\n";
}

MinimizedTable parse_minimized_table(std::istream& in) {
  MinimizedTable table;
  bool have_width = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "#") {
      std::string key;
      fields >> key;
      if (key == "width") {
        if (!(fields >> table.width)) throw ParseError(line_no, "bad width header");
        check_width(table.width);
        have_width = true;
      } else if (key == "strict") {
        int s = 0;
        if (!(fields >> s)) throw ParseError(line_no, "bad strict header");
        table.strict = s != 0;
      } else if (key == "range") {
        Port port = 0;
        RowRange r;
        if (!(fields >> port >> r.begin >> r.end) || r.begin > r.end) throw ParseError(line_no, "bad range header");
        table.ranges[port] = r;
      }
      continue;
    }
    if (first[0] == '#') continue;
    Port port = 0;
    std::string extra;
    if (!(fields >> port) || (fields >> extra)) throw ParseError(line_no, "expected `<ternary> <port>`");
    TernaryCube cube;
    try {
      cube = TernaryCube::parse(first);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    if (have_width && cube.width() != table.width) {
      throw ParseError(line_no, "row width " + std::to_string(cube.width()) + " does not match header width " +
                                    std::to_string(table.width));
    }
    table.width = cube.width();
    have_width = true;
    table.rows.push_back({cube, port});
  }

  if (table.ranges.empty()) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const Port p = table.rows[i].port;
      auto it = table.ranges.find(p);
      if (it == table.ranges.end()) {
        table.ranges.emplace(p, RowRange{i, i + 1});
      } else if (it->second.end == i) {
        it->second.end = i + 1;
      } else {
        throw ParseError(0, "rows of port " + std::to_string(p) + " are not contiguous");
      }
    }
  }
  std::size_t expect = 0;
  std::vector<std::pair<RowRange, Port>> ordered;
  for (const auto& [port, r] : table.ranges) ordered.push_back({r, port});
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.first.begin != b.first.begin ? a.first.begin < b.first.begin : a.first.end < b.first.end;
  });
  for (const auto& [r, port] : ordered) {
    if (r.begin != expect) throw ParseError(0, "port ranges do not partition the rows");
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (i >= table.rows.size() || table.rows[i].port != port) {
        throw ParseError(0, "row " + std::to_string(i) + " lies outside the range of its port");
      }
    }
    expect = r.end;
  }
  if (expect != table.rows.size()) throw ParseError(0, "port ranges do not partition the rows");
  return table;
}

}  // namespace mstcam
