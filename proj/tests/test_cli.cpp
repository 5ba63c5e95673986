#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "mstcam/cli.hpp"
#include "mstcam/compaction.hpp"
#include "mstcam/routing_table.hpp"

namespace fs = std::filesystem;
using namespace mstcam;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("mstcam_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// A width-32 table and trace shared by several cases.
struct Fixture {
  TempDir dir;
  std::string table = dir / "t.txt", trace = dir / "tr.txt";
  Fixture() {
    REQUIRE(cli({"gen", "table", "--width", "32", "--entries", "1500", "--seed", "5", "--out", table}).code == 0);
    REQUIRE(cli({"gen", "trace", "--table", table, "--count", "800", "--seed", "6", "--out", trace}).code == 0);
  }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  const auto r = cli({"compact", "--tabel", "x"});
  CHECK(r.code == kExitUsage);
  CHECK_FALSE(r.err.empty());
  CHECK(r.out.empty());
}

TEST_CASE("gen") {
  TempDir dir;
  const auto a = dir / "a.txt", b = dir / "b.txt";
  REQUIRE(cli({"gen", "table", "--width", "16", "--entries", "300", "--seed", "3", "--out", a}).code == 0);
  REQUIRE(cli({"gen", "table", "--width", "16", "--entries", "300", "--seed", "3", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fs::exists(a + ".manifest.json"));
  const auto t = parse_routing_table(slurp(a), 16);
  CHECK(t.size() == 300);

  const auto to_stdout = cli({"gen", "table", "--width", "16", "--entries", "300", "--seed", "3"});
  CHECK(to_stdout.out == slurp(a));

  CHECK(cli({"gen", "table", "--width", "4", "--entries", "100"}).code == kExitUsage);
  CHECK(cli({"gen", "table", "--width", "40"}).code == kExitUsage);
  CHECK(cli({"gen", "trace"}).code == kExitUsage);
  CHECK(cli({"gen", "bogus"}).code == kExitUsage);

  const auto fam = cli({"gen", "table", "--width", "16", "--parents", "5", "--children", "40"});
  REQUIRE(fam.code == 0);
  CHECK(compact(parse_routing_table(fam.out, 16), false).rows.size() == 5);
}

TEST_CASE("compact") {
  Fixture f;
  const auto out = f.dir / "m.txt";
  const auto r = cli({"compact", "--table", f.table, "--out", out});
  REQUIRE(r.code == 0);
  CHECK(std::regex_match(r.out, std::regex(R"(rows 1500 -> \d+ \(pof -?\d+\.\d\d%\)\n)")));
  std::ifstream in(out);
  const auto m = parse_minimized_table(in);
  CHECK(m.width == 32);
  CHECK_FALSE(m.strict);

  const auto missing = cli({"compact", "--table", f.dir / "nope.txt", "--out", out});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("nope.txt") != std::string::npos);

  CHECK(cli({"compact", "--table", f.table, "--width", "24", "--out", out}).code == kExitUsage);
  CHECK(cli({"compact", "--table", f.table, "--width", "32", "--out", out}).code == 0);
}

TEST_CASE("run") {
  Fixture f;
  const auto ref = cli({"run", "--table", f.table, "--trace", f.trace, "--stages", "32"});
  REQUIRE(ref.code == 0);
  CHECK(ref.out.find("pof 0.000000\n") != std::string::npos);
  CHECK(ref.out.find("lookups/s") != std::string::npos);

  const auto two = cli({"run", "--table", f.table, "--trace", f.trace, "--stages", "16,16", "--report",
                        f.dir / "r.json", "--out", f.dir / "r.csv"});
  REQUIRE(two.code == 0);
  std::smatch m;
  REQUIRE(std::regex_search(two.out, m, std::regex(R"(pof (-?[0-9.]+))")));
  CHECK(std::stod(m[1]) >= 0.0);
  CHECK(lines(slurp(f.dir / "r.csv")).size() == 2);
  CHECK(slurp(f.dir / "r.json").find("\"minimization_pof\"") != std::string::npos);

  const auto bad = cli({"run", "--table", f.table, "--trace", f.trace, "--stages", "16,15"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("16+15") != std::string::npos);
  CHECK(bad.err.find("M=32") != std::string::npos);

  // Precomputed rows give the same numbers as compacting on the fly.
  REQUIRE(cli({"compact", "--table", f.table, "--out", f.dir / "m.txt"}).code == 0);
  const auto pre = cli({"run", "--table", f.table, "--trace", f.trace, "--stages", "16,16", "--minimized",
                        f.dir / "m.txt", "--out", f.dir / "r2.csv"});
  REQUIRE(pre.code == 0);
  CHECK(slurp(f.dir / "r2.csv") == slurp(f.dir / "r.csv"));
}

TEST_CASE("sweep") {
  Fixture f;
  const auto p2 = cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "powers-of-two"});
  REQUIRE(p2.code == 0);
  const auto rows = lines(p2.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "config,stages,rows,width,eps_max,meps,pof");
  double last = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double pof = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    CHECK(pof >= last);
    last = pof;
  }

  const auto two = cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "two-stage"});
  REQUIRE(two.code == 0);
  CHECK(lines(two.out).size() == 32);

  const auto csv = f.dir / "bad.csv";
  const auto bad = cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "list", "--stages", "16,16",
                        "--stages", "16,17", "--out", csv});
  CHECK(bad.code == kExitUsage);
  CHECK_FALSE(fs::exists(csv));
  CHECK(cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "sideways"}).code == kExitUsage);
  CHECK(cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "list"}).code == kExitUsage);

  const auto list = cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "list", "--stages", "8,24",
                         "--stages", "24,8"});
  REQUIRE(list.code == 0);
  CHECK(lines(list.out).size() == 3);
}

TEST_CASE("verify") {
  const auto ok = cli({"verify", "--width", "8", "--entries", "60", "--ops", "200"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("PASS update-rebuild-equivalence") != std::string::npos);

  const auto no_ops = cli({"verify", "--width", "8", "--entries", "60", "--ops", "0"});
  CHECK(no_ops.code == kExitOk);
  CHECK(no_ops.out.find("SKIP update-rebuild-equivalence") != std::string::npos);
  CHECK(no_ops.out.find("PASS oracle-equivalence") != std::string::npos);

  // Flip one row's port: the engine now disagrees with the reference.
  TempDir dir;
  const auto table = dir / "t.txt", rows = dir / "m.txt", bad = dir / "bad.txt";
  REQUIRE(cli({"gen", "table", "--width", "8", "--entries", "40", "--ports", "3", "--seed", "2", "--out", table})
              .code == 0);
  REQUIRE(cli({"compact", "--table", table, "--out", rows}).code == 0);
  CHECK(cli({"verify", "--table", table, "--minimized", rows, "--ops", "0"}).code == kExitOk);
  std::string text = slurp(rows);
  const auto last_row = text.rfind('\n', text.size() - 2);
  const auto space = text.rfind(' ');
  REQUIRE(space > last_row);
  const std::string port = text.substr(space + 1, text.size() - space - 2);
  text = text.substr(0, space + 1) + std::to_string(std::stoul(port) + 100) + "\n";
  // Keep the range headers consistent with the new port.
  text = std::regex_replace(text, std::regex("# range.*\n"), "");
  std::ofstream(bad) << text;
  const auto r = cli({"verify", "--table", table, "--minimized", bad, "--ops", "0"});
  CHECK(r.code == kExitVerifyFailed);
  CHECK(std::regex_search(r.out, std::regex("counterexample [01]{8}")));

  const auto sampled = cli({"verify", "--width", "32", "--entries", "300", "--samples", "3000", "--ops", "50",
                            "--check-every", "25"});
  CHECK(sampled.code == kExitOk);
  CHECK(sampled.out.find("FAIL") == std::string::npos);

  CHECK(cli({"verify", "--width", "8,x"}).code == kExitUsage);
  CHECK(cli({"verify", "--minimized", rows}).code == kExitUsage);
}

TEST_CASE("replaying a manifest reproduces the outputs byte for byte") {
  Fixture f;
  const auto csv = f.dir / "s.csv", report = f.dir / "s.json";
  REQUIRE(cli({"sweep", "--table", f.table, "--trace", f.trace, "--mode", "powers-of-two", "--out", csv,
               "--report", report, "--histogram"})
              .code == 0);
  const auto manifest = csv + ".manifest.json";
  REQUIRE(fs::exists(manifest));
  const auto first_csv = slurp(csv), first_report = slurp(report), first_manifest = slurp(manifest);
  fs::remove(csv);
  fs::remove(report);
  REQUIRE(cli({"replay", manifest}).code == 0);
  CHECK(slurp(csv) == first_csv);
  CHECK(slurp(report) == first_report);
  CHECK(slurp(manifest) == first_manifest);

  CHECK(cli({"replay", f.dir / "missing.json"}).code == kExitUsage);
  std::ofstream(f.dir / "junk.json") << "{not json";
  CHECK(cli({"replay", f.dir / "junk.json"}).code == kExitUsage);
}
