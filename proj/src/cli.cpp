#include "mstcam/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "mstcam/compaction.hpp"
#include "mstcam/engine.hpp"
#include "mstcam/metrics.hpp"
#include "mstcam/routing_table.hpp"
#include "mstcam/verify.hpp"
#include "mstcam/workload.hpp"

namespace mstcam {

namespace {

using Json = nlohmann::ordered_json;

// Bad flags, unreadable files, inconsistent inputs: exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out.flush()) throw UsageError("cannot write " + path);
}

template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct LoadedTable {
  RoutingTable table;
  // Comment lines other than the width header, e.g. generator parameters.
  std::vector<std::string> notes;
};

// The width comes from the flag, else the file header, else 32. A flag that
// disagrees with the header is an error.
int resolve_width(std::optional<int> flag, std::optional<int> header, const std::string& path) {
  if (flag && header && *flag != *header) {
    throw UsageError(path + ": --width " + std::to_string(*flag) + " disagrees with header width " +
                     std::to_string(*header));
  }
  const int width = flag ? *flag : header.value_or(kDefaultWidth);
  if (width < 1 || width > kMaxWidth) throw UsageError("width " + std::to_string(width) + " out of range 1..32");
  return width;
}

LoadedTable load_table(const std::string& path, std::optional<int> width_flag) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  const int width = resolve_width(width_flag, peek_width_header(in), path);
  LoadedTable out{with_path(path, [&] { return parse_routing_table(in, width); }), {}};
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("# ", 0) == 0 && line.rfind("# width", 0) != 0) out.notes.push_back(line.substr(2));
  }
  return out;
}

std::vector<Word> load_trace(const std::string& path, int width) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  auto trace = with_path(path, [&] { return parse_trace(in, width); });
  if (trace.empty()) throw UsageError(path + ": trace is empty");
  return trace;
}

MinimizedTable load_minimized(const std::string& path, int width) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  auto m = with_path(path, [&] { return parse_minimized_table(in); });
  if (m.width != width) {
    throw UsageError(path + ": minimized table width " + std::to_string(m.width) + " does not match table width " +
                     std::to_string(width));
  }
  return m;
}

StageConfig parse_stages(const std::string& text, int width) {
  StageConfig config;
  try {
    config = StageConfig::parse(text);
    config.validate(width);
  } catch (const Error& e) {
    throw UsageError("--stages " + text + ": " + e.what());
  }
  return config;
}

std::vector<int> parse_width_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const int w = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      check_width(w);
      out.push_back(w);
    } catch (const std::exception&) {
      throw UsageError("--width " + text + ": '" + item + "' is not a width in 1..32");
    }
  }
  if (out.empty()) throw UsageError("--width list is empty");
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Records how a run was invoked so `replay` can repeat it.
struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  Json inputs = Json::object();
  Json outputs = Json::object();
  Json widths = Json::array();
  Json stages = Json::array();
  Json seeds = Json::array();
  bool strict = false;

  void write(const std::string& path) const {
    Json j;
    j["tool"] = "mstcam";
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["inputs"] = inputs;
    j["widths"] = widths;
    j["stages"] = stages;
    j["seeds"] = seeds;
    j["strict"] = strict;
    j["outputs"] = outputs;
    write_file(path, j.dump(2) + "\n");
  }
};

// The manifest goes to --manifest, else next to the first output file.
void emit_manifest(const Manifest& m, const std::string& manifest_flag) {
  std::string path = manifest_flag;
  if (path.empty()) {
    for (const auto& [key, value] : m.outputs.items()) {
      if (value.is_string()) {
        path = value.get<std::string>() + ".manifest.json";
        break;
      }
    }
  }
  if (!path.empty()) m.write(path);
}

Json stages_json(const StageConfig& c) { return Json(c.widths()); }

Json report_entry(const PowerReport& r, double minimization) {
  Json j;
  j["config"] = r.config.to_string();
  j["stages"] = stages_json(r.config);
  j["k"] = r.config.stages();
  j["rows"] = r.rows;
  j["width"] = r.width;
  j["trace_length"] = r.trace_length;
  j["eps_sum"] = r.eps_sum;
  j["eps_max"] = r.eps_max;
  j["meps"] = r.meps;
  j["pof"] = r.pof;
  j["total_pof"] = total_pof(minimization, r.pof);
  if (r.eps_samples) {
    std::map<std::uint64_t, std::uint64_t> hist;
    for (auto e : *r.eps_samples) ++hist[e];
    Json h = Json::array();
    for (auto [eps, count] : hist) h.push_back({eps, count});
    j["eps_histogram"] = h;
  }
  return j;
}

struct PowerContext {
  std::string table_path;
  const LoadedTable* table;
  std::string trace_path;
  std::size_t trace_length;
  bool strict;
  std::size_t rows_after_elimination;
  std::size_t rows;
};

Json power_report(const std::string& subcommand, const PowerContext& ctx, const std::vector<PowerReport>& reports) {
  const double minimization = minimization_pof(ctx.table->table.size(), ctx.rows);
  Json j;
  j["tool"] = "mstcam";
  j["subcommand"] = subcommand;
  j["table"] = {{"path", ctx.table_path},
                {"entries", ctx.table->table.size()},
                {"width", ctx.table->table.width()},
                {"notes", ctx.table->notes}};
  j["trace"] = {{"path", ctx.trace_path}, {"length", ctx.trace_length}};
  j["strict"] = ctx.strict;
  j["rows_before"] = ctx.table->table.size();
  j["rows_after_elimination"] = ctx.rows_after_elimination;
  j["rows"] = ctx.rows;
  j["minimization_pof"] = minimization;
  j["cell_watts"] = kCellWatts;
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(report_entry(r, minimization));
  j["configs"] = list;
  return j;
}

std::string csv_text(const std::vector<PowerReport>& reports) {
  std::ostringstream s;
  write_csv_header(s);
  for (const auto& r : reports) write_csv_row(s, r);
  return s.str();
}

// Builds the engine from --minimized rows when given, else by compacting.
MstcamEngine build_engine(const LoadedTable& t, const std::string& minimized_path, const StageConfig& config,
                          bool& strict) {
  if (minimized_path.empty()) return MstcamEngine::from_table(t.table, config, strict);
  const MinimizedTable m = load_minimized(minimized_path, t.table.width());
  if (strict && !m.strict) throw UsageError(minimized_path + ": --strict given but rows were compacted non-strict");
  strict = m.strict;
  return MstcamEngine(m, config, t.table, strict);
}

// ---- subcommands --------------------------------------------------------

struct CompactArgs {
  std::string table, out, manifest;
  std::optional<int> width;
  bool strict = false;
};

int cmd_compact(const CompactArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const LoadedTable t = load_table(a.table, a.width);
  const MinimizedTable m = compact(t.table, a.strict);
  std::ostringstream text;
  write_minimized_table(text, m);
  write_file(a.out, text.str());

  Manifest man{"compact", argv};
  man.inputs["table"] = a.table;
  man.outputs["minimized"] = a.out;
  man.widths.push_back(t.table.width());
  man.strict = a.strict;
  emit_manifest(man, a.manifest);

  out << "rows " << t.table.size() << " -> " << m.rows.size() << " (pof "
      << percent(minimization_pof(t.table.size(), m.rows.size())) << "%)\n";
  return kExitOk;
}

struct RunArgs {
  std::string table, trace, minimized, stages, report, out, manifest;
  std::optional<int> width;
  bool strict = false;
  bool histogram = false;
};

int cmd_run(RunArgs a, const std::vector<std::string>& argv, std::ostream& out) {
  const LoadedTable t = load_table(a.table, a.width);
  const int width = t.table.width();
  const StageConfig config = a.stages.empty() ? StageConfig::single(width) : parse_stages(a.stages, width);
  const auto trace = load_trace(a.trace, width);

  const MstcamEngine engine = build_engine(t, a.minimized, config, a.strict);
  const auto start = std::chrono::steady_clock::now();
  const PowerReport r = measure(engine, trace, a.histogram);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const PowerContext ctx{a.table, &t, a.trace, trace.size(), a.strict, eliminate_overlaps(t.table).size(),
                         engine.row_count()};
  Manifest man{"run", argv};
  man.inputs["table"] = a.table;
  man.inputs["trace"] = a.trace;
  if (!a.minimized.empty()) man.inputs["minimized"] = a.minimized;
  man.widths.push_back(width);
  man.stages.push_back(stages_json(config));
  man.strict = a.strict;
  if (!a.report.empty()) {
    write_file(a.report, power_report("run", ctx, {r}).dump(2) + "\n");
    man.outputs["report"] = a.report;
  }
  if (!a.out.empty()) {
    write_file(a.out, csv_text({r}));
    man.outputs["csv"] = a.out;
  }
  emit_manifest(man, a.manifest);

  out << "stages " << config.to_string() << "\n";
  out << "rows " << engine.row_count() << "\n";
  out << "meps " << format_real(r.meps) << "\n";
  out << "pof " << format_real(r.pof) << "\n";
  out << "throughput " << static_cast<std::uint64_t>(secs > 0 ? static_cast<double>(trace.size()) / secs : 0)
      << " lookups/s\n";
  return kExitOk;
}

struct SweepArgs {
  std::string table, trace, minimized, mode = "powers-of-two", report, out, manifest;
  std::vector<std::string> stages;
  std::optional<int> width;
  bool strict = false;
  bool histogram = false;
  unsigned threads = 0;
};

std::vector<StageConfig> sweep_configs(const SweepArgs& a, int width) {
  if (a.mode != "list" && !a.stages.empty()) throw UsageError("--stages is only valid with --mode list");
  if (a.mode == "two-stage") return two_stage_configs(width);
  if (a.mode == "three-stage") return stage_compositions(width, 3, default_stride(width));
  if (a.mode == "four-stage") return stage_compositions(width, 4, default_stride(width));
  if (a.mode == "powers-of-two") return equal_split_configs(width);
  if (a.mode == "list") {
    if (a.stages.empty()) throw UsageError("--mode list needs at least one --stages");
    std::vector<StageConfig> out;
    for (const auto& s : a.stages) out.push_back(parse_stages(s, width));
    return out;
  }
  throw UsageError("unknown --mode " + a.mode);
}

int cmd_sweep(SweepArgs a, const std::vector<std::string>& argv, std::ostream& out) {
  const LoadedTable t = load_table(a.table, a.width);
  const int width = t.table.width();
  const auto configs = sweep_configs(a, width);
  if (configs.empty()) throw UsageError("--mode " + a.mode + " yields no configurations at width " +
                                        std::to_string(width));
  const auto trace = load_trace(a.trace, width);

  const MstcamEngine engine = build_engine(t, a.minimized, StageConfig::single(width), a.strict);
  const auto reports = sweep_stage_configs(engine, configs, trace, a.histogram, a.threads);

  const PowerContext ctx{a.table, &t, a.trace, trace.size(), a.strict, eliminate_overlaps(t.table).size(),
                         engine.row_count()};
  Manifest man{"sweep", argv};
  man.inputs["table"] = a.table;
  man.inputs["trace"] = a.trace;
  if (!a.minimized.empty()) man.inputs["minimized"] = a.minimized;
  man.widths.push_back(width);
  for (const auto& c : configs) man.stages.push_back(stages_json(c));
  man.strict = a.strict;

  const std::string csv = csv_text(reports);
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
    man.outputs["csv"] = a.out;
  }
  if (!a.report.empty()) {
    write_file(a.report, power_report("sweep", ctx, reports).dump(2) + "\n");
    man.outputs["report"] = a.report;
  }
  emit_manifest(man, a.manifest);
  if (!a.out.empty()) {
    for (const auto& r : reports) out << r.config.to_string() << " pof " << format_real(r.pof) << "\n";
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string table, minimized, width = "10", report, manifest;
  std::size_t entries = 200;
  Port ports = 6;
  std::uint64_t seed = 1;
  std::size_t tables = 1;
  std::size_t samples = 100000;
  std::size_t ops = 1000;
  std::size_t check_every = 100;
  bool strict = false;
  bool width_given = false;
};

int cmd_verify(const VerifyArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  if (!a.minimized.empty() && a.table.empty()) throw UsageError("--minimized needs --table");
  if (a.check_every == 0) throw UsageError("--check-every must be positive");

  struct Case {
    std::string label;
    RoutingTable table;
    std::uint64_t seed;
  };
  std::vector<Case> cases;
  Manifest man{"verify", argv};
  if (!a.table.empty()) {
    std::optional<int> flag;
    if (a.width_given) {
      const auto ws = parse_width_list(a.width);
      if (ws.size() != 1) throw UsageError("--table takes a single --width");
      flag = ws.front();
    }
    LoadedTable t = load_table(a.table, flag);
    man.inputs["table"] = a.table;
    if (!a.minimized.empty()) man.inputs["minimized"] = a.minimized;
    man.widths.push_back(t.table.width());
    cases.push_back({a.table, std::move(t.table), a.seed});
  } else {
    const auto widths = parse_width_list(a.width);
    for (int w : widths) {
      man.widths.push_back(w);
      for (std::size_t i = 0; i < a.tables; ++i) {
        const std::uint64_t seed = a.seed + i;
        TableParams params = TableParams::defaults_for(w, a.entries);
        params.ports = a.ports;
        try {
          cases.push_back({"generated width " + std::to_string(w) + " seed " + std::to_string(seed),
                           generate_table(w, params, seed), seed});
        } catch (const Error& e) {
          throw UsageError(std::string("cannot generate table: ") + e.what());
        }
      }
    }
  }
  man.seeds.push_back(a.seed);
  man.strict = a.strict;

  std::vector<bool> modes;
  if (!a.minimized.empty()) {
    modes.push_back(load_minimized(a.minimized, cases.front().table.width()).strict);
  } else if (a.strict) {
    modes.push_back(true);
  } else {
    modes = {false, true};
  }

  bool failed = false;
  Json results = Json::array();
  for (const auto& c : cases) {
    const int width = c.table.width();
    const auto addresses = verification_addresses(c.table, a.samples, c.seed);
    for (bool strict : modes) {
      const std::string mode = strict ? "strict" : "default";
      std::vector<PropertyResult> props;
      {
        const StageConfig config = StageConfig::single(width);
        bool s = strict;
        const MstcamEngine engine = build_engine({c.table, {}}, a.minimized, config, s);
        props = verify_engine(engine, verification_configs(width), addresses);
      }
      props.push_back(verify_updates(c.table, strict, a.ops, c.seed, a.check_every,
                                     std::min<std::size_t>(a.samples, 20000)));
      for (const auto& p : props) {
        out << to_string(p.status) << " " << p.name << " [" << c.label << ", " << mode << "]";
        if (!p.detail.empty()) out << ": " << p.detail;
        out << "\n";
        if (p.counterexample) out << "  counterexample " << format_address(*p.counterexample, width) << "\n";
        failed = failed || p.status == PropertyStatus::kFail;
        Json j;
        j["case"] = c.label;
        j["mode"] = mode;
        j["property"] = p.name;
        j["status"] = to_string(p.status);
        j["detail"] = p.detail;
        if (p.counterexample) j["counterexample"] = format_address(*p.counterexample, width);
        results.push_back(j);
      }
    }
  }
  if (!a.report.empty()) {
    Json j;
    j["tool"] = "mstcam";
    j["subcommand"] = "verify";
    j["ok"] = !failed;
    j["results"] = results;
    write_file(a.report, j.dump(2) + "\n");
    man.outputs["report"] = a.report;
  }
  emit_manifest(man, a.manifest);
  out << (failed ? "verification FAILED" : "all properties hold") << "\n";
  return failed ? kExitVerifyFailed : kExitOk;
}

struct GenArgs {
  std::string kind, out, table, manifest;
  int width = kDefaultWidth;
  std::uint64_t seed = 1;
  std::size_t entries = 1000;
  Port ports = 8;
  std::optional<int> min_length, max_length, max_extension;
  std::optional<double> child_fraction, duplicate_ratio, sibling_ratio;
  std::optional<std::size_t> parents, children;
  std::size_t count = 10000;
  double hit_ratio = 0.9;
};

int cmd_gen(const GenArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  std::ostringstream text;
  Manifest man{"gen", argv};
  man.seeds.push_back(a.seed);
  if (a.kind == "table") {
    if (a.width < 1 || a.width > kMaxWidth) throw UsageError("--width must lie in 1..32");
    RoutingTable table(a.width);
    std::ostringstream note;
    try {
      if (a.parents || a.children) {
        const std::size_t p = a.parents.value_or(1), c = a.children.value_or(0);
        table = generate_parent_child_table(a.width, p, c, a.seed);
        note << "gen family parents=" << p << " children=" << c << " seed=" << a.seed;
      } else {
        TableParams params = TableParams::defaults_for(a.width, a.entries);
        params.ports = a.ports;
        if (a.min_length) params.min_length = *a.min_length;
        if (a.max_length) params.max_length = *a.max_length;
        if (a.max_extension) params.max_extension = *a.max_extension;
        if (a.child_fraction) params.child_fraction = *a.child_fraction;
        if (a.duplicate_ratio) params.duplicate_ratio = *a.duplicate_ratio;
        if (a.sibling_ratio) params.sibling_ratio = *a.sibling_ratio;
        table = generate_table(a.width, params, a.seed);
        note << "gen table entries=" << params.entries << " ports=" << params.ports
             << " lengths=" << params.min_length << ".." << params.max_length
             << " child_fraction=" << params.child_fraction << " duplicate_ratio=" << params.duplicate_ratio
             << " max_extension=" << params.max_extension << " sibling_ratio=" << params.sibling_ratio
             << " seed=" << a.seed;
      }
    } catch (const Error& e) {
      throw UsageError(std::string("infeasible parameters: ") + e.what());
    }
    text << "# " << note.str() << "\n";
    write_routing_table(text, table);
    man.widths.push_back(a.width);
  } else if (a.kind == "trace") {
    if (a.table.empty()) throw UsageError("gen trace needs --table");
    const LoadedTable t = load_table(a.table, std::nullopt);
    std::vector<Word> trace;
    try {
      trace = generate_trace(t.table, a.count, a.hit_ratio, a.seed);
    } catch (const Error& e) {
      throw UsageError(std::string("infeasible parameters: ") + e.what());
    }
    text << "# gen trace count=" << a.count << " hit_ratio=" << a.hit_ratio << " seed=" << a.seed << "\n";
    write_trace(text, trace, t.table.width());
    man.inputs["table"] = a.table;
    man.widths.push_back(t.table.width());
  } else {
    throw UsageError("gen kind must be 'table' or 'trace'");
  }
  if (a.out.empty()) {
    out << text.str();
  } else {
    write_file(a.out, text.str());
    man.outputs[a.kind] = a.out;
  }
  emit_manifest(man, a.manifest);
  return kExitOk;
}

int replay(const std::string& path, std::ostream& out, std::ostream& err) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array()) throw UsageError(path + ": manifest has no argv");
  std::vector<std::string> argv;
  for (const auto& v : j["argv"]) {
    if (!v.is_string()) throw UsageError(path + ": argv entries must be strings");
    argv.push_back(v.get<std::string>());
  }
  if (argv.empty() || argv.front() == "replay") throw UsageError(path + ": manifest does not name a subcommand");
  return run_cli(argv, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-stage TCAM routing table compaction and power model", "mstcam"};
  app.require_subcommand(1);

  CompactArgs ca;
  auto* compact_cmd = app.add_subcommand("compact", "Minimize a routing table into TCAM rows");
  compact_cmd->add_option("--table", ca.table, "Routing table file")->required();
  compact_cmd->add_option("--width", ca.width, "Word width (default: file header, else 32)");
  compact_cmd->add_flag("--strict", ca.strict, "Rows never match unrouted addresses");
  compact_cmd->add_option("--out", ca.out, "Minimized table output")->required();
  compact_cmd->add_option("--manifest", ca.manifest, "Manifest path (default: <out>.manifest.json)");

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Look up a trace under one stage configuration");
  run_cmd->add_option("--table", ra.table, "Routing table file")->required();
  run_cmd->add_option("--trace", ra.trace, "Address trace file")->required();
  run_cmd->add_option("--minimized", ra.minimized, "Precomputed rows from `compact`");
  run_cmd->add_option("--stages", ra.stages, "Stage widths w1,w2,... (default: one stage)");
  run_cmd->add_option("--width", ra.width, "Word width (default: file header, else 32)");
  run_cmd->add_flag("--strict", ra.strict, "Rows never match unrouted addresses");
  run_cmd->add_option("--report", ra.report, "JSON report output");
  run_cmd->add_option("--out", ra.out, "CSV output");
  run_cmd->add_flag("--histogram", ra.histogram, "Include the per-search eps histogram in the report");
  run_cmd->add_option("--manifest", ra.manifest, "Manifest path");

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Measure power over a family of stage configurations");
  sweep_cmd->add_option("--table", sa.table, "Routing table file")->required();
  sweep_cmd->add_option("--trace", sa.trace, "Address trace file")->required();
  sweep_cmd->add_option("--minimized", sa.minimized, "Precomputed rows from `compact`");
  sweep_cmd->add_option("--mode", sa.mode, "two-stage | three-stage | four-stage | powers-of-two | list")
      ->capture_default_str();
  sweep_cmd->add_option("--stages", sa.stages, "Stage widths for --mode list (repeatable)");
  sweep_cmd->add_option("--width", sa.width, "Word width (default: file header, else 32)");
  sweep_cmd->add_flag("--strict", sa.strict, "Rows never match unrouted addresses");
  sweep_cmd->add_option("--report", sa.report, "JSON report output");
  sweep_cmd->add_option("--out", sa.out, "CSV output (default: standard output)");
  sweep_cmd->add_flag("--histogram", sa.histogram, "Include per-search eps histograms in the report");
  sweep_cmd->add_option("--threads", sa.threads, "Worker threads (0: hardware concurrency)");
  sweep_cmd->add_option("--manifest", sa.manifest, "Manifest path");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Check the engine against a reference trie");
  verify_cmd->add_option("--table", va.table, "Routing table file (default: generate tables)");
  verify_cmd->add_option("--minimized", va.minimized, "Check these rows instead of compacting --table");
  verify_cmd->add_option("--width", va.width, "Comma-separated widths of generated tables")->capture_default_str();
  verify_cmd->add_option("--entries", va.entries, "Prefixes per generated table")->capture_default_str();
  verify_cmd->add_option("--ports", va.ports, "Ports per generated table")->capture_default_str();
  verify_cmd->add_option("--tables", va.tables, "Generated tables per width")->capture_default_str();
  verify_cmd->add_option("--seed", va.seed, "Seed")->capture_default_str();
  verify_cmd->add_option("--samples", va.samples, "Sampled addresses above width 12")->capture_default_str();
  verify_cmd->add_option("--ops", va.ops, "Random update operations (0 skips the update suite)")
      ->capture_default_str();
  verify_cmd->add_option("--check-every", va.check_every, "Operations between rebuild comparisons")
      ->capture_default_str();
  verify_cmd->add_flag("--strict", va.strict, "Only check strict mode (default: both modes)");
  verify_cmd->add_option("--report", va.report, "JSON report output");
  verify_cmd->add_option("--manifest", va.manifest, "Manifest path");

  GenArgs ga;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic routing table or trace");
  gen_cmd->add_option("kind", ga.kind, "table | trace")->required();
  gen_cmd->add_option("--width", ga.width, "Word width")->capture_default_str();
  gen_cmd->add_option("--seed", ga.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", ga.out, "Output file (default: standard output)");
  gen_cmd->add_option("--entries", ga.entries, "Table size")->capture_default_str();
  gen_cmd->add_option("--ports", ga.ports, "Distinct ports")->capture_default_str();
  gen_cmd->add_option("--min-length", ga.min_length, "Shortest root prefix");
  gen_cmd->add_option("--max-length", ga.max_length, "Longest root prefix");
  gen_cmd->add_option("--max-extension", ga.max_extension, "Most bits a child adds to its parent");
  gen_cmd->add_option("--child-fraction", ga.child_fraction, "Share of entries nested under another");
  gen_cmd->add_option("--duplicate-ratio", ga.duplicate_ratio, "Chance a child repeats its parent's port");
  gen_cmd->add_option("--sibling-ratio", ga.sibling_ratio, "Chance a root neighbours the previous root");
  gen_cmd->add_option("--parents", ga.parents, "Parent/child family: number of parents");
  gen_cmd->add_option("--children", ga.children, "Parent/child family: number of children");
  gen_cmd->add_option("--table", ga.table, "Table to draw trace hits from");
  gen_cmd->add_option("--count", ga.count, "Trace length")->capture_default_str();
  gen_cmd->add_option("--hit-ratio", ga.hit_ratio, "Share of trace addresses under a table prefix")
      ->capture_default_str();
  gen_cmd->add_option("--manifest", ga.manifest, "Manifest path (default: <out>.manifest.json)");

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "Manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mstcam: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (compact_cmd->parsed()) return cmd_compact(ca, args, out);
    if (run_cmd->parsed()) return cmd_run(ra, args, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sa, args, out);
    if (verify_cmd->parsed()) {
      va.width_given = verify_cmd->count("--width") > 0;
      return cmd_verify(va, args, out);
    }
    if (gen_cmd->parsed()) return cmd_gen(ga, args, out);
    if (replay_cmd->parsed()) return replay(manifest_path, out, err);
  } catch (const UsageError& e) {
    err << "mstcam: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "mstcam: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mstcam
